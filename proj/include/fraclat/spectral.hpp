// Copyright 2026 The fraclat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file spectral.hpp
 * @brief Temple's lower bound, Dirichlet/Neumann bracketing certificates and
 *        the operator-monotonicity check for x -> x^alpha.
 *
 * Matrix inequalities A <= B are certified by the smallest eigenvalue of
 * B - A; a "margin" below is always that number (negative means violated).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fraclat/lattice.hpp"
#include "fraclat/linalg.hpp"

namespace fraclat {

/// <psi,A psi> - Var_psi(A) / (E1 - <psi,A psi>), a lower bound on the ground
/// state energy whenever <psi,A psi> < E1 <= E_1(A).
///
/// E1 is checked against the second eigenvalue of A (up to 1e-12 relative
/// slack); a bad E1 is a PreconditionError, not a silently wrong bound.
inline double temple_bound(const SymMatrix& a, const Eigen::VectorXd& psi, double e1) {
    if (static_cast<std::size_t>(psi.size()) != a.n()) throw PreconditionError("temple_bound: size mismatch");
    if (a.n() < 2) throw PreconditionError("temple_bound: need at least two eigenvalues");
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw PreconditionError("temple_bound: psi must be a unit vector");
    const Eigen::VectorXd ap = a.dense() * psi;
    const double mu = psi.dot(ap);
    if (!(mu < e1)) throw PreconditionError("temple_bound: need <psi,A psi> < E1");
    const Eigen::VectorXd ev = eigenvalues_sym(a);
    const double slack = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (e1 > ev(1) + slack)
        throw PreconditionError("temple_bound: E1 exceeds the second eigenvalue of A");
    const double variance = (ap - mu * psi).squaredNorm();
    return mu - variance / (e1 - mu);
}

/// Places blocks for `first` and `second` (which partition `whole`) into the
/// index order of `whole`.
inline SymMatrix direct_sum(const SiteSet& whole, const SiteSet& first, const SymMatrix& a, const SiteSet& second,
                            const SymMatrix& b) {
    if (first.size() + second.size() != whole.size() || a.n() != first.size() || b.n() != second.size())
        throw PreconditionError("direct_sum: blocks do not partition the set");
    SymMatrix out(whole.size());
    auto place = [&](const SiteSet& part, const SymMatrix& m) {
        std::vector<std::size_t> pos(part.size());
        for (std::size_t i = 0; i < part.size(); ++i) {
            const auto p = whole.position(part[i]);
            if (!p) throw PreconditionError("direct_sum: block site not in the set");
            pos[i] = *p;
        }
        for (std::size_t i = 0; i < part.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j) out.set(pos[i], pos[j], m(i, j));
    };
    place(first, a);
    place(second, b);
    return out;
}

struct BracketingReport {
    // Quadratic-form margins, min eig(upper - lower).
    double dirichlet_over_free = 0.0;        ///< (-D_outer)^a - 1(-Delta)^a 1
    double dirichlet_split_over_whole = 0.0; ///< (-D_inner)^a (+) (-D_rest)^a - (-D_outer)^a
    double free_over_neumann = 0.0;          ///< 1(-Delta)^a 1 - (-N_outer)^a
    double neumann_whole_over_split = 0.0;   ///< (-N_outer)^a - (-N_inner)^a (+) (-N_rest)^a
    double dirichlet_split_over_free = 0.0;  ///< D-split - free restriction (end to end)
    double free_over_neumann_split = 0.0;    ///< free restriction - N-split (end to end)
    // Eigenvalue ordering margins, min_j (E_j(upper) - E_j(lower)), chain
    // N-split <= N <= free <= D <= D-split.
    double eigen_order = 0.0;
    double tol = 0.0;

    double worst() const {
        return std::min({dirichlet_over_free, dirichlet_split_over_whole, free_over_neumann, neumann_whole_over_split,
                         dirichlet_split_over_free, free_over_neumann_split, eigen_order});
    }
    bool passed() const { return worst() >= -tol; }
};

inline BracketingReport check_bracketing(const SiteSet& inner, const SiteSet& outer, const KernelTable& kernel,
                                         double tol) {
    if (!is_subset(inner, outer) || inner.size() >= outer.size() || inner.empty())
        throw PreconditionError("check_bracketing: inner must be a non-empty proper subset of outer");
    const double alpha = kernel.alpha();
    const SiteSet rest = set_difference(outer, inner);
    const SymMatrix mid = free_restriction(outer, kernel);
    const SymMatrix dir = bc_fractional(outer, BoundaryCondition::Dirichlet, alpha);
    const SymMatrix neu = bc_fractional(outer, BoundaryCondition::Neumann, alpha);
    const SymMatrix dir_split = direct_sum(outer, inner, bc_fractional(inner, BoundaryCondition::Dirichlet, alpha),
                                           rest, bc_fractional(rest, BoundaryCondition::Dirichlet, alpha));
    const SymMatrix neu_split = direct_sum(outer, inner, bc_fractional(inner, BoundaryCondition::Neumann, alpha),
                                           rest, bc_fractional(rest, BoundaryCondition::Neumann, alpha));
    BracketingReport r;
    r.tol = tol;
    r.dirichlet_over_free = min_eigenvalue(dir - mid);
    r.dirichlet_split_over_whole = min_eigenvalue(dir_split - dir);
    r.free_over_neumann = min_eigenvalue(mid - neu);
    r.neumann_whole_over_split = min_eigenvalue(neu - neu_split);
    r.dirichlet_split_over_free = min_eigenvalue(dir_split - mid);
    r.free_over_neumann_split = min_eigenvalue(mid - neu_split);
    const std::vector<Eigen::VectorXd> chain{eigenvalues_sym(neu_split), eigenvalues_sym(neu), eigenvalues_sym(mid),
                                             eigenvalues_sym(dir), eigenvalues_sym(dir_split)};
    r.eigen_order = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < chain.size(); ++k)
        r.eigen_order = std::min(r.eigen_order, (chain[k + 1] - chain[k]).minCoeff());
    return r;
}

struct MonotoneReport {
    double margin = 0.0;  ///< min eig((A+P)^alpha - A^alpha)
    bool passed = false;
};

inline MonotoneReport check_operator_monotone(const SymMatrix& a, const SymMatrix& p, double alpha, double tol) {
    MonotoneReport r;
    r.margin = min_eigenvalue(matrix_power(a + p, alpha) - matrix_power(a, alpha));
    r.passed = r.margin >= -tol;
    return r;
}

}  // namespace fraclat
