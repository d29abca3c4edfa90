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
 * @file ids.hpp
 * @brief Monte Carlo estimates of the integrated density of states.
 *
 * Two estimators on the box [-L, L]^d:
 *   - counting:   #{j : lambda_j <= E} / |box|, per realization;
 *   - projection: mean over an inner sub-box of <delta_n, 1(H <= E) delta_n>,
 *                 from the eigenbasis of the free restriction.
 * Realization r always uses sample_disorder(spec, box, r), so results depend
 * only on the seed and never on the thread count (reduction is in realization
 * order).
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fraclat/format.hpp"
#include "fraclat/lattice.hpp"
#include "fraclat/linalg.hpp"
#include "fraclat/parallel.hpp"

namespace fraclat {

struct Geometry {
    int dim = 1;
    int L = 0;
};

struct IDSCurve {
    std::vector<double> energies;
    std::vector<double> n_hat;
    std::vector<double> std_error;
    int realizations = 0;
    Geometry geometry;
    BoundaryCondition bc = BoundaryCondition::Free;
    double alpha = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_energies(std::span<const double> energies) {
    if (energies.empty()) throw PreconditionError("ids: empty energy grid");
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (!std::isfinite(energies[i])) throw PreconditionError("ids: non-finite energy");
        if (i > 0 && !(energies[i] > energies[i - 1])) throw PreconditionError("ids: energies must be ascending");
    }
}

/// #{j : ev_j <= e} for every e; ev ascending.
inline std::vector<std::size_t> counts_below(const Eigen::VectorXd& ev, std::span<const double> energies) {
    std::vector<std::size_t> c(energies.size());
    const double* b = ev.data();
    for (std::size_t i = 0; i < energies.size(); ++i)
        c[i] = static_cast<std::size_t>(std::upper_bound(b, b + ev.size(), energies[i]) - b);
    return c;
}

/// Mean and standard error (sample sd / sqrt(R)) per energy, rows in realization order.
inline void aggregate(const std::vector<std::vector<double>>& rows, IDSCurve& out) {
    const std::size_t r = rows.size(), ne = out.energies.size();
    out.n_hat.assign(ne, 0.0);
    out.std_error.assign(ne, 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
        double sum = 0.0;
        for (std::size_t k = 0; k < r; ++k) sum += rows[k][e];
        const double mean = sum / static_cast<double>(r);
        double ss = 0.0;
        for (std::size_t k = 0; k < r; ++k) ss += (rows[k][e] - mean) * (rows[k][e] - mean);
        out.n_hat[e] = std::clamp(mean, 0.0, 1.0);
        out.std_error[e] = r > 1 ? std::sqrt(ss / static_cast<double>(r - 1) / static_cast<double>(r)) : 0.0;
    }
    // Means of non-decreasing rows are non-decreasing up to summation order; make it exact.
    for (std::size_t e = 1; e < ne; ++e) out.n_hat[e] = std::max(out.n_hat[e], out.n_hat[e - 1]);
}

inline IDSCurve curve_shell(Geometry g, BoundaryCondition bc, const KernelTable& kernel, const DisorderSpec& disorder,
                            std::span<const double> energies, int realizations) {
    IDSCurve c;
    c.energies.assign(energies.begin(), energies.end());
    c.realizations = realizations;
    c.geometry = g;
    c.bc = bc;
    c.alpha = kernel.alpha();
    c.lambda = disorder.coupling;
    c.seed = disorder.seed;
    return c;
}

inline void check_common(Geometry g, const KernelTable& kernel, const DisorderSpec& disorder,
                         std::span<const double> energies, int realizations) {
    if (realizations < 1) throw PreconditionError("ids: need at least one realization");
    if (g.dim != kernel.dim()) throw PreconditionError("ids: kernel dimension mismatch");
    disorder.validate();
    check_energies(energies);
}

/// Sites of the sub-box [-l, l]^d as positions in `set`.
inline std::vector<std::size_t> inner_positions(const SiteSet& set, int l) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < set.size(); ++i) {
        bool inside = true;
        for (int c : set[i]) inside = inside && std::abs(c) <= l;
        if (inside) pos.push_back(i);
    }
    return pos;
}

/// Projection estimate from one decomposition: mean over `inner` of sum_{lambda_j <= E} U(n, j)^2.
inline std::vector<double> projection_row(const EigDecomp& e, const std::vector<std::size_t>& inner,
                                          std::span<const double> energies) {
    const Eigen::Index n = e.eigenvalues.size();
    std::vector<double> weight(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index j = 0; j < n; ++j)
        for (std::size_t p : inner) weight[j] += e.basis(static_cast<Eigen::Index>(p), j) * e.basis(static_cast<Eigen::Index>(p), j);
    std::vector<double> row(energies.size());
    const auto counts = counts_below(e.eigenvalues, energies);
    double acc = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        for (; j < counts[i]; ++j) acc += weight[j];
        row[i] = acc / static_cast<double>(inner.size());
    }
    return row;
}

}  // namespace detail

/// Counting estimator N_hat(E) = E[#{lambda_j(H_L) <= E}] / |Lambda_L|.
inline IDSCurve ids_counting_estimate(Geometry g, BoundaryCondition bc, const KernelTable& kernel,
                                      const DisorderSpec& disorder, std::span<const double> energies, int realizations,
                                      unsigned threads = 1) {
    detail::check_common(g, kernel, disorder, energies, realizations);
    const SiteSet set = box(g.dim, g.L);
    const SymMatrix base = fractional_part(set, bc, kernel);
    const double size = static_cast<double>(set.size());
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(realizations));
    parallel_for(rows.size(), threads, [&](std::size_t r) {
        const auto v = sample_disorder(disorder, set, r);
        const auto counts = detail::counts_below(eigenvalues_sym(add_potential(base, v, disorder.coupling)), energies);
        rows[r].resize(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) rows[r][i] = static_cast<double>(counts[i]) / size;
    });
    IDSCurve out = detail::curve_shell(g, bc, kernel, disorder, energies, realizations);
    detail::aggregate(rows, out);
    return out;
}

/// Diagonal-projection estimator on the free restriction, averaged over the
/// sub-box [-floor(inner_fraction L), floor(inner_fraction L)]^d.
inline IDSCurve ids_projection_estimate(Geometry g, const KernelTable& kernel, const DisorderSpec& disorder,
                                        std::span<const double> energies, int realizations,
                                        double inner_fraction = 0.5, unsigned threads = 1) {
    detail::check_common(g, kernel, disorder, energies, realizations);
    if (!(inner_fraction > 0.0 && inner_fraction <= 1.0))
        throw PreconditionError("ids_projection_estimate: inner_fraction must lie in (0, 1]");
    const SiteSet set = box(g.dim, g.L);
    const SymMatrix base = free_restriction(set, kernel);
    const auto inner = detail::inner_positions(set, static_cast<int>(std::floor(inner_fraction * g.L)));
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(realizations));
    parallel_for(rows.size(), threads, [&](std::size_t r) {
        const auto v = sample_disorder(disorder, set, r);
        rows[r] = detail::projection_row(eig_sym(add_potential(base, v, disorder.coupling)), inner, energies);
    });
    IDSCurve out = detail::curve_shell(g, BoundaryCondition::Free, kernel, disorder, energies, realizations);
    detail::aggregate(rows, out);
    return out;
}

struct SandwichViolation {
    std::uint64_t realization = 0;
    double energy = 0.0;
    std::size_t dirichlet = 0, mid = 0, neumann = 0;
};

struct SandwichResult {
    IDSCurve dirichlet, mid, neumann;
    std::vector<SandwichViolation> violations;
    bool passed() const { return violations.empty(); }
};

/// Dirichlet, free and Neumann counting estimates with one shared potential per
/// realization; checks count^D <= count^mid <= count^N for every (realization, E).
inline SandwichResult sandwich(Geometry g, const KernelTable& kernel, const DisorderSpec& disorder,
                               std::span<const double> energies, int realizations, unsigned threads = 1) {
    detail::check_common(g, kernel, disorder, energies, realizations);
    const SiteSet set = box(g.dim, g.L);
    const std::array<BoundaryCondition, 3> bcs{BoundaryCondition::Dirichlet, BoundaryCondition::Free,
                                               BoundaryCondition::Neumann};
    std::array<SymMatrix, 3> base;
    for (int b = 0; b < 3; ++b) base[b] = fractional_part(set, bcs[b], kernel);
    const double size = static_cast<double>(set.size());
    const std::size_t nr = static_cast<std::size_t>(realizations);
    std::array<std::vector<std::vector<double>>, 3> rows;
    for (auto& r : rows) r.resize(nr);
    std::vector<std::vector<SandwichViolation>> bad(nr);
    parallel_for(nr, threads, [&](std::size_t r) {
        const auto v = sample_disorder(disorder, set, r);
        std::array<std::vector<std::size_t>, 3> counts;
        for (int b = 0; b < 3; ++b) {
            counts[b] = detail::counts_below(eigenvalues_sym(add_potential(base[b], v, disorder.coupling)), energies);
            rows[b][r].resize(energies.size());
            for (std::size_t i = 0; i < energies.size(); ++i)
                rows[b][r][i] = static_cast<double>(counts[b][i]) / size;
        }
        for (std::size_t i = 0; i < energies.size(); ++i)
            if (counts[0][i] > counts[1][i] || counts[1][i] > counts[2][i])
                bad[r].push_back({r, energies[i], counts[0][i], counts[1][i], counts[2][i]});
    });
    SandwichResult out;
    IDSCurve* curves[3] = {&out.dirichlet, &out.mid, &out.neumann};
    for (int b = 0; b < 3; ++b) {
        *curves[b] = detail::curve_shell(g, bcs[b], kernel, disorder, energies, realizations);
        detail::aggregate(rows[b], *curves[b]);
    }
    for (const auto& list : bad) out.violations.insert(out.violations.end(), list.begin(), list.end());
    return out;
}

struct EstimatorGap {
    std::vector<int> L;
    std::vector<double> gap;  ///< sup_E |counting - projection|
    double slack = 1.2;
    /// gap[i+1] <= slack * gap[i] for every i.
    bool decreasing() const {
        for (std::size_t i = 0; i + 1 < gap.size(); ++i)
            if (gap[i + 1] > slack * gap[i]) return false;
        return true;
    }
};

/// Sup-norm distance between the free-restriction counting and projection
/// estimators for each L, both taken from the same decompositions.
inline EstimatorGap estimator_gap(int dim, const KernelTable& kernel, const DisorderSpec& disorder,
                                  std::span<const double> energies, const std::vector<int>& L_list, int realizations,
                                  double inner_fraction = 0.5, unsigned threads = 1, double slack = 1.2) {
    if (L_list.size() < 2) throw PreconditionError("estimator_gap: need at least two box sizes");
    for (std::size_t i = 1; i < L_list.size(); ++i)
        if (!(L_list[i] > L_list[i - 1])) throw PreconditionError("estimator_gap: L_list must be ascending");
    if (!(inner_fraction > 0.0 && inner_fraction <= 1.0))
        throw PreconditionError("estimator_gap: inner_fraction must lie in (0, 1]");
    EstimatorGap out;
    out.slack = slack;
    for (int L : L_list) {
        const Geometry g{dim, L};
        detail::check_common(g, kernel, disorder, energies, realizations);
        const SiteSet set = box(dim, L);
        const SymMatrix base = free_restriction(set, kernel);
        const auto inner = detail::inner_positions(set, static_cast<int>(std::floor(inner_fraction * L)));
        const double size = static_cast<double>(set.size());
        std::vector<std::vector<double>> count_rows(static_cast<std::size_t>(realizations)), proj_rows(count_rows.size());
        parallel_for(count_rows.size(), threads, [&](std::size_t r) {
            const auto v = sample_disorder(disorder, set, r);
            const EigDecomp e = eig_sym(add_potential(base, v, disorder.coupling));
            const auto counts = detail::counts_below(e.eigenvalues, energies);
            count_rows[r].resize(counts.size());
            for (std::size_t i = 0; i < counts.size(); ++i) count_rows[r][i] = static_cast<double>(counts[i]) / size;
            proj_rows[r] = detail::projection_row(e, inner, energies);
        });
        IDSCurve a = detail::curve_shell(g, BoundaryCondition::Free, kernel, disorder, energies, realizations), b = a;
        detail::aggregate(count_rows, a);
        detail::aggregate(proj_rows, b);
        double sup = 0.0;
        for (std::size_t i = 0; i < energies.size(); ++i) sup = std::max(sup, std::abs(a.n_hat[i] - b.n_hat[i]));
        out.L.push_back(L);
        out.gap.push_back(sup);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Boundary sum
// ---------------------------------------------------------------------------

struct BoundarySum {
    double value = 0.0;
    double tail_bound = 0.0;  ///< bound on the omitted |m|_inf > outer part
    int outer = 0;            ///< truncation radius used
};

/// S(L) = sum_{k in box L} sum_{m not in box L, |m|_inf <= 3 max(L,1)} |k - m|^{-(d + 2 alpha)}.
///
/// Pairs are grouped by displacement z = m - k. The number of pairs with a
/// given z factorizes over coordinates: (#k with k+z in the outer box) minus
/// (#k with k+z in the inner box), each a product of interval overlaps.
inline BoundarySum boundary_sum(int dim, double alpha, int L) {
    if (dim != 1 && dim != 2) throw PreconditionError("boundary_sum: dim must be 1 or 2");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionError("boundary_sum: alpha must lie in (0, 1]");
    if (L < 0 || L > 64) throw PreconditionError("boundary_sum: L must lie in [0, 64]");
    const int M = 3 * std::max(L, 1);
    auto overlap = [L](int t, int half) {
        // #{k in [-L, L] : k + t in [-half, half]}
        const int lo = std::max(-L, -half - t), hi = std::min(L, half - t);
        return static_cast<double>(std::max(0, hi - lo + 1));
    };
    const int reach = L + M;
    const double p = dim + 2.0 * alpha;
    BoundarySum out;
    out.outer = M;
    if (dim == 1) {
        for (int z = -reach; z <= reach; ++z) {
            if (z == 0) continue;
            const double pairs = overlap(z, M) - overlap(z, L);
            if (pairs > 0) out.value += pairs * std::pow(std::abs(z), -p);
        }
    } else {
        for (int z1 = -reach; z1 <= reach; ++z1)
            for (int z2 = -reach; z2 <= reach; ++z2) {
                if (z1 == 0 && z2 == 0) continue;
                const double pairs = overlap(z1, M) * overlap(z2, M) - overlap(z1, L) * overlap(z2, L);
                if (pairs > 0) out.value += pairs * std::pow(static_cast<double>(z1) * z1 + static_cast<double>(z2) * z2, -0.5 * p);
            }
    }
    // Omitted m satisfy |m - k|_inf > g = M - L; at most 2d (3r)^{d-1} points
    // sit at sup-distance r and |y| >= |y|_inf, so each k loses at most
    // 2d 3^{d-1} sum_{r > g} r^{-1-2 alpha} <= d 3^{d-1} g^{-2 alpha} / alpha.
    const double g = static_cast<double>(M - L);
    out.tail_bound = std::pow(2.0 * L + 1.0, dim) * dim * std::pow(3.0, dim - 1) * std::pow(g, -2.0 * alpha) / alpha;
    return out;
}

struct BoundaryScaling {
    std::vector<int> L;
    std::vector<double> per_site;  ///< S(L) / |box L|
    double slope = 0.0;            ///< least-squares slope of ln S against ln L
    double slope_limit = 0.0;      ///< d - min(2 alpha, 1/2) + 0.15
    bool per_site_decreasing() const {
        for (std::size_t i = 0; i + 1 < per_site.size(); ++i)
            if (!(per_site[i + 1] < per_site[i])) return false;
        return true;
    }
    bool passed() const { return per_site_decreasing() && slope <= slope_limit; }
};

inline BoundaryScaling boundary_scaling(int dim, double alpha, const std::vector<int>& L_list = {8, 16, 32, 64}) {
    if (L_list.size() < 2) throw PreconditionError("boundary_scaling: need at least two sizes");
    BoundaryScaling out;
    std::vector<double> x, y;
    for (int L : L_list) {
        if (L < 1) throw PreconditionError("boundary_scaling: sizes must be positive");
        const double s = boundary_sum(dim, alpha, L).value;
        out.L.push_back(L);
        out.per_site.push_back(s / std::pow(2.0 * L + 1.0, dim));
        x.push_back(std::log(static_cast<double>(L)));
        y.push_back(std::log(s));
    }
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    out.slope = sxy / sxx;
    out.slope_limit = dim - std::min(2.0 * alpha, 0.5) + 0.15;
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

/// CSV with header energy,n_hat,stderr,realizations,dim,L,alpha,lambda,bc,seed;
/// each metadata pair becomes a leading "# key=value" line.
inline void write_ids_csv(std::ostream& os, const IDSCurve& c,
                          const std::vector<std::pair<std::string, std::string>>& metadata = {}) {
    for (const auto& [k, v] : metadata) os << "# " << k << '=' << v << '\n';
    os << "energy,n_hat,stderr,realizations,dim,L,alpha,lambda,bc,seed\n";
    for (std::size_t i = 0; i < c.energies.size(); ++i) {
        os << format_real(c.energies[i]) << ',' << format_real(c.n_hat[i]) << ',' << format_real(c.std_error[i]) << ','
           << c.realizations << ',' << c.geometry.dim << ',' << c.geometry.L << ',' << format_real(c.alpha) << ','
           << format_real(c.lambda) << ',' << to_string(c.bc) << ',' << c.seed << '\n';
    }
}

}  // namespace fraclat
