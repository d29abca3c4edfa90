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
 * @file lattice.hpp
 * @brief Finite site sets, restricted Laplacians, random potentials and the
 *        finite-volume Hamiltonian (-Delta)^alpha + lambda V.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fraclat/error.hpp"
#include "fraclat/kernel.hpp"
#include "fraclat/linalg.hpp"

namespace fraclat {

using Point = std::vector<int>;

/// Distinct points of Z^d in lexicographic order (first coordinate most significant).
class SiteSet {
public:
    SiteSet() = default;

    static SiteSet from_points(int dim, std::vector<Point> points) {
        if (dim < 1) throw PreconditionError("SiteSet: dim must be positive");
        for (const auto& p : points)
            if (static_cast<int>(p.size()) != dim) throw PreconditionError("SiteSet: point has wrong dimension");
        std::sort(points.begin(), points.end());
        if (std::adjacent_find(points.begin(), points.end()) != points.end())
            throw PreconditionError("SiteSet: duplicate site");
        SiteSet s;
        s.dim_ = dim;
        s.sites_ = std::move(points);
        for (std::size_t i = 0; i < s.sites_.size(); ++i) s.index_.emplace(s.sites_[i], i);
        return s;
    }

    int dim() const { return dim_; }
    std::size_t size() const { return sites_.size(); }
    bool empty() const { return sites_.empty(); }
    const std::vector<Point>& sites() const { return sites_; }
    const Point& operator[](std::size_t i) const { return sites_[i]; }

    std::optional<std::size_t> position(const Point& p) const {
        const auto it = index_.find(p);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    bool contains(const Point& p) const { return index_.count(p) != 0; }

    /// max |x - y|_inf over pairs of sites; 0 for a single site.
    int diameter() const {
        int d = 0;
        for (int c = 0; c < dim_; ++c) {
            int lo = sites_.front()[c], hi = lo;
            for (const auto& p : sites_) {
                lo = std::min(lo, p[c]);
                hi = std::max(hi, p[c]);
            }
            d = std::max(d, hi - lo);
        }
        return d;
    }

private:
    int dim_ = 0;
    std::vector<Point> sites_;
    std::map<Point, std::size_t> index_;
};

inline constexpr std::size_t kMaxSites = 1'000'000;

/// The box [-L, L]^d.
inline SiteSet box(int dim, int L) {
    if (dim < 1) throw PreconditionError("box: dim must be positive");
    if (L < 0) throw PreconditionError("box: L must be non-negative");
    const double side = 2.0 * L + 1.0;
    if (std::pow(side, dim) > static_cast<double>(kMaxSites))
        throw PreconditionError("box: more than 10^6 sites");
    std::vector<Point> pts;
    Point p(dim, -L);
    while (true) {
        pts.push_back(p);
        int c = dim - 1;
        while (c >= 0 && p[c] == L) p[c--] = -L;
        if (c < 0) break;
        ++p[c];
    }
    return SiteSet::from_points(dim, std::move(pts));
}

/// Sites of `outer` not in `inner`.
inline SiteSet set_difference(const SiteSet& outer, const SiteSet& inner) {
    std::vector<Point> pts;
    for (const auto& p : outer.sites())
        if (!inner.contains(p)) pts.push_back(p);
    return SiteSet::from_points(outer.dim(), std::move(pts));
}

inline bool is_subset(const SiteSet& inner, const SiteSet& outer) {
    if (inner.dim() != outer.dim()) return false;
    for (const auto& p : inner.sites())
        if (!outer.contains(p)) return false;
    return true;
}

enum class BoundaryCondition { Free, Neumann, Dirichlet };

inline std::string to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::Free: return "free";
        case BoundaryCondition::Neumann: return "neumann";
        case BoundaryCondition::Dirichlet: return "dirichlet";
    }
    return "?";
}

inline BoundaryCondition boundary_condition_from_string(std::string_view s) {
    if (s == "free") return BoundaryCondition::Free;
    if (s == "neumann") return BoundaryCondition::Neumann;
    if (s == "dirichlet") return BoundaryCondition::Dirichlet;
    throw PreconditionError("unknown boundary condition '" + std::string(s) + "'");
}

/// -Delta restricted to `set`. With b(n) the number of nearest neighbours of n
/// outside the set, the diagonal is 2d - b(n) (Neumann), 2d (Free) or
/// 2d + b(n) (Dirichlet); nearest-neighbour pairs inside the set get -1.
inline SymMatrix laplacian_restricted(const SiteSet& set, BoundaryCondition bc) {
    if (set.empty()) throw PreconditionError("laplacian_restricted: empty set");
    const int d = set.dim();
    SymMatrix h(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        Point q = set[i];
        int outside = 0;
        for (int c = 0; c < d; ++c) {
            for (int step : {-1, 1}) {
                q[c] += step;
                if (const auto j = set.position(q)) h.set(i, *j, -1.0);
                else ++outside;
                q[c] -= step;
            }
        }
        const int sign = bc == BoundaryCondition::Neumann ? -1 : bc == BoundaryCondition::Dirichlet ? 1 : 0;
        h.set(i, i, 2.0 * d + sign * outside);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Disorder
// ---------------------------------------------------------------------------

enum class DisorderFamily { Uniform01, Bernoulli, Exponential };

struct DisorderSpec {
    DisorderFamily family = DisorderFamily::Uniform01;
    double parameter = 0.0;  ///< p for Bernoulli, rate for Exponential, unused for Uniform01
    double coupling = 1.0;   ///< lambda
    std::uint64_t seed = 0;

    void validate() const {
        if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw PreconditionError("disorder: coupling must be >= 0");
        if (family == DisorderFamily::Bernoulli && !(parameter >= 0.0 && parameter <= 1.0))
            throw PreconditionError("disorder: Bernoulli p must lie in [0, 1]");
        if (family == DisorderFamily::Exponential && !(parameter > 0.0 && std::isfinite(parameter)))
            throw PreconditionError("disorder: exponential rate must be positive");
    }
};

inline std::string to_string(DisorderFamily f) {
    switch (f) {
        case DisorderFamily::Uniform01: return "uniform";
        case DisorderFamily::Bernoulli: return "bernoulli";
        case DisorderFamily::Exponential: return "exponential";
    }
    return "?";
}

inline DisorderFamily disorder_family_from_string(std::string_view s) {
    if (s == "uniform") return DisorderFamily::Uniform01;
    if (s == "bernoulli") return DisorderFamily::Bernoulli;
    if (s == "exponential") return DisorderFamily::Exponential;
    throw PreconditionError("unknown disorder family '" + std::string(s) + "'");
}

/// Exponent kappa with P(V < eps) >= C eps^kappa near 0, if the family has one.
/// Bernoulli puts an atom at 0 and a gap above it, so it has none.
inline std::optional<double> regularity_exponent(const DisorderSpec& spec) {
    if (spec.family == DisorderFamily::Bernoulli) return std::nullopt;
    return 1.0;
}

/// splitmix64 finalizer applied to x + golden-ratio increment.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// u = 2^-53 * (mix64(mix64(mix64(seed) ^ realization) ^ site) >> 11), in [0, 1).
inline double site_uniform(std::uint64_t seed, std::uint64_t realization, std::uint64_t site) {
    const std::uint64_t h = mix64(mix64(mix64(seed) ^ realization) ^ site);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// One potential value per site of `set` (indexed like the set), by inverse CDF
/// of site_uniform: u, [u < p], or -log(1-u)/rate.
inline std::vector<double> sample_disorder(const DisorderSpec& spec, const SiteSet& set, std::uint64_t realization) {
    spec.validate();
    std::vector<double> v(set.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double u = site_uniform(spec.seed, realization, i);
        switch (spec.family) {
            case DisorderFamily::Uniform01: v[i] = u; break;
            case DisorderFamily::Bernoulli: v[i] = u < spec.parameter ? 1.0 : 0.0; break;
            case DisorderFamily::Exponential: v[i] = -std::log1p(-u) / spec.parameter; break;
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Hamiltonian
// ---------------------------------------------------------------------------

/// 1_set (-Delta)^alpha 1_set, entries read from the kernel table.
inline SymMatrix free_restriction(const SiteSet& set, const KernelTable& kernel) {
    if (set.empty()) throw PreconditionError("free_restriction: empty set");
    if (set.dim() != kernel.dim()) throw PreconditionError("free_restriction: kernel dimension mismatch");
    if (kernel.radius() < set.diameter())
        throw PreconditionError("free_restriction: kernel radius " + std::to_string(kernel.radius()) +
                                " is smaller than the set diameter " + std::to_string(set.diameter()));
    const int d = set.dim();
    SymMatrix h(set.size());
    std::vector<int> z(d);
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            for (int c = 0; c < d; ++c) z[c] = set[i][c] - set[j][c];
            h.set(i, j, kernel.at(z));
        }
    return h;
}

/// (-Delta^X_set)^alpha for X = Neumann or Dirichlet.
inline SymMatrix bc_fractional(const SiteSet& set, BoundaryCondition bc, double alpha) {
    if (bc == BoundaryCondition::Free)
        throw PreconditionError("bc_fractional: the free restriction needs a kernel table");
    return matrix_power(laplacian_restricted(set, bc), alpha);
}

/// Fractional part of H for the given boundary condition; only kernel.alpha()
/// is used unless bc is Free.
inline SymMatrix fractional_part(const SiteSet& set, BoundaryCondition bc, const KernelTable& kernel) {
    if (bc == BoundaryCondition::Free) return free_restriction(set, kernel);
    return bc_fractional(set, bc, kernel.alpha());
}

/// base + lambda diag(potential).
inline SymMatrix add_potential(SymMatrix base, std::span<const double> potential, double lambda) {
    if (potential.size() != base.n()) throw PreconditionError("add_potential: potential has wrong length");
    for (std::size_t i = 0; i < potential.size(); ++i) base.add_diagonal(i, lambda * potential[i]);
    return base;
}

inline SymMatrix assemble_hamiltonian(const SiteSet& set, BoundaryCondition bc, const KernelTable& kernel,
                                      std::span<const double> potential, double lambda) {
    return add_potential(fractional_part(set, bc, kernel), potential, lambda);
}

}  // namespace fraclat
