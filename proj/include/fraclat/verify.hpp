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
 * @file verify.hpp
 * @brief Randomized property suites behind `fraclat verify`: kernel tables,
 *        bracketing, operator monotonicity, the Temple chain, kernel decay,
 *        boundary sums and the continuum far field.
 *
 * Every instance draws from its own seed, derived from the master seed, the
 * suite name and the instance index, so a failure can be replayed alone and
 * results do not depend on the thread count.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "fraclat/continuum.hpp"
#include "fraclat/ids.hpp"
#include "fraclat/kernel.hpp"
#include "fraclat/lattice.hpp"
#include "fraclat/lifshitz.hpp"
#include "fraclat/parallel.hpp"
#include "fraclat/spectral.hpp"

namespace fraclat::verify {

struct Failure {
    std::uint64_t instance_seed = 0;
    double margin = 0.0;
    std::string detail;
};

struct SuiteResult {
    std::string name;
    std::string module;
    int instances = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::vector<Failure> failures;
    bool passed() const { return failures.empty(); }
};

/// splitmix64 stream; fixed arithmetic so draws match on every platform.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() { return mix64(state_++); }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Integer in [lo, hi].
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[next() % v.size()]; }

private:
    std::uint64_t state_;
};

inline std::uint64_t instance_seed(std::uint64_t master, std::string_view suite, std::uint64_t k) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : suite) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    return mix64(mix64(master ^ h) ^ k);
}

// ---------------------------------------------------------------------------
// Instance generators
// ---------------------------------------------------------------------------

struct NestedPair {
    int dim = 1;
    double alpha = 1.0;
    SiteSet inner, outer;
};

/// Outer half-width per dimension; the kernel radius must cover twice this.
inline int nested_half_width(int dim) { return dim == 1 ? 75 : 6; }

/// d in {1,2}, alpha in {1/4,1/2,3/4,1}. Half the instances are a box inside a
/// box; the rest are random scattered subsets of [-w, w]^d.
inline NestedPair random_nested_pair(std::uint64_t seed, std::size_t max_sites) {
    Stream s(seed);
    NestedPair p;
    p.dim = s.integer(1, 2);
    p.alpha = s.pick(std::vector<double>{0.25, 0.5, 0.75, 1.0});
    const int w = nested_half_width(p.dim);
    if (s.next() % 2 == 0) {
        int side_cap = p.dim == 1 ? static_cast<int>(max_sites) : static_cast<int>(std::sqrt(double(max_sites)));
        side_cap = std::min(side_cap, 2 * w + 1);
        std::vector<int> lo(p.dim), hi(p.dim), ilo(p.dim), ihi(p.dim);
        for (int c = 0; c < p.dim; ++c) {
            const int side = s.integer(2, side_cap);
            lo[c] = s.integer(-w, w - side + 1);
            hi[c] = lo[c] + side - 1;
            ilo[c] = s.integer(lo[c], hi[c]);
            ihi[c] = s.integer(ilo[c], hi[c]);
        }
        std::vector<Point> out, in;
        Point x(lo);
        while (true) {
            out.push_back(x);
            bool inside = true;
            for (int c = 0; c < p.dim; ++c) inside = inside && x[c] >= ilo[c] && x[c] <= ihi[c];
            if (inside) in.push_back(x);
            int c = p.dim - 1;
            while (c >= 0 && x[c] == hi[c]) x[c] = lo[c], --c;
            if (c < 0) break;
            ++x[c];
        }
        if (in.size() == out.size()) in.pop_back();  // keep the inner set proper
        p.outer = SiteSet::from_points(p.dim, std::move(out));
        p.inner = SiteSet::from_points(p.dim, std::move(in));
        return p;
    }
    std::vector<Point> all = box(p.dim, w).sites();
    const int n_out = s.integer(2, static_cast<int>(std::min(max_sites, all.size())));
    for (int i = 0; i < n_out; ++i) std::swap(all[i], all[i + s.next() % (all.size() - i)]);
    const int n_in = s.integer(1, n_out - 1);
    p.inner = SiteSet::from_points(p.dim, std::vector<Point>(all.begin(), all.begin() + n_in));
    p.outer = SiteSet::from_points(p.dim, std::vector<Point>(all.begin(), all.begin() + n_out));
    return p;
}

struct TempleInstance {
    int dim = 1;
    int L = 1;
    double alpha = 1.0;
    DisorderSpec disorder;
};

/// d in {1,2}, L in [1, L_max], alpha in {0.3,0.5,0.8,1}, Uniform01 with lambda = 1.
inline TempleInstance random_temple_instance(std::uint64_t seed, int L_max = 12) {
    Stream s(seed);
    TempleInstance t;
    t.dim = s.integer(1, 2);
    t.L = s.integer(1, L_max);
    t.alpha = s.pick(std::vector<double>{0.3, 0.5, 0.8, 1.0});
    t.disorder.family = DisorderFamily::Uniform01;
    t.disorder.coupling = 1.0;
    t.disorder.seed = s.next();
    return t;
}

/// B B^T + shift I, B an n x rank matrix with entries uniform in [-1, 1].
inline SymMatrix random_psd(Stream& s, int n, int rank, double shift) {
    Eigen::MatrixXd b(n, rank);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j) b(i, j) = 2.0 * s.uniform() - 1.0;
    Eigen::MatrixXd a = b * b.transpose();
    a.diagonal().array() += shift;
    return SymMatrix::from_dense(a);
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

struct Scale {
    bool full = false;
    unsigned threads = 1;
};

namespace detail {

/// Runs count instances in parallel; check(seed) returns (margin, failure detail or "").
template <class Check>
SuiteResult run_instances(std::string name, std::string module, std::uint64_t master, int count, unsigned threads,
                          Check&& check) {
    std::vector<std::pair<double, std::string>> out(static_cast<std::size_t>(count));
    parallel_for(out.size(), threads, [&](std::size_t k) {
        const std::uint64_t seed = instance_seed(master, name, k);
        try {
            out[k] = check(seed);
        } catch (const Error& e) {
            out[k] = {-std::numeric_limits<double>::infinity(), std::string("error: ") + e.what()};
        }
    });
    SuiteResult r;
    r.name = std::move(name);
    r.module = std::move(module);
    r.instances = count;
    for (std::size_t k = 0; k < out.size(); ++k) {
        r.worst_margin = std::min(r.worst_margin, out[k].first);
        if (!out[k].second.empty()) r.failures.push_back({instance_seed(master, r.name, k), out[k].first, out[k].second});
    }
    return r;
}

inline std::string join_z(const std::vector<int>& z) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < z.size(); ++i) os << (i ? "," : "") << z[i];
    os << ')';
    return os.str();
}

}  // namespace detail

/// Sign, symmetry and stencil invariants of a table; one failure per offending displacement.
inline SuiteResult table_invariants(const KernelTable& t, std::string name = "kernel-invariants") {
    SuiteResult r;
    r.name = std::move(name);
    r.module = "kernel";
    r.instances = 1;
    for (const auto& v : check_table_invariants(t)) {
        const double margin = -std::abs(v.value);
        r.worst_margin = std::min(r.worst_margin, margin);
        r.failures.push_back({0, margin, v.what + " at z=" + detail::join_z(v.z) + " value=" + format_real(v.value)});
    }
    if (r.failures.empty()) r.worst_margin = 0.0;
    return r;
}

/// Fourier against subordination on |z|_inf <= radius for d in {1,2} and
/// alpha in {1/4,1/2,3/4}; margin is the unused part of 1e-6 max(1,|v|).
inline SuiteResult cross_method(int radius, unsigned threads) {
    std::vector<std::tuple<int, double, std::vector<int>>> cases;
    for (int d : {1, 2})
        for (double a : {0.25, 0.5, 0.75})
            for (const auto& z : fraclat::detail::orbit_representatives(d, radius)) cases.emplace_back(d, a, z);
    std::vector<std::pair<double, std::string>> out(cases.size());
    QuadSpec spec;
    spec.abs_tol = 1e-10;
    spec.rel_tol = 1e-10;
    parallel_for(cases.size(), threads, [&](std::size_t i) {
        const auto& [d, a, z] = cases[i];
        const double f = kernel_fourier(z, a, spec).value;
        const double s = kernel_subordination(z, a, spec).value;
        const double margin = 1e-6 * std::max(1.0, std::abs(f)) - std::abs(f - s);
        std::string what;
        if (margin < 0.0) {
            std::ostringstream os;
            os << "d=" << d << " alpha=" << a << " z=" << detail::join_z(z) << " fourier=" << format_real(f)
               << " subordination=" << format_real(s);
            what = os.str();
        }
        out[i] = {margin, what};
    });
    SuiteResult r;
    r.name = "kernel-cross-method";
    r.module = "kernel";
    r.instances = static_cast<int>(cases.size());
    for (const auto& [m, w] : out) {
        r.worst_margin = std::min(r.worst_margin, m);
        if (!w.empty()) r.failures.push_back({0, m, w});
    }
    return r;
}

/// d = 1, alpha = 1/2 DFT table: |z|^2 (-K(z)) at |z| = radius within 5% of
/// K_{1,1/2} and closer to it than at |z| = 8.
inline SuiteResult decay(int radius, unsigned threads) {
    QuadSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-13;
    const KernelTable t = kernel_table(1, 0.5, radius, KernelMethod::DFTGrid, spec, threads);
    const DecayProfile p = decay_profile(t);
    const double at8 = std::abs(p.entries[7].ratio / p.k_limit - 1.0);
    const double atR = std::abs(p.entries[static_cast<std::size_t>(radius) - 1].ratio / p.k_limit - 1.0);
    SuiteResult r;
    r.name = "kernel-decay";
    r.module = "kernel";
    r.instances = 1;
    r.worst_margin = std::min(0.05 - atR, at8 - atR);
    if (r.worst_margin < 0.0) {
        std::ostringstream os;
        os << "ratio/K at |z|=" << radius << " off by " << atR << ", at |z|=8 off by " << at8;
        r.failures.push_back({0, r.worst_margin, os.str()});
    }
    return r;
}

inline SuiteResult bracketing(std::uint64_t master, int count, std::size_t max_sites, unsigned threads) {
    // One table per (d, alpha), wide enough for any pair either generator draws.
    std::map<std::pair<int, double>, KernelTable> kernels;
    QuadSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-12;
    for (int d : {1, 2})
        for (double a : {0.25, 0.5, 0.75, 1.0})
            kernels.emplace(std::pair{d, a},
                            kernel_table(d, a, 2 * nested_half_width(d), KernelMethod::DFTGrid, spec, threads));
    return detail::run_instances("bracketing", "spectral", master, count, threads, [&](std::uint64_t seed) {
        const NestedPair p = random_nested_pair(seed, max_sites);
        const BracketingReport rep = check_bracketing(p.inner, p.outer, kernels.at({p.dim, p.alpha}), 1e-9);
        std::string what;
        if (!rep.passed()) {
            std::ostringstream os;
            os << "d=" << p.dim << " alpha=" << p.alpha << " |inner|=" << p.inner.size()
               << " |outer|=" << p.outer.size() << " margins D>=free " << rep.dirichlet_over_free << ", Dsplit>=D "
               << rep.dirichlet_split_over_whole << ", free>=N " << rep.free_over_neumann << ", N>=Nsplit "
               << rep.neumann_whole_over_split << ", Dsplit>=free " << rep.dirichlet_split_over_free
               << ", free>=Nsplit " << rep.free_over_neumann_split << ", eigen order " << rep.eigen_order;
            what = os.str();
        }
        return std::pair{rep.worst(), what};
    });
}

inline SuiteResult operator_monotone(std::uint64_t master, int count, unsigned threads) {
    return detail::run_instances("operator-monotone", "spectral", master, count, threads, [](std::uint64_t seed) {
        Stream s(seed);
        const int n = s.integer(2, 30);
        const double alpha = 0.05 + 0.95 * s.uniform();
        const SymMatrix a = random_psd(s, n, n, 0.1);
        const SymMatrix p = random_psd(s, n, s.integer(1, n), 0.0);
        const MonotoneReport rep = check_operator_monotone(a, p, alpha, 1e-9);
        std::string what;
        if (!rep.passed) what = "n=" + std::to_string(n) + " alpha=" + format_real(alpha);
        return std::pair{rep.margin, what};
    });
}

inline SuiteResult temple(std::uint64_t master, int count, unsigned threads) {
    return detail::run_instances("temple", "lifshitz", master, count, threads, [](std::uint64_t seed) {
        const TempleInstance t = random_temple_instance(seed);
        const TempleReport rep = temple_experiment(t.dim, t.L, t.alpha, t.disorder, 0);
        std::string what;
        if (!rep.passed()) {
            std::ostringstream os;
            os << "d=" << t.dim << " L=" << t.L << " alpha=" << t.alpha << " margins a=" << rep.a << " b=" << rep.b
               << " c=" << rep.c << " d=" << rep.d << " e=" << rep.e;
            what = os.str();
        }
        return std::pair{rep.worst(), what};
    });
}

/// Boundary sums along L = 8..64: per-site values decrease and the log-log
/// slope stays below d - min(2 alpha, 1/2) + 0.15.
inline SuiteResult boundary(const std::vector<double>& alphas) {
    SuiteResult r;
    r.name = "boundary-sum";
    r.module = "ids";
    for (int d : {1, 2}) {
        for (double a : alphas) {
            ++r.instances;
            const BoundaryScaling s = boundary_scaling(d, a);
            const double margin = s.slope_limit - s.slope;
            r.worst_margin = std::min(r.worst_margin, margin);
            if (!s.passed()) {
                std::ostringstream os;
                os << "d=" << d << " alpha=" << a << " slope=" << s.slope
                   << (s.per_site_decreasing() ? "" : " per-site sums not decreasing");
                r.failures.push_back({0, margin, os.str()});
            }
        }
    }
    return r;
}

/// Gaussian far field at |x| in X = (5,10,20,40): last ratio within 10% of 1
/// and closer to 1 than the first.
inline SuiteResult continuum_ratios(const std::vector<double>& alphas) {
    SuiteResult r;
    r.name = "continuum-ratios";
    r.module = "continuum";
    QuadSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-10;
    for (double a : alphas) {
        ++r.instances;
        const TailLimit t = tail_limit_check(gaussian(1), a, {5.0, 10.0, 20.0, 40.0}, spec);
        const double last = std::abs(t.ratios.back() - 1.0), first = std::abs(t.ratios.front() - 1.0);
        const double margin = std::min(0.1 - last, first - last);
        r.worst_margin = std::min(r.worst_margin, margin);
        if (!(t.last_within_10_percent() && t.last_closer_than_first())) {
            std::ostringstream os;
            os << "alpha=" << a << " ratios";
            for (double q : t.ratios) os << ' ' << q;
            r.failures.push_back({0, margin, os.str()});
        }
    }
    return r;
}

/// The whole suite at quick or full scale.
inline std::vector<SuiteResult> run_all(std::uint64_t seed, const Scale& scale) {
    std::vector<SuiteResult> out;
    QuadSpec spec;
    spec.abs_tol = 1e-10;
    spec.rel_tol = 1e-10;
    for (int d : {1, 2})
        for (double a : {0.25, 0.5, 0.75, 1.0})
            out.push_back(table_invariants(kernel_table(d, a, scale.full ? 16 : 6, KernelMethod::DFTGrid, spec,
                                                        scale.threads),
                                           "kernel-invariants-d" + std::to_string(d) + "-a" + format_real(a)));
    out.push_back(cross_method(scale.full ? 6 : 2, scale.threads));
    out.push_back(decay(64, scale.threads));
    out.push_back(bracketing(seed, scale.full ? 200 : 50, scale.full ? 150 : 60, scale.threads));
    out.push_back(operator_monotone(seed, scale.full ? 200 : 50, scale.threads));
    out.push_back(temple(seed, scale.full ? 1000 : 100, scale.threads));
    out.push_back(boundary(scale.full ? std::vector<double>{0.25, 0.5, 0.75} : std::vector<double>{0.5}));
    out.push_back(continuum_ratios(scale.full ? std::vector<double>{0.25, 0.5, 0.75} : std::vector<double>{0.5}));
    return out;
}

}  // namespace fraclat::verify
