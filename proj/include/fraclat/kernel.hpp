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
 * @file kernel.hpp
 * @brief Matrix elements (-Delta)^alpha(z, 0) of the discrete fractional
 *        Laplacian on Z^d.
 *
 * Three independent routes:
 *   - Fourier:       pi^{-d} int_{[0,pi]^d} (sum_j 4 sin^2(k_j/2))^alpha prod_j cos(z_j k_j) dk,
 *                    nested adaptive quadrature (the torus integral reduced by evenness,
 *                    so the imaginary part vanishes identically);
 *   - Subordination: -(1/|Gamma(-alpha)|) int_0^inf t^{-1-alpha} prod_j e^{-2t} I_{|z_j|}(2t) dt
 *                    for z != 0, and the 1 - prod form on the diagonal;
 *   - DFTGrid:       the symbol sampled on an M^d grid, inverse DFT restricted to the
 *                    table window, Richardson-extrapolated in M^{-(d+2 alpha)},
 *                    M doubled until the extrapolated values settle.
 * alpha = 1 always takes the exact nearest-neighbour stencil.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fraclat/error.hpp"
#include "fraclat/format.hpp"
#include "fraclat/parallel.hpp"
#include "fraclat/specialfn.hpp"

namespace fraclat {

enum class KernelMethod { Fourier, Subordination, DFTGrid };

inline std::string to_string(KernelMethod m) {
    switch (m) {
        case KernelMethod::Fourier: return "fourier";
        case KernelMethod::Subordination: return "subordination";
        case KernelMethod::DFTGrid: return "dft";
    }
    return "unknown";
}

inline KernelMethod kernel_method_from_string(std::string_view s) {
    if (s == "fourier") return KernelMethod::Fourier;
    if (s == "subordination") return KernelMethod::Subordination;
    if (s == "dft") return KernelMethod::DFTGrid;
    throw PreconditionError("unknown kernel method '" + std::string(s) + "'");
}

/// A value with its quadrature-reported error.
struct KernelValue {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

inline void check_alpha(double alpha, bool allow_one = true) {
    if (!(alpha > 0.0) || alpha > 1.0 || (!allow_one && alpha == 1.0))
        throw PreconditionError("alpha must lie in (0, 1" + std::string(allow_one ? "]" : ")"));
}

inline std::int64_t abs_l1(std::span<const int> z) {
    std::int64_t s = 0;
    for (int v : z) s += std::abs(v);
    return s;
}

inline double norm2(std::span<const int> z) {
    double s = 0.0;
    for (int v : z) s += static_cast<double>(v) * v;
    return std::sqrt(s);
}

}  // namespace detail

/// Fourier multiplier (sum_j (2 - 2 cos k_j))^alpha of (-Delta)^alpha.
inline double symbol(std::span<const double> k, double alpha) {
    detail::check_alpha(alpha);
    double s = 0.0;
    for (double kj : k) {
        const double h = std::sin(0.5 * kj);
        s += 4.0 * h * h;
    }
    return std::pow(s, alpha);
}

/// Exact stencil value of -Delta at displacement z.
inline double laplacian_stencil(std::span<const int> z) {
    const auto l1 = detail::abs_l1(z);
    if (l1 == 0) return 2.0 * static_cast<double>(z.size());
    return l1 == 1 ? -1.0 : 0.0;
}

namespace detail {

// Integrates over k_level..k_{d-1} with the partial symbol sum carried in `base`.
inline KernelValue fourier_nested(std::span<const int> z, double alpha, std::size_t level, double base,
                                  const QuadSpec& spec) {
    const std::size_t d = z.size();
    const double zk = static_cast<double>(z[level]);
    QuadSpec inner = spec;
    inner.abs_tol = spec.abs_tol * 0.05 / std::numbers::pi;
    inner.rel_tol = spec.rel_tol * 0.05;
    double inner_err_max = 0.0;
    auto f = [&](double k) {
        const double h = std::sin(0.5 * k);
        const double s = base + 4.0 * h * h;
        const double c = std::cos(zk * k);
        if (level + 1 == d) return std::pow(s, alpha) * c;
        const auto r = fourier_nested(z, alpha, level + 1, s, inner);
        inner_err_max = std::max(inner_err_max, r.error);
        return r.value * c;
    };
    // Only the corner k = 0 with every earlier coordinate at 0 is non-smooth.
    EndpointHint hint;
    if (base == 0.0 && level + 1 == d) hint.left_exponent = 2.0 * alpha;
    const auto r = integrate_adaptive(f, 0.0, std::numbers::pi, spec, hint);
    return {r.value, r.error + std::numbers::pi * inner_err_max};
}

}  // namespace detail

/// (-Delta)^alpha(z, 0) from the Fourier representation; direct tensor quadrature, d <= 3.
inline KernelValue kernel_fourier(std::span<const int> z, double alpha, const QuadSpec& spec) {
    detail::check_alpha(alpha);
    if (z.empty() || z.size() > 3) throw PreconditionError("kernel_fourier: dimension must be 1, 2 or 3");
    if (alpha == 1.0) return {laplacian_stencil(z), 0.0};
    const double scale = std::pow(std::numbers::pi, -static_cast<double>(z.size()));
    QuadSpec s = spec;
    s.abs_tol = spec.abs_tol / scale;
    const auto r = detail::fourier_nested(z, alpha, 0, 0.0, s);
    return {r.value * scale, r.error * scale};
}

/// (-Delta)^alpha(z, 0) from heat-semigroup subordination, alpha in (0,1).
///
/// Uses the exponent -1-alpha with normalisation |Gamma(-alpha)|, the
/// convention under which the scalar identity
/// int_0^inf (1 - e^{-t lambda}) t^{-1-alpha} dt = |Gamma(-alpha)| lambda^alpha holds.
inline KernelValue kernel_subordination(std::span<const int> z, double alpha, const QuadSpec& spec) {
    detail::check_alpha(alpha, false);
    if (z.empty()) throw PreconditionError("kernel_subordination: empty displacement");
    const int d = static_cast<int>(z.size());
    const double norm = std::exp(log_gamma(-alpha).value);
    const auto l1 = detail::abs_l1(z);
    QuadSpec s = spec;
    s.abs_tol = spec.abs_tol * norm;
    if (l1 == 0) {
        auto f = [&](double t) { return std::pow(t, -1.0 - alpha) * heat_kernel_diagonal_defect(d, t); };
        s.tail_cutoff = 1.0;
        const auto r = integrate_adaptive(f, 0.0, INFINITY, s, EndpointHint{-alpha, 1.0 + alpha});
        return {r.value / norm, r.error / norm};
    }
    auto f = [&](double t) {
        double p = std::pow(t, -1.0 - alpha);
        for (int v : z) {
            p *= heat_kernel_1d(v, t);
            if (p == 0.0) break;
        }
        return p;
    };
    const double r2 = detail::norm2(z);
    s.tail_cutoff = std::max(1.0, 0.25 * r2 * r2);
    EndpointHint hint;
    hint.tail_decay = 1.0 + alpha + 0.5 * d;
    if (l1 <= 2) hint.left_exponent = static_cast<double>(l1) - 1.0 - alpha;
    const auto r = integrate_adaptive(f, 0.0, INFINITY, s, hint);
    return {-r.value / norm, r.error / norm};
}

/// K_{d,alpha} = 4^alpha Gamma(d/2 + alpha) / (pi^{d/2} |Gamma(-alpha)|), alpha in (0,1).
inline double lifshitz_constant(int dim, double alpha) {
    if (dim < 1) throw PreconditionError("lifshitz_constant: dim must be positive");
    detail::check_alpha(alpha, false);
    const double log_k = alpha * std::log(4.0) + log_gamma(0.5 * dim + alpha).value -
                         0.5 * dim * std::log(std::numbers::pi) - log_gamma(-alpha).value;
    return std::exp(log_k);
}

// ---------------------------------------------------------------------------
// Kernel tables
// ---------------------------------------------------------------------------

/// Stencil values (-Delta)^alpha(z, 0) for every |z|_inf <= radius.
///
/// Immutable after construction. Values are stored in lexicographic order of
/// z (first coordinate most significant), the same order as the cache file.
class KernelTable {
public:
    KernelTable(int dim, double alpha, int radius, KernelMethod method, double accuracy, std::vector<double> values)
        : dim_(dim), alpha_(alpha), radius_(radius), method_(method), accuracy_(accuracy),
          values_(std::move(values)) {
        if (dim_ < 1 || radius_ < 0) throw PreconditionError("KernelTable: bad shape");
        if (values_.size() != static_cast<std::size_t>(count(dim_, radius_)))
            throw PreconditionError("KernelTable: value count does not match (2R+1)^d");
    }

    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    int radius() const { return radius_; }
    KernelMethod method() const { return method_; }
    double accuracy() const { return accuracy_; }
    std::span<const double> values() const { return values_; }

    bool contains(std::span<const int> z) const {
        if (static_cast<int>(z.size()) != dim_) return false;
        return std::all_of(z.begin(), z.end(), [this](int v) { return std::abs(v) <= radius_; });
    }

    double at(std::span<const int> z) const {
        if (!contains(z)) throw PreconditionError("KernelTable: displacement outside table");
        return values_[index(z)];
    }

    std::size_t index(std::span<const int> z) const {
        std::size_t idx = 0;
        const std::size_t side = 2 * static_cast<std::size_t>(radius_) + 1;
        for (int v : z) idx = idx * side + static_cast<std::size_t>(v + radius_);
        return idx;
    }

    /// Displacement stored at flat position idx.
    std::vector<int> displacement(std::size_t idx) const {
        std::vector<int> z(dim_);
        const std::size_t side = 2 * static_cast<std::size_t>(radius_) + 1;
        for (int j = dim_ - 1; j >= 0; --j) {
            z[j] = static_cast<int>(idx % side) - radius_;
            idx /= side;
        }
        return z;
    }

    static std::int64_t count(int dim, int radius) {
        std::int64_t n = 1;
        for (int j = 0; j < dim; ++j) n *= 2 * static_cast<std::int64_t>(radius) + 1;
        return n;
    }

private:
    int dim_;
    double alpha_;
    int radius_;
    KernelMethod method_;
    double accuracy_;
    std::vector<double> values_;
};

namespace detail {

/// Representatives z_1 >= z_2 >= ... >= z_d >= 0 of the signed-permutation orbits.
inline std::vector<std::vector<int>> orbit_representatives(int dim, int radius) {
    std::vector<std::vector<int>> reps;
    std::vector<int> z(dim, 0);
    auto rec = [&](auto&& self, int level, int upper) -> void {
        if (level == dim) {
            reps.push_back(z);
            return;
        }
        for (int v = 0; v <= upper; ++v) {
            z[level] = v;
            self(self, level + 1, v);
        }
    };
    rec(rec, 0, radius);
    return reps;
}

/// Canonical representative of z: absolute values sorted descending.
inline std::vector<int> canonical(std::span<const int> z) {
    std::vector<int> c(z.size());
    std::transform(z.begin(), z.end(), c.begin(), [](int v) { return std::abs(v); });
    std::sort(c.begin(), c.end(), std::greater<>());
    return c;
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Kernel on [0, R]^d from the symbol sampled on an M^d grid (half grid by evenness).
inline std::vector<double> dft_window(int dim, double alpha, int radius, std::size_t m) {
    const std::size_t half = m / 2 + 1;
    const std::size_t out = static_cast<std::size_t>(radius) + 1;
    std::vector<double> sin2(half), weight(half), cosine(m);
    for (std::size_t k = 0; k < half; ++k) {
        const double h = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
        sin2[k] = 4.0 * h * h;
        weight[k] = (k == 0 || k == m / 2) ? 1.0 : 2.0;
    }
    for (std::size_t k = 0; k < m; ++k)
        cosine[k] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));

    // Sample the symbol on the half grid, last coordinate fastest.
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) total *= half;
    std::vector<double> data(total);
    std::vector<std::size_t> kidx(dim, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        double s = 0.0;
        for (int j = dim - 1; j >= 0; --j) {
            kidx[j] = rem % half;
            rem /= half;
            s += sin2[kidx[j]];
        }
        data[flat] = std::pow(s, alpha);
    }

    // Transform axis by axis from the last one; each pass shrinks that axis to R+1.
    std::vector<std::size_t> shape(dim, half);
    for (int axis = dim - 1; axis >= 0; --axis) {
        std::size_t outer = 1, inner = 1;
        for (int j = 0; j < axis; ++j) outer *= shape[j];
        for (int j = axis + 1; j < dim; ++j) inner *= shape[j];
        const std::size_t len = shape[axis];
        std::vector<double> next(outer * out * inner, 0.0);
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t z = 0; z < out; ++z) {
                double* dst = &next[(o * out + z) * inner];
                for (std::size_t k = 0; k < len; ++k) {
                    const double c = weight[k] * cosine[(k * z) % m];
                    const double* src = &data[(o * len + k) * inner];
                    for (std::size_t i = 0; i < inner; ++i) dst[i] += c * src[i];
                }
            }
        }
        data = std::move(next);
        shape[axis] = out;
    }
    const double norm = std::pow(static_cast<double>(m), -static_cast<double>(dim));
    for (double& v : data) v *= norm;
    return data;
}

inline std::size_t window_index(std::span<const int> z, int radius) {
    std::size_t idx = 0;
    for (int v : z) idx = idx * (static_cast<std::size_t>(radius) + 1) + static_cast<std::size_t>(std::abs(v));
    return idx;
}

}  // namespace detail

/// Builds a fully populated table over |z|_inf <= radius.
///
/// Quadrature methods evaluate one representative per signed-permutation
/// orbit, so the stored values are exactly symmetric. DFTGrid starts from
/// M = max(64, 16 radius) rounded up to a power of two and doubles M until the
/// largest change of any extrapolated value is below spec.abs_tol. threads = 0 uses all
/// cores; the result does not depend on it.
inline KernelTable kernel_table(int dim, double alpha, int radius, KernelMethod method, const QuadSpec& spec,
                                unsigned threads = 1) {
    detail::check_alpha(alpha);
    if (dim < 1) throw PreconditionError("kernel_table: dim must be positive");
    if (radius < 1) throw PreconditionError("kernel_table: radius must be >= 1");
    const auto n = KernelTable::count(dim, radius);
    if (n > 50'000'000) throw PreconditionError("kernel_table: table too large");
    std::vector<double> values(static_cast<std::size_t>(n));
    const std::size_t side = 2 * static_cast<std::size_t>(radius) + 1;
    auto displacement = [&](std::size_t idx) {
        std::vector<int> z(dim);
        for (int j = dim - 1; j >= 0; --j) {
            z[j] = static_cast<int>(idx % side) - radius;
            idx /= side;
        }
        return z;
    };

    if (alpha == 1.0) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = laplacian_stencil(displacement(i));
        return KernelTable(dim, alpha, radius, method, 0.0, std::move(values));
    }

    const auto reps = detail::orbit_representatives(dim, radius);
    std::vector<double> window;  // values on [0, R]^d, indexed by sorted representative
    double accuracy = 0.0;

    if (method == KernelMethod::DFTGrid) {
        const std::size_t half_cap = std::size_t{1} << 24;
        std::size_t m = detail::next_pow2(std::max<std::size_t>(64, 16 * static_cast<std::size_t>(radius)));
        auto grid_fits = [&](std::size_t mm) {
            double cells = std::pow(static_cast<double>(mm / 2 + 1), dim);
            return cells <= static_cast<double>(half_cap);
        };
        if (!grid_fits(m)) throw ConvergenceError("kernel_table: initial DFT grid exceeds the size cap", 0.0, INFINITY);
        // The grid value is exactly sum_j K(z + jM), whose leading error term
        // is c M^{-(d+2 alpha)}; one Richardson step removes it.
        const double gain = std::pow(2.0, dim + 2.0 * alpha) - 1.0;
        std::vector<double> raw = detail::dft_window(dim, alpha, radius, m);
        std::vector<double> prev;
        double change = INFINITY;
        while (true) {
            const std::size_t m2 = 2 * m;
            if (!grid_fits(m2))
                throw ConvergenceError("kernel_table: DFT aliasing did not converge before the grid cap", 0.0, change);
            std::vector<double> cur = detail::dft_window(dim, alpha, radius, m2);
            std::vector<double> extrap(cur.size());
            for (std::size_t i = 0; i < cur.size(); ++i) extrap[i] = cur[i] + (cur[i] - raw[i]) / gain;
            raw = std::move(cur);
            m = m2;
            if (!prev.empty()) {
                change = 0.0;
                for (std::size_t i = 0; i < extrap.size(); ++i)
                    change = std::max(change, std::abs(extrap[i] - prev[i]));
            }
            prev = std::move(extrap);
            if (change <= spec.abs_tol) break;
        }
        window = std::move(prev);
        accuracy = change;
        // Permutation symmetry of the raw grid values is a consistency check.
        for (std::size_t i = 0; i < window.size(); ++i) {
            std::vector<int> z(dim);
            std::size_t rem = i;
            for (int j = dim - 1; j >= 0; --j) {
                z[j] = static_cast<int>(rem % (radius + 1));
                rem /= (radius + 1);
            }
            const double rep_value = window[detail::window_index(detail::canonical(z), radius)];
            if (std::abs(window[i] - rep_value) > 1e3 * std::numeric_limits<double>::epsilon() *
                                                       std::max(1.0, std::abs(rep_value)) + accuracy)
                throw Error("kernel_table: DFT values violate permutation symmetry");
        }
    } else {
        std::vector<KernelValue> rep_values(reps.size());
        parallel_for(reps.size(), threads, [&](std::size_t i) {
            rep_values[i] = method == KernelMethod::Fourier ? kernel_fourier(reps[i], alpha, spec)
                                                            : kernel_subordination(reps[i], alpha, spec);
        });
        window.assign(static_cast<std::size_t>(std::pow(radius + 1, dim)), 0.0);
        for (std::size_t i = 0; i < reps.size(); ++i) {
            window[detail::window_index(reps[i], radius)] = rep_values[i].value;
            accuracy = std::max(accuracy, rep_values[i].error);
        }
    }

    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto z = displacement(i);
        values[i] = window[detail::window_index(detail::canonical(z), radius)];
    }
    return KernelTable(dim, alpha, radius, method, accuracy, std::move(values));
}

// ---------------------------------------------------------------------------
// Table invariants
// ---------------------------------------------------------------------------

struct TableViolation {
    std::vector<int> z;
    double value;
    std::string what;
};

/// Sign, symmetry and (for alpha = 1) stencil checks on a table.
inline std::vector<TableViolation> check_table_invariants(const KernelTable& t) {
    std::vector<TableViolation> out;
    const auto vals = t.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const auto z = t.displacement(i);
        const double v = vals[i];
        const bool origin = detail::abs_l1(z) == 0;
        if (!std::isfinite(v)) {
            out.push_back({z, v, "non-finite value"});
            continue;
        }
        if (t.alpha() == 1.0) {
            if (std::abs(v - laplacian_stencil(z)) > std::max(t.accuracy(), 1e-10))
                out.push_back({z, v, "differs from the nearest-neighbour stencil"});
        } else if (origin && !(v > 0.0)) {
            out.push_back({z, v, "diagonal value not positive"});
        } else if (!origin && !(v < 0.0)) {
            out.push_back({z, v, "off-diagonal value not negative"});
        }
        const auto c = detail::canonical(z);
        const double rep = t.at(c);
        if (v != rep && std::abs(v - rep) > t.accuracy())
            out.push_back({z, v, "breaks signed-permutation symmetry"});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decay profile
// ---------------------------------------------------------------------------

struct DecayEntry {
    double distance;  ///< Euclidean |z|
    double ratio;     ///< |z|^{d+2 alpha} * (-value(z))
    bool diagonal;    ///< along (n, ..., n) rather than (n, 0, ..., 0)
};

struct DecayProfile {
    std::vector<DecayEntry> entries;
    double k_limit = 0.0;
    double fitted_c = 0.0;
    double fitted_C = 0.0;
};

/// Ratios |z|^{d+2 alpha} (-(-Delta)^alpha(z,0)) along the axis and the diagonal.
inline DecayProfile decay_profile(const KernelTable& table) {
    if (table.alpha() >= 1.0) throw PreconditionError("decay_profile: alpha = 1 stencil has compact support");
    if (table.radius() < 8) throw PreconditionError("decay_profile: radius must be >= 8");
    const int d = table.dim();
    const double power = d + 2.0 * table.alpha();
    DecayProfile p;
    p.k_limit = lifshitz_constant(d, table.alpha());
    auto add = [&](const std::vector<int>& z, bool diag) {
        const double r = detail::norm2(z);
        p.entries.push_back({r, std::pow(r, power) * (-table.at(z)), diag});
    };
    for (int n = 1; n <= table.radius(); ++n) {
        std::vector<int> z(d, 0);
        z[0] = n;
        add(z, false);
    }
    if (d > 1) {
        for (int n = 1; n <= table.radius(); ++n) add(std::vector<int>(d, n), true);
    }
    p.fitted_c = INFINITY;
    p.fitted_C = -INFINITY;
    for (const auto& e : p.entries) {
        p.fitted_c = std::min(p.fitted_c, e.ratio);
        p.fitted_C = std::max(p.fitted_C, e.ratio);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Convention diagnostic
// ---------------------------------------------------------------------------

/// Nearest-neighbour value in d = 1 under both subordination conventions.
struct ConventionDiagnostic {
    double alpha;
    double fourier;        ///< reference value
    double exponent_alpha; ///< t^{-1-alpha},   1/|Gamma(-alpha)|
    double exponent_half;  ///< t^{-1-alpha/2}, 1/|Gamma(-alpha/2)|
};

inline ConventionDiagnostic subordination_convention_diagnostic(double alpha, const QuadSpec& spec) {
    detail::check_alpha(alpha, false);
    const std::array<int, 1> z{1};
    ConventionDiagnostic out{alpha, kernel_fourier(z, alpha, spec).value, kernel_subordination(z, alpha, spec).value,
                             0.0};
    const double half = 0.5 * alpha;
    out.exponent_half = kernel_subordination(z, half, spec).value;
    return out;
}

// ---------------------------------------------------------------------------
// Cache file
// ---------------------------------------------------------------------------

inline constexpr std::string_view kKernelFileMagic = "# fraclat-kernel v1";

/// Writes the table in the versioned text format. Extra metadata lines
/// (`# key=value`) are emitted after the required ones.
inline void write_kernel_table(std::ostream& os, const KernelTable& t,
                               const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    os << kKernelFileMagic << '\n';
    os << "# dim=" << t.dim() << '\n';
    os << "# alpha=" << format_real(t.alpha()) << '\n';
    os << "# radius=" << t.radius() << '\n';
    os << "# method=" << to_string(t.method()) << '\n';
    os << "# accuracy=" << format_real(t.accuracy()) << '\n';
    for (const auto& [k, v] : extra) os << "# " << k << '=' << v << '\n';
    for (int j = 1; j <= t.dim(); ++j) os << 'z' << j << ',';
    os << "value\n";
    const auto vals = t.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const auto z = t.displacement(i);
        for (int v : z) os << v << ',';
        os << format_real(vals[i]) << '\n';
    }
}

/// Reads a table written by write_kernel_table; rejects unknown versions.
inline KernelTable read_kernel_table(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("kernel file: empty");
    if (line != kKernelFileMagic) throw FormatError("kernel file: unsupported header '" + line + "'");
    std::map<std::string, std::string> meta;
    while (is.peek() == '#') {
        std::getline(is, line);
        const auto eq = line.find('=');
        if (line.size() < 3 || eq == std::string::npos) throw FormatError("kernel file: bad metadata '" + line + "'");
        meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
    }
    for (const char* key : {"dim", "alpha", "radius", "method", "accuracy"})
        if (!meta.count(key)) throw FormatError(std::string("kernel file: missing metadata ") + key);
    const int dim = static_cast<int>(parse_integer(meta["dim"]));
    const double alpha = parse_real(meta["alpha"]);
    const int radius = static_cast<int>(parse_integer(meta["radius"]));
    const auto method = kernel_method_from_string(meta["method"]);
    const double accuracy = parse_real(meta["accuracy"]);
    if (dim < 1 || radius < 0) throw FormatError("kernel file: bad shape");

    std::string expected_header;
    for (int j = 1; j <= dim; ++j) expected_header += "z" + std::to_string(j) + ",";
    expected_header += "value";
    if (!std::getline(is, line) || line != expected_header) throw FormatError("kernel file: bad column header");

    const auto n = KernelTable::count(dim, radius);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n));
    KernelTable shape(dim, alpha, radius, method, accuracy, std::vector<double>(static_cast<std::size_t>(n)));
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (static_cast<int>(fields.size()) != dim + 1) throw FormatError("kernel file: bad row '" + line + "'");
        const auto expect = shape.displacement(values.size());
        for (int j = 0; j < dim; ++j)
            if (parse_integer(fields[j]) != expect[j]) throw FormatError("kernel file: rows out of order");
        values.push_back(parse_real(fields[dim]));
        if (static_cast<std::int64_t>(values.size()) > n) throw FormatError("kernel file: too many rows");
    }
    if (static_cast<std::int64_t>(values.size()) != n) throw FormatError("kernel file: truncated");
    return KernelTable(dim, alpha, radius, method, accuracy, std::move(values));
}

}  // namespace fraclat
