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
 * @file continuum.hpp
 * @brief The continuous fractional Laplacian on R^d (d = 1, 2) applied to
 *        rapidly decaying test functions, and its |x|^{-(d+2 alpha)} tail.
 *
 * With p = d + 2 alpha and split radius r,
 *
 *   (-Delta)^alpha phi(x) / K = 1/2 int_{|h|<r} (2 phi(x) - phi(x+h) - phi(x-h)) |h|^{-p} dh
 *                              + phi(x) |S^{d-1}| r^{-2 alpha} / (2 alpha)
 *                              - int_{|h|>r} phi(x+h) |h|^{-p} dh.
 *
 * The symmetrized inner integrand is O(|h|^{2-p}), so the principal value
 * needs no limit. Below |h| = kTaylorRadius the second difference is replaced
 * by its Taylor term -h^T (D^2 phi) h, whose angular mean is the Laplacian.
 * The last integral only runs over |x+h| <= R, where R comes from the test
 * function's tail-mass certificate.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fraclat/error.hpp"
#include "fraclat/kernel.hpp"
#include "fraclat/specialfn.hpp"

namespace fraclat {

struct TestFunction {
    std::string name;
    int dim = 1;
    std::function<double(std::span<const double>)> value;
    std::function<double(std::span<const double>)> laplacian;
    double integral = 0.0;
    /// Upper bound on int_{|y| > R} |phi(y)| dy.
    std::function<double(double)> tail_mass;
};

namespace detail {

inline double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

/// e^{-a |x|^2} on R^d.
inline TestFunction gaussian_with(int dim, double a, std::string name) {
    if (dim != 1 && dim != 2) throw PreconditionError("test function: dim must be 1 or 2");
    TestFunction f;
    f.name = std::move(name);
    f.dim = dim;
    f.value = [a](std::span<const double> x) { return std::exp(-a * norm2(x)); };
    f.laplacian = [a, dim](std::span<const double> x) {
        const double r2 = norm2(x);
        return (4.0 * a * a * r2 - 2.0 * a * dim) * std::exp(-a * r2);
    };
    f.integral = std::pow(std::numbers::pi / a, 0.5 * dim);
    f.tail_mass = [a, dim](double R) {
        if (R <= 0.0) return std::pow(std::numbers::pi / a, 0.5 * dim);
        return dim == 1 ? std::sqrt(std::numbers::pi / a) * std::erfc(std::sqrt(a) * R)
                        : std::numbers::pi / a * std::exp(-a * R * R);
    };
    return f;
}

}  // namespace detail

/// e^{-|x|^2/2}, integral (2 pi)^{d/2}.
inline TestFunction gaussian(int dim) { return detail::gaussian_with(dim, 0.5, "gaussian"); }

/// e^{-|x|^2}, integral pi^{d/2}.
inline TestFunction gaussian_narrow(int dim) { return detail::gaussian_with(dim, 1.0, "gaussian_narrow"); }

inline TestFunction zero_function(int dim) {
    TestFunction f;
    f.name = "zero";
    f.dim = dim;
    f.value = [](std::span<const double>) { return 0.0; };
    f.laplacian = [](std::span<const double>) { return 0.0; };
    f.tail_mass = [](double) { return 0.0; };
    return f;
}

/// x -> phi(x / s).
inline TestFunction scaled(const TestFunction& phi, double s) {
    if (!(s > 0.0)) throw PreconditionError("scaled: s must be positive");
    TestFunction f;
    f.name = phi.name + "_scaled";
    f.dim = phi.dim;
    auto shrink = [s](std::span<const double> x) {
        std::array<double, 2> y{};
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / s;
        return y;
    };
    f.value = [phi, shrink](std::span<const double> x) {
        const auto y = shrink(x);
        return phi.value(std::span<const double>(y.data(), x.size()));
    };
    f.laplacian = [phi, shrink, s](std::span<const double> x) {
        const auto y = shrink(x);
        return phi.laplacian(std::span<const double>(y.data(), x.size())) / (s * s);
    };
    f.integral = std::pow(s, phi.dim) * phi.integral;
    f.tail_mass = [phi, s](double R) { return std::pow(s, phi.dim) * phi.tail_mass(R / s); };
    return f;
}

/// a phi + b psi.
inline TestFunction combine(double a, const TestFunction& phi, double b, const TestFunction& psi) {
    if (phi.dim != psi.dim) throw PreconditionError("combine: dimension mismatch");
    TestFunction f;
    f.name = "combination";
    f.dim = phi.dim;
    f.value = [=](std::span<const double> x) { return a * phi.value(x) + b * psi.value(x); };
    f.laplacian = [=](std::span<const double> x) { return a * phi.laplacian(x) + b * psi.laplacian(x); };
    f.integral = a * phi.integral + b * psi.integral;
    f.tail_mass = [=](double R) { return std::abs(a) * phi.tail_mass(R) + std::abs(b) * psi.tail_mass(R); };
    return f;
}

inline constexpr double kTaylorRadius = 1e-4;

namespace detail {

/// Smallest R (doubling from 1) with tail_mass(R) <= budget.
inline double support_radius(const TestFunction& phi, double budget) {
    double R = 1.0;
    while (phi.tail_mass(R) > budget) {
        R *= 2.0;
        if (R > 1e6) throw PreconditionError("test function: tail-mass certificate never drops below tolerance");
    }
    return R;
}

inline QuadSpec inner_spec(const QuadSpec& s, double scale) {
    QuadSpec q = s;
    q.abs_tol = s.abs_tol * scale;
    return q;
}

}  // namespace detail

/// (-Delta)^alpha phi at x; see the file comment for the decomposition.
inline double frac_lap_continuum(const TestFunction& phi, std::span<const double> x, double alpha,
                                 const QuadSpec& spec, double split_radius = 1.0) {
    const int d = phi.dim;
    if (d != 1 && d != 2) throw PreconditionError("frac_lap_continuum: dim must be 1 or 2");
    if (static_cast<int>(x.size()) != d) throw PreconditionError("frac_lap_continuum: point has wrong dimension");
    if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("frac_lap_continuum: alpha must lie in (0, 1)");
    if (!(split_radius > kTaylorRadius)) throw PreconditionError("frac_lap_continuum: split radius too small");
    spec.validate();
    const double r = split_radius;
    const double p = d + 2.0 * alpha;
    const double k = lifshitz_constant(d, alpha);
    const double fx = phi.value(x);
    const double lap = phi.laplacian(x);
    const double sphere = d == 1 ? 2.0 : 2.0 * std::numbers::pi;
    const double rho0 = kTaylorRadius;

    // Taylor piece on |h| < rho0: 1/2 int -h^T H h |h|^{-p} = -(sphere/(2d)) lap rho0^{2-2a}/(2-2a).
    const double taylor = -(sphere / (2.0 * d)) * lap * std::pow(rho0, 2.0 - 2.0 * alpha) / (2.0 - 2.0 * alpha);
    const double far_shell = fx * sphere * std::pow(r, -2.0 * alpha) / (2.0 * alpha);

    std::array<double, 2> y{};
    auto at = [&](double h0, double h1) {
        y[0] = x[0] + h0;
        if (d == 2) y[1] = x[1] + h1;
        return phi.value(std::span<const double>(y.data(), d));
    };

    const double R = detail::support_radius(phi, 0.1 * spec.abs_tol * std::pow(r, p));
    const double xnorm = std::sqrt(detail::norm2(x));
    double inner = 0.0, outer = 0.0;

    if (d == 1) {
        auto second = [&](double h) { return (2.0 * fx - at(h, 0) - at(-h, 0)) * std::pow(h, -p); };
        inner = integrate_adaptive(second, rho0, r, spec).value;
        // h > r with |x + h| <= R, and h > r with |x - h| <= R (the h < 0 half, mirrored).
        auto piece = [&](double sign, double lo, double hi) {
            lo = std::max(lo, r);
            if (!(hi > lo)) return 0.0;
            return integrate_adaptive([&](double h) { return at(sign * h, 0) * std::pow(h, -p); }, lo, hi,
                                      detail::inner_spec(spec, 0.5))
                .value;
        };
        outer = piece(1.0, -x[0] - R, -x[0] + R) + piece(-1.0, x[0] - R, x[0] + R);
    } else {
        // Angular mean over a half circle suffices by the h -> -h symmetry.
        auto ring = [&](double rho) {
            auto f = [&](double t) {
                const double c = std::cos(t), s = std::sin(t);
                return 2.0 * fx - at(rho * c, rho * s) - at(-rho * c, -rho * s);
            };
            return integrate_adaptive(f, 0.0, std::numbers::pi, detail::inner_spec(spec, 0.1)).value *
                   std::pow(rho, 1.0 - p);
        };
        inner = integrate_adaptive(ring, rho0, r, spec).value;
        // Outer: polar around x; on the circle |h| = rho only the arc with
        // |x + h| <= R contributes, centred on the direction of -x.
        const double lo = std::max(r, xnorm - R), hi = xnorm + R;
        if (hi > lo) {
            const double centre = xnorm > 0.0 ? std::atan2(-x[1], -x[0]) : 0.0;
            auto arc = [&](double rho) {
                double half = std::numbers::pi;
                if (xnorm > 0.0) {
                    const double c = (rho * rho + xnorm * xnorm - R * R) / (2.0 * rho * xnorm);
                    if (c >= 1.0) return 0.0;
                    if (c > -1.0) half = std::acos(c);
                }
                auto f = [&](double t) { return at(rho * std::cos(centre + t), rho * std::sin(centre + t)); };
                const auto q = detail::inner_spec(spec, 0.1);
                const double v = integrate_adaptive(f, -half, 0.0, q).value + integrate_adaptive(f, 0.0, half, q).value;
                return v * std::pow(rho, 1.0 - p);
            };
            outer = integrate_adaptive(arc, lo, hi, spec).value;
        }
    }
    return k * (taylor + inner + far_shell - outer);
}

struct TailLimit {
    std::vector<double> X;
    std::vector<double> values;
    std::vector<double> ratios;  ///< |x|^{d+2a} value / (-K integral)
    double limit = 0.0;          ///< -K integral
    bool last_within_10_percent() const { return !ratios.empty() && std::abs(ratios.back() - 1.0) <= 0.1; }
    bool last_closer_than_first() const {
        return ratios.size() >= 2 && std::abs(ratios.back() - 1.0) < std::abs(ratios.front() - 1.0);
    }
    bool strictly_increasing() const {
        for (std::size_t i = 0; i + 1 < ratios.size(); ++i)
            if (!(ratios[i + 1] > ratios[i])) return false;
        return true;
    }
};

/// Evaluates at x = |x| e_1 for each |x| in X (ascending, max <= 100).
inline TailLimit tail_limit_check(const TestFunction& phi, double alpha, const std::vector<double>& X,
                                  const QuadSpec& spec) {
    if (X.empty()) throw PreconditionError("tail_limit_check: empty X");
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (!(X[i] > 0.0)) throw PreconditionError("tail_limit_check: |x| must be positive");
        if (i > 0 && !(X[i] > X[i - 1])) throw PreconditionError("tail_limit_check: X must be ascending");
    }
    if (X.back() > 100.0) throw PreconditionError("tail_limit_check: |x| above 100");
    if (phi.integral == 0.0) throw PreconditionError("tail_limit_check: test function integrates to 0");
    TailLimit out;
    out.X = X;
    out.limit = -lifshitz_constant(phi.dim, alpha) * phi.integral;
    for (double s : X) {
        std::array<double, 2> x{s, 0.0};
        const double v = frac_lap_continuum(phi, std::span<const double>(x.data(), phi.dim), alpha, spec);
        out.values.push_back(v);
        out.ratios.push_back(std::pow(s, phi.dim + 2.0 * alpha) * v / out.limit);
    }
    return out;
}

}  // namespace fraclat
