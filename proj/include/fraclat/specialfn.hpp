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
 * @file specialfn.hpp
 * @brief Gamma, modified Bessel I_k, the 1D lattice heat kernel and an
 *        adaptive Gauss-Kronrod integrator.
 *
 * Everything here is a pure function of its arguments.
 *
 * Bessel strategy for the scaled value e^{-s} I_k(s):
 *   - s <= max(30, 2k):            power series, positive terms only;
 *   - s >= max(50, 2k^2):          Hankel expansion of order k;
 *   - otherwise:                   Hankel expansion of I_0 times the ratios
 *                                  I_n/I_{n-1} from backward recurrence.
 * The scaled form never builds e^{s}, so the heat kernel e^{-2t} I_k(2t) is
 * finite for arbitrarily large t.
 *
 * Endpoint singularities: a left endpoint behaving like (t-a)^p, p > -1, is
 * removed by t = a + (b-a) w^{1/(1+p)}; an infinite upper limit with decay
 * t^{-q}, q > 1, is mapped by t = c w^{-1/(q-1)}, which turns the pure power
 * into a constant in w. Both maps are exact changes of variables, so no
 * truncation error is introduced.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "fraclat/error.hpp"

namespace fraclat {

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

/// ln|Gamma(x)| with the sign of Gamma(x) kept separately (+1 or -1).
struct LogGamma {
    double value;
    int sign;
};

namespace detail {

/// sin(pi x) with exact zeros at the integers.
inline double sin_pi(double x) {
    const double n = std::round(2.0 * x);
    const double r = x - 0.5 * n;  // |r| <= 1/4
    const auto q = static_cast<std::int64_t>(n) & 3;
    const double pr = std::numbers::pi * r;
    double v = 0.0;
    switch (q) {
        case 0: v = std::sin(pr); break;
        case 1: v = std::cos(pr); break;
        case 2: v = -std::sin(pr); break;
        default: v = -std::cos(pr); break;
    }
    return v;
}

/// Stirling series for ln Gamma(x), x >= 10.
inline double log_gamma_stirling(double x) {
    // B_{2n} / (2n (2n-1))
    static constexpr std::array<double, 8> c = {
        1.0 / 12.0,           -1.0 / 360.0,       1.0 / 1260.0,       -1.0 / 1680.0,
        1.0 / 1188.0,         -691.0 / 360360.0,  1.0 / 156.0,        -3617.0 / 122400.0};
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = 0.0;
    double p = inv;
    for (double ck : c) {
        series += ck * p;
        p *= inv2;
    }
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

inline double log_gamma_positive(double x) {
    // Exact factorials for small integers.
    if (x == std::floor(x) && x <= 21.0) {
        double f = 1.0;
        for (int i = 2; i < static_cast<int>(x); ++i) f *= i;
        return std::log(f);
    }
    if (x >= 10.0) return log_gamma_stirling(x);
    double prod = 1.0;
    double y = x;
    while (y < 10.0) {
        prod *= y;
        y += 1.0;
    }
    return log_gamma_stirling(y) - std::log(prod);
}

}  // namespace detail

/// ln|Gamma(x)| and sign(Gamma(x)).
///
/// Throws DomainError at the poles x = 0, -1, -2, ...  Accuracy is about
/// 1e-15 absolute in the logarithm (hence relative in Gamma) for |x| <= 50.
inline LogGamma log_gamma(double x) {
    if (!std::isfinite(x)) throw DomainError("log_gamma: non-finite argument");
    if (x <= 0.0 && x == std::floor(x)) throw DomainError("log_gamma: pole at non-positive integer");
    if (x >= 0.5) return {detail::log_gamma_positive(x), 1};
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
    const double s = detail::sin_pi(x);
    const double value =
        std::log(std::numbers::pi) - std::log(std::abs(s)) - detail::log_gamma_positive(1.0 - x);
    return {value, s > 0.0 ? 1 : -1};
}

/// Gamma(x) as a signed double; overflows to +-inf for large arguments.
inline double gamma_fn(double x) {
    const auto lg = log_gamma(x);
    return lg.sign * std::exp(lg.value);
}

// ---------------------------------------------------------------------------
// Modified Bessel function I_k and the lattice heat kernel
// ---------------------------------------------------------------------------

namespace detail {

/// e^{-s} I_k(s) from the power series sum_j (s/2)^{k+2j} / (j! (k+j)!).
inline double bessel_i_scaled_series(int k, double s) {
    // Leading term (s/2)^k e^{-s} / k!, with e^{-s} spread over the product.
    double t0 = 1.0;
    if (k == 0) {
        t0 = std::exp(-s);
    } else {
        const double damp = std::exp(-s / k);
        for (int i = 1; i <= k; ++i) t0 *= (0.5 * s / i) * damp;
    }
    const double q = 0.25 * s * s;
    double term = t0;
    double sum = t0;
    for (int j = 1; j < 10000; ++j) {
        term *= q / (static_cast<double>(j) * (k + j));
        sum += term;
        if (term <= 1e-17 * sum && j > 0.5 * s) break;
    }
    return sum;
}

/// sqrt(2 pi s) e^{-s} I_k(s) from the Hankel expansion; valid for s >> k^2.
inline double bessel_i_hankel_normalized(int k, double s) {
    const double mu = 4.0 * static_cast<double>(k) * k;
    double term = 1.0;
    double sum = 1.0;
    double prev = 1.0;
    for (int j = 1; j < 200; ++j) {
        const double odd = 2.0 * j - 1.0;
        term *= -(mu - odd * odd) / (8.0 * j * s);
        if (std::abs(term) > std::abs(prev)) break;  // asymptotic series started to diverge
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        prev = term;
    }
    return sum;
}

inline double bessel_i_scaled_hankel(int k, double s) {
    return bessel_i_hankel_normalized(k, s) / std::sqrt(2.0 * std::numbers::pi * s);
}

/// I_k / I_0 as the product of ratios I_n/I_{n-1} from backward recurrence.
inline double bessel_i_ratio_to_zero(int k, double s) {
    const double kk = static_cast<double>(k);
    const int start = static_cast<int>(std::ceil(std::sqrt(kk * kk + 80.0 * s))) + 20;
    double r = 0.0;  // r_{start+1}
    double prod = 1.0;
    for (int n = start; n >= 1; --n) {
        r = 1.0 / (2.0 * n / s + r);
        if (n <= k) prod *= r;
    }
    return prod;
}

}  // namespace detail

/// Exponentially scaled modified Bessel function e^{-s} I_k(s), k >= 0, s >= 0.
inline double bessel_i_scaled(int k, double s) {
    if (k < 0) k = -k;  // I_{-k} = I_k for integer order
    if (!(s >= 0.0)) throw DomainError("bessel_i: argument must be non-negative");
    if (s == 0.0) return k == 0 ? 1.0 : 0.0;
    if (std::isinf(s)) return 0.0;
    const double kk = static_cast<double>(k);
    if (s <= std::max(30.0, 2.0 * kk)) return detail::bessel_i_scaled_series(k, s);
    if (s >= std::max(50.0, 2.0 * kk * kk)) return detail::bessel_i_scaled_hankel(k, s);
    return detail::bessel_i_scaled_hankel(0, s) * detail::bessel_i_ratio_to_zero(k, s);
}

/// Modified Bessel function of the first kind I_k(s), k >= 0, s >= 0.
///
/// Throws DomainError when the result overflows a double; use
/// bessel_i_scaled in that regime.
inline double bessel_i(int k, double s) {
    const double scaled = bessel_i_scaled(k, s);
    if (scaled == 0.0) return 0.0;
    const double log_value = std::log(scaled) + s;
    if (log_value > std::log(std::numeric_limits<double>::max()))
        throw DomainError("bessel_i: result overflows; use bessel_i_scaled");
    return std::exp(log_value);
}

/// Matrix element e^{t Delta_1}(k, 0) = e^{-2t} I_{|k|}(2t) of the 1D lattice heat semigroup.
inline double heat_kernel_1d(std::int64_t k, double t) {
    if (!(t >= 0.0)) throw DomainError("heat_kernel_1d: t must be non-negative");
    const auto order = static_cast<int>(k < 0 ? -k : k);
    return bessel_i_scaled(order, 2.0 * t);
}

/// 1 - (e^{-2t} I_0(2t))^d, without cancellation for small t.
inline double heat_kernel_diagonal_defect(int dim, double t) {
    if (t == 0.0) return 0.0;
    const double s = 2.0 * t;
    if (s < 1.0) {
        // I_0(s) - 1 summed directly.
        const double q = 0.25 * s * s;
        double term = 1.0;
        double i0m1 = 0.0;
        for (int j = 1; j < 40; ++j) {
            term *= q / (static_cast<double>(j) * j);
            i0m1 += term;
            if (term < 1e-18 * i0m1) break;
        }
        const double log_h = std::log1p(i0m1) - s;
        return -std::expm1(dim * log_h);
    }
    return 1.0 - std::pow(bessel_i_scaled(0, s), dim);
}

// ---------------------------------------------------------------------------
// Adaptive quadrature
// ---------------------------------------------------------------------------

/// Tolerances and limits shared by every integral evaluation.
struct QuadSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
    /// Split point between the finite part and the mapped tail of an improper integral.
    double tail_cutoff = 1.0;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw PreconditionError("QuadSpec: tolerances must be positive");
        if (max_subdivisions < 16) throw PreconditionError("QuadSpec: max_subdivisions must be >= 16");
        if (!(tail_cutoff > 0.0)) throw PreconditionError("QuadSpec: tail_cutoff must be positive");
    }
};

/// Caller-declared endpoint behaviour.
struct EndpointHint {
    /// f(t) ~ (t - a)^left_exponent near a; 0 means regular. Must exceed -1.
    double left_exponent = 0.0;
    /// f(t) ~ t^{-tail_decay} as t -> infinity; must exceed 1. 0 means "fast"
    /// (exponential or unknown) and maps with t = c / w.
    double tail_decay = 0.0;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    std::int64_t evaluations = 0;
};

/// Optional analytic tail: given the cutoff c, returns (value, error bound)
/// of the integral over [c, infinity).
using TailHook = std::function<std::pair<double, double>(double)>;

namespace detail {

struct GKEstimate {
    double value;
    double error;
};

// 21-point Kronrod extension of the 10-point Gauss rule.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600887612780, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class F>
GKEstimate gauss_kronrod_21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kWgk[10];
    double resg = 0.0;
    double resabs = std::abs(resk);
    std::array<double, 10> f1{}, f2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    const double ah = std::abs(half);
    resk *= half;
    resabs *= ah;
    resasc *= ah;
    double err = std::abs(resk - resg * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    if (!std::isfinite(resk)) throw DomainError("integrate_adaptive: integrand is not finite");
    return {resk, err};
}

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

/// Globally adaptive bisection on a finite interval.
template <class F>
QuadResult adaptive_finite(F& f, double a, double b, const QuadSpec& spec) {
    QuadResult out;
    if (a == b) return out;
    std::priority_queue<Segment> heap;
    const auto first = gauss_kronrod_21(f, a, b);
    heap.push({a, b, first.value, first.error});
    double total = first.value;
    double total_err = first.error;
    out.evaluations = 21;
    int intervals = 1;
    double frozen_err = 0.0;  // error of segments too narrow to split further
    while (true) {
        const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
        if (total_err <= target) break;
        if (heap.empty()) break;
        if (intervals >= spec.max_subdivisions) {
            throw ConvergenceError("integrate_adaptive: subdivision limit reached", total, total_err);
        }
        Segment s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > std::min(s.a, s.b) && mid < std::max(s.a, s.b)) ||
            std::abs(s.b - s.a) < 1e-14 * std::max(std::abs(s.a), std::abs(s.b))) {
            frozen_err += s.error;
            continue;
        }
        const auto left = gauss_kronrod_21(f, s.a, mid);
        const auto right = gauss_kronrod_21(f, mid, s.b);
        out.evaluations += 42;
        ++intervals;
        total += left.value + right.value - s.value;
        total_err += left.error + right.error - s.error;
        heap.push({s.a, mid, left.value, left.error});
        heap.push({mid, s.b, right.value, right.error});
    }
    // Re-sum in a fixed order to make the value independent of heap history.
    std::vector<Segment> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    double v = 0.0, e = frozen_err;
    for (const auto& s : segs) {
        v += s.value;
        e += s.error;
    }
    out.value = v;
    out.error = e;
    out.intervals = intervals;
    if (e > std::max(spec.abs_tol, spec.rel_tol * std::abs(v)))
        throw ConvergenceError("integrate_adaptive: roundoff limit reached before tolerance", v, e);
    return out;
}

}  // namespace detail

/// Adaptive 21-point Gauss-Kronrod integration of f over [a, b].
///
/// b may be +infinity. The reported error satisfies
/// error <= max(abs_tol, rel_tol |value|) or a ConvergenceError carrying the
/// last estimate and error bound is thrown.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, const QuadSpec& spec, const EndpointHint& hint = {},
                              const TailHook& tail = {}) {
    spec.validate();
    if (!(hint.left_exponent > -1.0)) throw PreconditionError("integrate_adaptive: left exponent must exceed -1");
    if (hint.tail_decay != 0.0 && !(hint.tail_decay > 1.0))
        throw PreconditionError("integrate_adaptive: tail decay exponent must exceed 1");
    if (!(b >= a)) throw PreconditionError("integrate_adaptive: requires a <= b");

    const bool infinite = std::isinf(b);
    const double split = infinite ? std::max(a, a + spec.tail_cutoff) : b;

    // Two pieces share the absolute budget.
    QuadSpec part = spec;
    if (infinite && split > a) part.abs_tol *= 0.5;

    QuadResult total;
    auto accumulate = [&total](const QuadResult& r) {
        total.value += r.value;
        total.error += r.error;
        total.intervals += r.intervals;
        total.evaluations += r.evaluations;
    };

    // Finite part [a, split].
    if (split > a) {
        if (hint.left_exponent != 0.0) {
            const double power = 1.0 / (1.0 + hint.left_exponent);
            const double width = split - a;
            auto g = [&](double w) {
                if (w <= 0.0) return 0.0;
                const double dt = width * power * std::pow(w, power - 1.0);
                return f(a + width * std::pow(w, power)) * dt;
            };
            accumulate(detail::adaptive_finite(g, 0.0, 1.0, part));
        } else {
            auto g = [&](double t) { return f(t); };
            accumulate(detail::adaptive_finite(g, a, split, part));
        }
    }

    if (infinite) {
        if (tail) {
            const auto [v, e] = tail(split);
            total.value += v;
            total.error += e;
        } else {
            const double q = hint.tail_decay == 0.0 ? 2.0 : hint.tail_decay;
            const double power = -1.0 / (q - 1.0);
            const double c = split;
            auto g = [&](double w) {
                if (w <= 0.0) return 0.0;
                const double t = c * std::pow(w, power);
                if (std::isinf(t)) return 0.0;
                const double dt = -c * power * std::pow(w, power - 1.0);
                return f(t) * dt;
            };
            accumulate(detail::adaptive_finite(g, 0.0, 1.0, part));
        }
    }

    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(total.value));
    if (total.error > target * (1.0 + 1e-12))
        throw ConvergenceError("integrate_adaptive: tolerance not met", total.value, total.error);
    return total;
}

}  // namespace fraclat
