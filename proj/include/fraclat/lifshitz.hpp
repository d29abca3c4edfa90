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
 * @file lifshitz.hpp
 * @brief Lifshitz-tail exponent fits and the Temple lower-bound chain.
 *
 * The tail fit regresses ln|ln N(E)| on ln E; near the bottom of the spectrum
 * the slope tends to -d/(2 alpha). Each energy is simulated on a box of
 * half-width L(E) = clamp(floor(beta E^{-1/(2 alpha)}), L_min, L_max).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fraclat/ids.hpp"
#include "fraclat/lattice.hpp"
#include "fraclat/spectral.hpp"

namespace fraclat {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope x; needs >= 4 points with
/// pairwise distinct x. slope_stderr uses the residual variance with n-2 dof.
inline LinearFit fit_exponent(std::span<const std::pair<double, double>> points) {
    if (points.size() < 4) throw PreconditionError("fit_exponent: need at least 4 points");
    std::vector<double> xs;
    for (const auto& [x, y] : points) {
        if (!std::isfinite(x) || !std::isfinite(y)) throw PreconditionError("fit_exponent: non-finite point");
        xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
        throw PreconditionError("fit_exponent: abscissae must be distinct");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) mx += x, my += y;
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (const auto& [x, y] : points) {
        const double r = y - f.intercept - f.slope * x;
        rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
    return f;
}

struct TailPoint {
    double energy = 0.0;
    int L = 0;
    double n_hat = 0.0;
    double std_error = 0.0;
    bool saturated = false;  ///< L(E) hit L_max
    bool used = false;       ///< entered the fit
};

struct LifshitzFit {
    std::vector<std::pair<double, double>> points;  ///< (ln E, ln|ln N|) of used energies
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double gamma_hat = 0.0;  ///< exp(intercept): N ~ exp(-gamma_hat E^{slope})
    double target = 0.0;     ///< -d / (2 alpha)
    double beta = 0.0;
    std::vector<TailPoint> scan;
    int excluded = 0;
    std::string warning;
};

struct TailWindow {
    double lower = 1e-6;  ///< points need lower < N < upper
    double upper = 0.5;
};

struct TailScanOptions {
    double beta = 1.0;
    int realizations = 100;
    BoundaryCondition bc = BoundaryCondition::Neumann;
    int L_min = 4;
    int L_max = 0;  ///< 0: largest L the site-count guard allows
    bool keep_saturated = false;
    TailWindow window;
    unsigned threads = 1;
};

namespace detail {

inline void check_descending(std::span<const double> energies) {
    if (energies.empty()) throw PreconditionError("tail_scan: empty energy grid");
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (!(energies[i] > 0.0) || !std::isfinite(energies[i]))
            throw PreconditionError("tail_scan: energies must be positive");
        if (i > 0 && !(energies[i] < energies[i - 1])) throw PreconditionError("tail_scan: energies must be descending");
    }
}

inline std::string describe_scan(const std::vector<TailPoint>& scan) {
    std::ostringstream os;
    os << "usable points below 4; per-energy N_hat:";
    for (const auto& p : scan) os << " E=" << p.energy << " L=" << p.L << " N=" << p.n_hat << (p.saturated ? " (saturated)" : "");
    return os.str();
}

/// Filters the scan, fits, and fills the derived fields.
inline LifshitzFit finish_fit(std::vector<TailPoint> scan, int dim, double alpha, double beta, const TailWindow& w,
                              bool keep_saturated) {
    LifshitzFit fit;
    fit.target = -dim / (2.0 * alpha);
    fit.beta = beta;
    for (auto& p : scan) {
        p.used = p.n_hat > w.lower && p.n_hat < w.upper && (keep_saturated || !p.saturated);
        if (p.used) fit.points.emplace_back(std::log(p.energy), std::log(std::abs(std::log(p.n_hat))));
        else ++fit.excluded;
    }
    fit.scan = std::move(scan);
    if (fit.points.size() < 4) throw ConvergenceError("tail_scan: " + describe_scan(fit.scan), 0.0, INFINITY);
    const LinearFit f = fit_exponent(fit.points);
    fit.slope = f.slope;
    fit.intercept = f.intercept;
    fit.slope_stderr = f.slope_stderr;
    fit.gamma_hat = std::exp(f.intercept);
    return fit;
}

}  // namespace detail

/// Largest L with (2L+1)^d within the site guard.
inline int max_box_radius(int dim) {
    int L = 0;
    while (std::pow(2.0 * (L + 1) + 1.0, dim) <= static_cast<double>(kMaxSites)) ++L;
    return L;
}

inline int tail_box_radius(double energy, double alpha, const TailScanOptions& opt, int dim, bool* saturated = nullptr) {
    const int cap = opt.L_max > 0 ? opt.L_max : max_box_radius(dim);
    const double raw = std::floor(opt.beta * std::pow(energy, -1.0 / (2.0 * alpha)));
    const int L = raw >= cap ? cap : std::max(opt.L_min, static_cast<int>(raw));
    if (saturated) *saturated = raw >= cap;
    return std::min(L, cap);
}

/// Simulated tail scan. `energies` must be descending; energies sharing a box
/// size reuse one set of decompositions.
inline LifshitzFit tail_scan(int dim, const KernelTable& kernel, const DisorderSpec& disorder,
                             std::span<const double> energies, const TailScanOptions& opt) {
    detail::check_descending(energies);
    if (!(opt.beta > 0.0)) throw PreconditionError("tail_scan: beta must be positive");
    if (opt.L_min < 0 || (opt.L_max > 0 && opt.L_max < opt.L_min))
        throw PreconditionError("tail_scan: need 0 <= L_min <= L_max");
    const double alpha = kernel.alpha();
    std::vector<TailPoint> scan(energies.size());
    std::map<int, std::vector<std::size_t>> by_L;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        scan[i].energy = energies[i];
        scan[i].L = tail_box_radius(energies[i], alpha, opt, dim, &scan[i].saturated);
        by_L[scan[i].L].push_back(i);
    }
    for (const auto& [L, idx] : by_L) {
        std::vector<double> e;
        for (auto it = idx.rbegin(); it != idx.rend(); ++it) e.push_back(energies[*it]);  // ascending
        const IDSCurve c = ids_counting_estimate({dim, L}, opt.bc, kernel, disorder, e, opt.realizations, opt.threads);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const std::size_t i = idx[idx.size() - 1 - k];
            scan[i].n_hat = c.n_hat[k];
            scan[i].std_error = c.std_error[k];
        }
    }
    LifshitzFit fit = detail::finish_fit(std::move(scan), dim, alpha, opt.beta, opt.window, opt.keep_saturated);
    if (!regularity_exponent(disorder))
        fit.warning = "disorder lacks the small-value regularity P(V < eps) >= C eps^kappa; only the upper bound applies";
    return fit;
}

/// Fit on an injected curve N(E) instead of a simulation; L is reported as 0.
inline LifshitzFit tail_scan_synthetic(int dim, double alpha, std::span<const double> energies,
                                       const std::function<double(double)>& n, double beta = 1.0,
                                       TailWindow window = {}) {
    detail::check_descending(energies);
    std::vector<TailPoint> scan(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) {
        scan[i].energy = energies[i];
        scan[i].n_hat = n(energies[i]);
    }
    return detail::finish_fit(std::move(scan), dim, alpha, beta, window, true);
}

// ---------------------------------------------------------------------------
// Temple chain
// ---------------------------------------------------------------------------

struct TempleReport {
    double tau = 0.0;          ///< E_1(-Delta^N_L)^alpha
    double mean_truncated = 0.0;
    double e0_truncated = 0.0;
    double e1_truncated = 0.0;
    double e0_full = 0.0;
    double temple = 0.0;
    // Margins, each >= 0 when the inequality holds.
    double a = 0.0;  ///< tau/3 - <psi, H~ psi>
    double b = 0.0;  ///< E_1(H~) - tau
    double c = 0.0;  ///< E_0(H~) - Temple bound
    double d = 0.0;  ///< E_0(H~) - mean(w~)/2
    double e = 0.0;  ///< E_0(H^N) - E_0(H~)
    double worst() const { return std::min({a, b, c, d, e}); }
    bool passed(double tol = 1e-9) const { return worst() >= -tol; }
};

/// One realization on the Neumann box [-L, L]^d: truncate the potential at
/// tau/3, and check the Temple estimate with the constant trial state.
inline TempleReport temple_experiment(int dim, int L, double alpha, const DisorderSpec& disorder,
                                      std::uint64_t realization) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionError("temple_experiment: alpha must lie in (0, 1]");
    if (L < 1) throw PreconditionError("temple_experiment: need L >= 1");
    const SiteSet set = box(dim, L);
    const SymMatrix lap = laplacian_restricted(set, BoundaryCondition::Neumann);
    TempleReport r;
    r.tau = std::pow(std::max(eigenvalues_sym(lap)(1), 0.0), alpha);
    const SymMatrix frac = matrix_power(lap, alpha);
    const auto v = sample_disorder(disorder, set, realization);
    std::vector<double> w(v.size()), wt(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        w[i] = disorder.coupling * v[i];
        wt[i] = std::min(w[i], r.tau / 3.0);
        r.mean_truncated += wt[i];
    }
    r.mean_truncated /= static_cast<double>(v.size());
    const SymMatrix ht = add_potential(frac, wt, 1.0);
    const Eigen::VectorXd psi =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(set.size()), 1.0 / std::sqrt(static_cast<double>(set.size())));
    const Eigen::VectorXd evt = eigenvalues_sym(ht);
    r.e0_truncated = evt(0);
    r.e1_truncated = evt(1);
    r.e0_full = eigenvalues_sym(add_potential(frac, w, 1.0))(0);
    r.a = r.tau / 3.0 - psi.dot(ht.dense() * psi);
    r.b = r.e1_truncated - r.tau;
    r.temple = temple_bound(ht, psi, std::min(r.tau, r.e1_truncated));
    r.c = r.e0_truncated - r.temple;
    r.d = r.e0_truncated - 0.5 * r.mean_truncated;
    r.e = r.e0_full - r.e0_truncated;
    return r;
}

}  // namespace fraclat
