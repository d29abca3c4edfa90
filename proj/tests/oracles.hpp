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

// Test-only reference values. Nothing here calls the code paths it is used
// to check, apart from the scalar gamma function.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "fraclat/specialfn.hpp"

namespace fraclat::oracle {

/// Closed-form 1D kernel (-1)^n Gamma(2a+1) / (Gamma(1+a+n) Gamma(1+a-n)), 0 < a < 1.
inline double kernel_1d_closed_form(long n, double alpha) {
    n = std::abs(n);
    const auto num = log_gamma(2.0 * alpha + 1.0);
    const auto d1 = log_gamma(1.0 + alpha + n);
    const auto d2 = log_gamma(1.0 + alpha - n);
    const int sign = (n % 2 == 0 ? 1 : -1) * num.sign * d1.sign * d2.sign;
    return sign * std::exp(num.value - d1.value - d2.value);
}

/// Exact free 1D IDS of -Delta: (1/pi) arccos(1 - E/2) on [0, 4].
inline double free_ids_1d(double e) {
    if (e <= 0.0) return 0.0;
    if (e >= 4.0) return 1.0;
    return std::acos(1.0 - 0.5 * e) / std::numbers::pi;
}

/// Eigenvalues 2 - 2 cos(pi j / n), j = 0..n-1, of the Neumann path on n sites.
inline std::vector<double> neumann_path_spectrum(int n) {
    std::vector<double> ev(n);
    for (int j = 0; j < n; ++j) ev[j] = 2.0 - 2.0 * std::cos(std::numbers::pi * j / n);
    return ev;
}

/// Eigenvalues 2 - 2 cos(pi j / (n+1)), j = 1..n, of the free path restriction on n sites.
inline std::vector<double> free_path_spectrum(int n) {
    std::vector<double> ev(n);
    for (int j = 1; j <= n; ++j) ev[j - 1] = 2.0 - 2.0 * std::cos(std::numbers::pi * j / (n + 1));
    return ev;
}

/// Direct pair sum over k in [-L,L]^d, m in [-M,M]^d outside [-L,L]^d of |k-m|^{-(d+2a)}, d in {1,2}.
inline double boundary_pair_sum(int d, double alpha, int L, int M) {
    const double p = d + 2.0 * alpha;
    double s = 0.0;
    if (d == 1) {
        for (int k = -L; k <= L; ++k)
            for (int m = -M; m <= M; ++m)
                if (std::abs(m) > L) s += std::pow(std::abs(k - m), -p);
        return s;
    }
    for (int k1 = -L; k1 <= L; ++k1)
        for (int k2 = -L; k2 <= L; ++k2)
            for (int m1 = -M; m1 <= M; ++m1)
                for (int m2 = -M; m2 <= M; ++m2) {
                    if (std::abs(m1) <= L && std::abs(m2) <= L) continue;
                    const double dx = k1 - m1, dy = k2 - m2;
                    s += std::pow(dx * dx + dy * dy, -0.5 * p);
                }
    return s;
}

}  // namespace fraclat::oracle
