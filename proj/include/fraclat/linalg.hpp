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
 * @file linalg.hpp
 * @brief Dense symmetric matrices, the symmetric eigensolver and matrix powers.
 *
 * Eigen's SelfAdjointEigenSolver (Householder tridiagonalization + implicit
 * QL) does the factorization; this header adds the residual contract and the
 * PSD clamp used by the functional calculus.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fraclat/error.hpp"

namespace fraclat {

/// Dense real symmetric matrix. Every mutator writes both triangles.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : m_(Eigen::MatrixXd::Zero(n, n)) {}

    /// Takes a square matrix and stores (M + M^T)/2.
    static SymMatrix from_dense(const Eigen::MatrixXd& m) {
        if (m.rows() != m.cols()) throw PreconditionError("SymMatrix: matrix is not square");
        SymMatrix s;
        s.m_ = 0.5 * (m + m.transpose());
        return s;
    }

    std::size_t n() const { return static_cast<std::size_t>(m_.rows()); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    void set(std::size_t i, std::size_t j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }
    void add_diagonal(std::size_t i, double v) { m_(i, i) += v; }
    const Eigen::MatrixXd& dense() const { return m_; }

private:
    Eigen::MatrixXd m_;
};

inline SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    if (a.n() != b.n()) throw PreconditionError("SymMatrix: size mismatch");
    return SymMatrix::from_dense(a.dense() - b.dense());
}

inline SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    if (a.n() != b.n()) throw PreconditionError("SymMatrix: size mismatch");
    return SymMatrix::from_dense(a.dense() + b.dense());
}

struct EigDecomp {
    Eigen::VectorXd eigenvalues;  ///< ascending
    Eigen::MatrixXd basis;        ///< column j belongs to eigenvalue j
    double residual = 0.0;        ///< max_j |A v_j - lambda_j v_j|
};

namespace detail {

inline void require_finite(const SymMatrix& a, const char* who) {
    if (!a.dense().allFinite()) throw PreconditionError(std::string(who) + ": matrix has non-finite entries");
}

}  // namespace detail

inline EigDecomp eig_sym(const SymMatrix& a) {
    detail::require_finite(a, "eig_sym");
    EigDecomp out;
    if (a.n() == 0) return out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense(), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("eig_sym: iteration limit reached", 0.0, INFINITY);
    out.eigenvalues = solver.eigenvalues();
    out.basis = solver.eigenvectors();
    const Eigen::MatrixXd r = a.dense() * out.basis - out.basis * out.eigenvalues.asDiagonal();
    out.residual = r.colwise().norm().maxCoeff();
    return out;
}

/// Eigenvalues only, ascending. Much cheaper than eig_sym when no basis is needed.
inline Eigen::VectorXd eigenvalues_sym(const SymMatrix& a) {
    detail::require_finite(a, "eigenvalues_sym");
    if (a.n() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("eigenvalues_sym: iteration limit reached", 0.0, INFINITY);
    return solver.eigenvalues();
}

inline double min_eigenvalue(const SymMatrix& a) {
    const Eigen::VectorXd ev = eigenvalues_sym(a);
    return ev.size() == 0 ? 0.0 : ev(0);
}

/// Eigenvalues in [-kPsdClamp, 0) are treated as round-off and set to zero.
inline constexpr double kPsdClamp = 1e-8;

/// A^alpha for PSD A via the spectral decomposition, alpha > 0.
///
/// x^alpha has infinite slope at 0, so an exact zero eigenvalue computed as
/// 1e-16 would come back as 1e-8 (alpha = 1/2) or 1e-4 (alpha = 1/4).
/// Eigenvalues below the solver's round-off floor 8 n eps max|lambda| carry no
/// information and are mapped to exactly 0.
inline SymMatrix matrix_power(const SymMatrix& a, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw PreconditionError("matrix_power: alpha must be positive");
    if (alpha == 1.0) {
        detail::require_finite(a, "matrix_power");
        return a;
    }
    const EigDecomp e = eig_sym(a);
    if (e.eigenvalues.size() == 0) return a;
    if (e.eigenvalues(0) < -kPsdClamp)
        throw PreconditionError("matrix_power: matrix is not positive semidefinite (min eigenvalue " +
                                std::to_string(e.eigenvalues(0)) + ")");
    const double floor = 8.0 * static_cast<double>(a.n()) * std::numeric_limits<double>::epsilon() *
                         e.eigenvalues.cwiseAbs().maxCoeff();
    Eigen::VectorXd p(e.eigenvalues.size());
    for (Eigen::Index j = 0; j < p.size(); ++j)
        p(j) = e.eigenvalues(j) <= floor ? 0.0 : std::pow(e.eigenvalues(j), alpha);
    return SymMatrix::from_dense(e.basis * p.asDiagonal() * e.basis.transpose());
}

}  // namespace fraclat
