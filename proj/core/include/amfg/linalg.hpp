#pragma once

#include <string_view>

#include "amfg/types.hpp"

namespace amfg::linalg {

// Largest condition-number estimate accepted by `solve`.
inline constexpr double kMaxCondition = 1e12;

Matrix symmetrize(const Matrix& m);

// ||M - M^T||_F / ||M||_F, zero for the zero matrix.
double relative_asymmetry(const Matrix& m);

// Eigenvalues of the symmetric part.
double min_eigenvalue(const Matrix& m);
double spectral_radius_sym(const Matrix& m);

bool is_psd(const Matrix& m, double rel_tol);

// Solves M X = rhs. Uses a Cholesky factorization when M is symmetric positive
// definite and a partially pivoted LU otherwise. Throws NumericalError tagged
// with `name` and `step` when the reciprocal condition estimate drops below
// 1 / kMaxCondition.
Matrix solve(const Matrix& m, const Matrix& rhs, std::string_view name,
             int step);

Matrix inverse(const Matrix& m, std::string_view name, int step);

// Returns L with L L^T = cov for a symmetric PSD covariance (eigen-based, so
// singular and zero covariances are fine).
Matrix covariance_factor(const Matrix& cov);

Matrix block_diagonal(const Matrix& a, const Matrix& b, const Matrix& c);

// max over t of ||a_t - b_t||_F.
double max_deviation(const MatrixSeq& a, const MatrixSeq& b);
double max_deviation(const VectorSeq& a, const VectorSeq& b);

}  // namespace amfg::linalg
