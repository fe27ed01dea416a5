#include "amfg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "amfg/error.hpp"

namespace amfg::linalg {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double relative_asymmetry(const Matrix& m) {
  const double norm = m.norm();
  if (norm == 0.0) return 0.0;
  return (m - m.transpose()).norm() / norm;
}

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m),
                                            Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double spectral_radius_sym(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m),
                                            Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_psd(const Matrix& m, double rel_tol) {
  return min_eigenvalue(m) >= -rel_tol * spectral_radius_sym(m);
}

Matrix solve(const Matrix& m, const Matrix& rhs, std::string_view name,
             int step) {
  if (m.rows() != m.cols() || m.rows() != rhs.rows()) {
    throw NumericalError(std::string(name), step, "dimension mismatch");
  }
  const double min_rcond = 1.0 / kMaxCondition;
  if (relative_asymmetry(m) <= 1e-12) {
    Eigen::LLT<Matrix> llt(symmetrize(m));
    if (llt.info() == Eigen::Success && llt.rcond() >= min_rcond) {
      return llt.solve(rhs);
    }
  }
  Eigen::PartialPivLU<Matrix> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond >= min_rcond)) {
    throw NumericalError(std::string(name), step,
                         "matrix is singular (condition estimate " +
                             std::to_string(1.0 / rcond) + ")");
  }
  return lu.solve(rhs);
}

Matrix inverse(const Matrix& m, std::string_view name, int step) {
  return solve(m, Matrix::Identity(m.rows(), m.cols()), name, step);
}

Matrix covariance_factor(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(cov));
  const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal();
}

Matrix block_diagonal(const Matrix& a, const Matrix& b, const Matrix& c) {
  const auto rows = a.rows() + b.rows() + c.rows();
  const auto cols = a.cols() + b.cols() + c.cols();
  Matrix out = Matrix::Zero(rows, cols);
  out.block(0, 0, a.rows(), a.cols()) = a;
  out.block(a.rows(), a.cols(), b.rows(), b.cols()) = b;
  out.block(a.rows() + b.rows(), a.cols() + b.cols(), c.rows(), c.cols()) = c;
  return out;
}

template <typename Seq>
static double max_deviation_impl(const Seq& a, const Seq& b) {
  if (a.size() != b.size()) {
    throw Error("max_deviation: sequence lengths differ (" +
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                ")");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols()) {
      throw Error("max_deviation: shape mismatch at index " +
                  std::to_string(i));
    }
    worst = std::max(worst, (a[i] - b[i]).norm());
  }
  return worst;
}

double max_deviation(const MatrixSeq& a, const MatrixSeq& b) {
  return max_deviation_impl(a, b);
}

double max_deviation(const VectorSeq& a, const VectorSeq& b) {
  return max_deviation_impl(a, b);
}

}  // namespace amfg::linalg
