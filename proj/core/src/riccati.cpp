#include "amfg/riccati.hpp"

#include <cmath>
#include <limits>

#include "amfg/error.hpp"
#include "amfg/linalg.hpp"

namespace amfg {

Matrix coupling_matrix(const GameSpec& spec, int t) {
  const auto i = static_cast<std::size_t>(t);
  const Matrix Rinv_Bt = linalg::solve(spec.R[i], spec.B.transpose(), "R", t);
  const Matrix Sinv_Ct = linalg::solve(spec.S[i], spec.C.transpose(), "S", t);
  return linalg::symmetrize(spec.B * Rinv_Bt - spec.C * Sinv_Ct);
}

ValidityReport evaluate_validity(const GameSpec& spec) {
  const int T = spec.T();
  ValidityReport report;
  auto& ric = report.riccati;
  ric.P_hat.assign(static_cast<std::size_t>(T + 1), Matrix());
  ric.margins.assign(static_cast<std::size_t>(T),
                     std::numeric_limits<double>::quiet_NaN());
  ric.P_hat[T] = spec.Q[T];

  const Matrix& A = spec.A;
  const Matrix& C = spec.C;
  for (int t = T - 1; t >= 0; --t) {
    const auto i = static_cast<std::size_t>(t);
    const Matrix& next = ric.P_hat[i + 1];
    const Matrix gap = linalg::symmetrize(spec.S[i] - C.transpose() * next * C);
    const double margin = linalg::min_eigenvalue(gap);
    ric.margins[i] = margin;
    if (!(margin > kValidityThreshold)) {
      report.failed_step = t;
      report.failed_margin = margin;
      return report;
    }
    const Matrix CtPA = C.transpose() * next * A;
    const Matrix worst = linalg::solve(gap, CtPA, "S - C^T P_hat C", t);
    ric.P_hat[i] = linalg::symmetrize(spec.Q[i] + A.transpose() * next * A +
                                      CtPA.transpose() * worst);
  }
  return report;
}

ValidationRiccati solve_validation_riccati(const GameSpec& spec) {
  ValidityReport report = evaluate_validity(spec);
  if (!report.valid()) {
    throw ValidityConditionError(*report.failed_step, report.failed_margin);
  }
  return std::move(report.riccati);
}

GlobalRiccati solve_global_riccati(const GameSpec& spec) {
  const int T = spec.T();
  const int z = spec.z();
  const auto n = static_cast<std::size_t>(T);
  GlobalRiccati g;
  g.P_bar.assign(n + 1, Matrix());
  g.E.assign(n, Matrix());
  g.F_bar.assign(n, Matrix());
  g.P_bar[n] = spec.Q[n];

  const Matrix I = Matrix::Identity(z, z);
  for (int t = T - 1; t >= 0; --t) {
    const auto i = static_cast<std::size_t>(t);
    const Matrix& next = g.P_bar[i + 1];
    g.E[i] = I + coupling_matrix(spec, t) * next;
    g.F_bar[i] = linalg::solve(g.E[i], spec.A, "E", t);
    g.P_bar[i] =
        linalg::symmetrize(spec.A.transpose() * next * g.F_bar[i] + spec.Q[i]);
  }
  return g;
}

LocalRiccati solve_local_riccati(const GameSpec& spec) {
  const int T = spec.T();
  const int z = spec.z();
  const auto n = static_cast<std::size_t>(T);
  LocalRiccati l;
  l.P_tilde.assign(n + 1, Matrix());
  l.E_tilde.assign(n, Matrix());
  l.H_tilde.assign(n, Matrix());
  l.F1_tilde.assign(n, Matrix());
  l.P_tilde[n] = linalg::symmetrize(spec.Q[n] + spec.Qbar[n]);

  const Matrix I = Matrix::Identity(z, z);
  for (int t = T - 1; t >= 0; --t) {
    const auto i = static_cast<std::size_t>(t);
    const Matrix& next = l.P_tilde[i + 1];
    const Matrix M = coupling_matrix(spec, t);
    l.E_tilde[i] = I + M * next;
    l.F1_tilde[i] = linalg::solve(l.E_tilde[i], spec.A, "E_tilde", t);
    const Matrix Einv_M = linalg::solve(l.E_tilde[i], M, "E_tilde", t);
    l.H_tilde[i] = spec.A.transpose() * (I - next * Einv_M);
    l.P_tilde[i] = linalg::symmetrize(spec.A.transpose() * next * l.F1_tilde[i] +
                                      spec.Q[i] + spec.Qbar[i]);
  }
  return l;
}

Matrix adversary_gain(const GameSpec& spec, const GlobalRiccati& global,
                      int t) {
  const auto i = static_cast<std::size_t>(t);
  const Matrix rhs = spec.C.transpose() * global.P_bar[i + 1] * global.F_bar[i];
  return linalg::solve(spec.S[i], rhs, "S", t);
}

Matrix adversary_feedthrough(const GameSpec& spec, const GlobalRiccati& global,
                             int t) {
  return spec.C * adversary_gain(spec, global, t);
}

AugmentedSystem build_augmented_system(const GameSpec& spec,
                                       const GlobalRiccati& global,
                                       const LocalRiccati& local,
                                       const MatrixSeq& F2_tilde) {
  const int T = spec.T();
  const int z = spec.z();
  const auto n = static_cast<std::size_t>(T);
  if (global.F_bar.size() != n || local.F1_tilde.size() != n ||
      F2_tilde.size() != n) {
    throw Error("build_augmented_system: inputs cover different horizons");
  }

  AugmentedSystem aug;
  aug.block = z;
  aug.B_aug = Matrix::Zero(3 * z, spec.u());
  aug.B_aug.topRows(z) = spec.B;

  const double m = spec.neighborhood_size;
  const Matrix local_noise = spec.Sigma_w / m;
  for (int t = 0; t < T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    Matrix A_aug = Matrix::Zero(3 * z, 3 * z);
    A_aug.block(0, 0, z, z) = spec.A;
    A_aug.block(0, 2 * z, z, z) = adversary_feedthrough(spec, global, t);
    A_aug.block(z, z, z, z) = local.F1_tilde[i];
    A_aug.block(z, 2 * z, z, z) = F2_tilde[i];
    A_aug.block(2 * z, 2 * z, z, z) = global.F_bar[i];
    aug.A_aug.push_back(std::move(A_aug));

    const Matrix Einv = linalg::inverse(local.E_tilde[i], "E_tilde", t);
    aug.Sigma_w_aug.push_back(linalg::block_diagonal(
        spec.Sigma_w, linalg::symmetrize(Einv * local_noise * Einv.transpose()),
        Matrix::Zero(z, z)));
  }

  for (int t = 0; t <= T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    const Matrix& Q = spec.Q[i];
    const Matrix& Qb = spec.Qbar[i];
    const Matrix& Qt = spec.Qtilde[i];
    Matrix W = Matrix::Zero(3 * z, 3 * z);
    W.block(0, 0, z, z) = Q + Qb + Qt;
    W.block(0, z, z, z) = -Qt;
    W.block(z, 0, z, z) = -Qt;
    W.block(0, 2 * z, z, z) = -Qb;
    W.block(2 * z, 0, z, z) = -Qb;
    W.block(z, z, z, z) = Qt;
    W.block(2 * z, 2 * z, z, z) = Qb;
    aug.Q_aug.push_back(std::move(W));
  }
  return aug;
}

AgentLqr solve_agent_lqr(const AugmentedSystem& aug, const MatrixSeq& R) {
  const auto n = aug.A_aug.size();
  if (R.size() != n || aug.Q_aug.size() != n + 1) {
    throw Error("solve_agent_lqr: inconsistent horizon");
  }
  AgentLqr lqr;
  lqr.P_star.assign(n + 1, Matrix());
  lqr.K.assign(n, Matrix());
  lqr.P_star[n] = aug.Q_aug[n];

  const Matrix& B = aug.B_aug;
  for (auto i = static_cast<long>(n) - 1; i >= 0; --i) {
    const auto t = static_cast<std::size_t>(i);
    const Matrix& next = lqr.P_star[t + 1];
    const Matrix& A = aug.A_aug[t];
    const Matrix H = linalg::symmetrize(R[t] + B.transpose() * next * B);
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("R + B^T P* B", static_cast<int>(i),
                           "not positive definite");
    }
    lqr.K[t] = llt.solve(B.transpose() * next * A);
    const Matrix closed = A - B * lqr.K[t];
    lqr.P_star[t] = linalg::symmetrize(aug.Q_aug[t] +
                                       lqr.K[t].transpose() * R[t] * lqr.K[t] +
                                       closed.transpose() * next * closed);
  }
  return lqr;
}

}  // namespace amfg
