#include "amfg/equilibrium.hpp"

#include <string>

#include "amfg/error.hpp"

namespace amfg {

Equilibrium solve_equilibrium(const GameSpec& spec) {
  Equilibrium eq;
  auto& sol = eq.solution;
  auto& traj = eq.trajectories;

  sol.validity = solve_validation_riccati(spec);
  sol.global = solve_global_riccati(spec);
  sol.local = solve_local_riccati(spec);

  traj.Z_bar = propagate_global_mf(sol.global.F_bar, spec.mu_0);
  traj.V_star = adversary_policy(spec, sol.global, traj.Z_bar);

  MeanCostates costates = mean_costates(spec, sol.global, traj.Z_bar);
  traj.zeta_bar = std::move(costates.zeta_bar);
  traj.zeta0_bar = std::move(costates.zeta0_bar);
  traj.s_bar = std::move(costates.s_bar);

  LocalOffsets offsets =
      compute_local_offsets(spec, sol.global, sol.local, traj.Z_bar);
  traj.s_tilde = std::move(offsets.s_tilde);
  traj.local_drift = std::move(offsets.drift);
  traj.F2_tilde = std::move(offsets.F2_tilde);

  sol.augmented =
      build_augmented_system(spec, sol.global, sol.local, traj.F2_tilde);
  sol.agent = solve_agent_lqr(sol.augmented, spec.R);
  return eq;
}

VectorSeq mean_agent_controls(const MatrixSeq& K, const VectorSeq& Z_bar) {
  VectorSeq U;
  U.reserve(K.size());
  for (std::size_t t = 0; t < K.size(); ++t) {
    const auto z = Z_bar[t].size();
    Vector X(3 * z);
    X << Z_bar[t], Z_bar[t], Z_bar[t];
    U.push_back(-K[t] * X);
  }
  return U;
}

namespace {

void expect_seq(const MatrixSeq& seq, std::size_t length, Eigen::Index rows,
                Eigen::Index cols, const std::string& path) {
  if (seq.size() != length) {
    throw SpecError(path, "expected " + std::to_string(length) + " entries, got " +
                              std::to_string(seq.size()));
  }
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (seq[t].rows() != rows || seq[t].cols() != cols) {
      throw SpecError(path + "[" + std::to_string(t) + "]",
                      "expected " + std::to_string(rows) + "x" +
                          std::to_string(cols));
    }
  }
}

void expect_seq(const VectorSeq& seq, std::size_t length, Eigen::Index size,
                const std::string& path) {
  if (seq.size() != length) {
    throw SpecError(path, "expected " + std::to_string(length) + " entries, got " +
                              std::to_string(seq.size()));
  }
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (seq[t].size() != size) {
      throw SpecError(path + "[" + std::to_string(t) + "]",
                      "expected length " + std::to_string(size));
    }
  }
}

}  // namespace

void check_equilibrium_shapes(const GameSpec& spec, const Equilibrium& eq) {
  const auto T = static_cast<std::size_t>(spec.T());
  const int z = spec.z();
  const int u = spec.u();
  const int v = spec.v();
  const auto& sol = eq.solution;
  const auto& tr = eq.trajectories;

  expect_seq(sol.validity.P_hat, T + 1, z, z, "validity.P_hat");
  if (sol.validity.margins.size() != T) {
    throw SpecError("validity.margins", "expected " + std::to_string(T) + " entries");
  }
  expect_seq(sol.global.P_bar, T + 1, z, z, "global.P_bar");
  expect_seq(sol.global.E, T, z, z, "global.E");
  expect_seq(sol.global.F_bar, T, z, z, "global.F_bar");
  expect_seq(sol.local.P_tilde, T + 1, z, z, "local.P_tilde");
  expect_seq(sol.local.E_tilde, T, z, z, "local.E_tilde");
  expect_seq(sol.local.H_tilde, T, z, z, "local.H_tilde");
  expect_seq(sol.local.F1_tilde, T, z, z, "local.F1_tilde");
  if (sol.augmented.block != z) throw SpecError("augmented.block", "does not match dims.z");
  expect_seq(sol.augmented.A_aug, T, 3 * z, 3 * z, "augmented.A_aug");
  if (sol.augmented.B_aug.rows() != 3 * z || sol.augmented.B_aug.cols() != u) {
    throw SpecError("augmented.B_aug", "shape mismatch");
  }
  expect_seq(sol.augmented.Q_aug, T + 1, 3 * z, 3 * z, "augmented.Q_aug");
  expect_seq(sol.augmented.Sigma_w_aug, T, 3 * z, 3 * z, "augmented.Sigma_w_aug");
  expect_seq(sol.agent.P_star, T + 1, 3 * z, 3 * z, "agent.P_star");
  expect_seq(sol.agent.K, T, u, 3 * z, "agent.K");
  expect_seq(tr.Z_bar, T + 1, z, "trajectories.Z_bar");
  expect_seq(tr.V_star, T, v, "trajectories.V_star");
  expect_seq(tr.zeta_bar, T + 1, z, "trajectories.zeta_bar");
  expect_seq(tr.zeta0_bar, T + 1, z, "trajectories.zeta0_bar");
  expect_seq(tr.s_bar, T + 1, z, "trajectories.s_bar");
  expect_seq(tr.s_tilde, T + 1, z, "trajectories.s_tilde");
  expect_seq(tr.local_drift, T, z, "trajectories.local_drift");
  expect_seq(tr.F2_tilde, T, z, z, "trajectories.F2_tilde");
}

}  // namespace amfg
