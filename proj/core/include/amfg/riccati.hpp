#pragma once

#include <optional>
#include <vector>

#include "amfg/model.hpp"
#include "amfg/types.hpp"

namespace amfg {

// Margins at or below this value fail the validity condition.
inline constexpr double kValidityThreshold = 1e-10;

// Riccati family behind the adversary's concavity (validity) condition.
struct ValidationRiccati {
  MatrixSeq P_hat;                // t = 0..T
  std::vector<double> margins;    // t = 0..T-1, min eig of S_t - C^T P_hat_{t+1} C
};

// Result of scanning the validity condition without throwing. When the scan
// stops early, `failed_step` is set and P_hat/margins are only filled for
// steps >= failed_step (P_hat) and > failed_step (margins stays NaN below).
struct ValidityReport {
  ValidationRiccati riccati;
  std::optional<int> failed_step;
  double failed_margin = 0.0;

  bool valid() const noexcept { return !failed_step.has_value(); }
};

// Global mean-field Riccati family: the mean field propagates as
// Zbar_{t+1} = F_bar_t Zbar_t.
struct GlobalRiccati {
  MatrixSeq P_bar;  // t = 0..T
  MatrixSeq E;      // t = 0..T-1
  MatrixSeq F_bar;  // t = 0..T-1, E_t^{-1} A
};

// Local mean-field Riccati family.
struct LocalRiccati {
  MatrixSeq P_tilde;   // t = 0..T
  MatrixSeq E_tilde;   // t = 0..T-1
  MatrixSeq H_tilde;   // t = 0..T-1, offset propagator
  MatrixSeq F1_tilde;  // t = 0..T-1, E_tilde_t^{-1} A
};

// Generic agent's problem on the stacked state X = [Z; Y*; Zbar*].
struct AugmentedSystem {
  int block = 0;          // z; X has 3 * block entries
  MatrixSeq A_aug;        // t = 0..T-1, 3z x 3z
  Matrix B_aug;           // 3z x u
  MatrixSeq Q_aug;        // t = 0..T, 3z x 3z
  MatrixSeq Sigma_w_aug;  // t = 0..T-1, 3z x 3z
};

struct AgentLqr {
  MatrixSeq P_star;  // t = 0..T
  MatrixSeq K;       // t = 0..T-1, u x 3z; U_t = -K_t X_t
};

struct EquilibriumSolution {
  ValidationRiccati validity;
  GlobalRiccati global;
  LocalRiccati local;
  AugmentedSystem augmented;
  AgentLqr agent;
};

// B R_t^{-1} B^T - C S_t^{-1} C^T.
Matrix coupling_matrix(const GameSpec& spec, int t);

ValidityReport evaluate_validity(const GameSpec& spec);

// Throws ValidityConditionError at the first (latest-in-time) failing step.
ValidationRiccati solve_validation_riccati(const GameSpec& spec);

GlobalRiccati solve_global_riccati(const GameSpec& spec);

LocalRiccati solve_local_riccati(const GameSpec& spec);

// C S_t^{-1} C^T P_bar_{t+1} F_bar_t: the adversary's effect on the agent
// state expressed as a gain on the global mean field.
Matrix adversary_feedthrough(const GameSpec& spec, const GlobalRiccati& global,
                             int t);

// S_t^{-1} C^T P_bar_{t+1} F_bar_t, so that V*_t = gain * Zbar*_t.
Matrix adversary_gain(const GameSpec& spec, const GlobalRiccati& global, int t);

AugmentedSystem build_augmented_system(const GameSpec& spec,
                                       const GlobalRiccati& global,
                                       const LocalRiccati& local,
                                       const MatrixSeq& F2_tilde);

// Backward Riccati recursion of the time-varying LQR on the augmented system.
// Throws NumericalError if R_t + B^T P*_{t+1} B is not positive definite.
AgentLqr solve_agent_lqr(const AugmentedSystem& aug, const MatrixSeq& R);

}  // namespace amfg
