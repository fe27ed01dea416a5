#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amfg/equilibrium.hpp"
#include "amfg/model.hpp"
#include "amfg/simulation.hpp"
#include "amfg/types.hpp"

namespace amfg {

// ---------------------------------------------------------------------------
// Forward-backward oracle

struct TpbvpSolution {
  VectorSeq Z_bar;     // t = 0..T
  VectorSeq zeta_bar;  // t = 0..T
};

// Stacks Zbar_{t+1} = A Zbar_t - M_t zeta_{t+1}, zeta_t = A^T zeta_{t+1} + Q_t Zbar_t
// with Zbar_0 = mu_0, zeta_T = Q_T Zbar_T into one dense system and solves it
// directly. Throws NumericalError if the stacked system is singular.
TpbvpSolution solve_tpbvp(const GameSpec& spec);

struct TpbvpResult {
  TpbvpSolution direct;
  double error = 0.0;  // max_t of ||Zbar - Zbar_direct||, ||zeta - zeta_direct||
};

TpbvpResult tpbvp_oracle(const GameSpec& spec,
                         const MeanFieldTrajectories& candidate);

// ---------------------------------------------------------------------------
// Mean-level identities

// max_t ||A Zbar_t + B U_t + C V_t - Zbar_{t+1}|| with U_t = -R_t^{-1} B^T zeta_{t+1}.
double smp_bridge_error(const GameSpec& spec, const MeanFieldTrajectories& traj);

// Same residual with U_t = -K_t [Zbar_t; Zbar_t; Zbar_t], i.e. the mean of
// the closed loop under the augmented LQR gains.
double closed_loop_mean_error(const GameSpec& spec, const MatrixSeq& K,
                              const VectorSeq& Z_bar, const VectorSeq& V_star);

// ---------------------------------------------------------------------------
// Adversary best response

// How the frozen agents react to a change in V on the mean dynamics.
enum class AgentResponse {
  kOpenLoop,  // agent mean controls held at their equilibrium values
  kFeedback,  // agents keep their feedback gains on (Z, Y); Zbar* stays open loop
};

// Mean agent cost as a quadratic in the stacked V = (V_0, ..., V_{T-1}):
//   J(V) = 0.5 V^T H V + g^T V + c.
// The adversary maximizes J.
struct AdversaryQuadratic {
  Matrix hessian;
  Vector linear;
  double constant = 0.0;

  double value(const Vector& V) const {
    return 0.5 * V.dot(hessian * V) + linear.dot(V) + constant;
  }
};

AdversaryQuadratic reduced_adversary_objective(const GameSpec& spec,
                                               const MatrixSeq& K,
                                               const VectorSeq& Z_bar,
                                               AgentResponse response);

// Open-loop form driven by arbitrary frozen mean agent controls.
AdversaryQuadratic reduced_adversary_objective(
    const GameSpec& spec, const VectorSeq& frozen_agent_controls);

struct AdversaryBestResponse {
  AgentResponse response = AgentResponse::kOpenLoop;
  bool concave = false;
  double max_hessian_eigenvalue = 0.0;
  VectorSeq V_br;             // empty unless concave
  double gap_inf = 0.0;       // max_t ||V_br - V*||_inf
  double objective_gain = 0.0;  // J(V_br) - J(V*), >= 0 up to round-off
  double adversary_cost_difference = 0.0;  // J0(V_br) - J0(V*) = -objective_gain
  double stationarity_residual = 0.0;      // ||H V* + g||
  double stationarity_tolerance = 0.0;     // 1e-8 (1 + ||V*||)
};

AdversaryBestResponse adversary_best_response(
    const GameSpec& spec, const MatrixSeq& K, const VectorSeq& Z_bar,
    const VectorSeq& V_star, AgentResponse response = AgentResponse::kOpenLoop);

AdversaryBestResponse best_response_from_quadratic(const AdversaryQuadratic& q,
                                                   const VectorSeq& V_star,
                                                   int adversary_dim);

// ---------------------------------------------------------------------------
// Agent exploitability

// Gains of the augmented LQR obtained from the dense finite-horizon problem at
// every t (no Riccati recursion involved).
MatrixSeq batch_lqr_gains(const AugmentedSystem& aug, const MatrixSeq& R);

struct AgentExploitabilityOptions {
  int n_perturbations = 64;
  int n_replications = 2000;
  std::uint64_t seed = 0;
  double relative_size = 0.1;
  int threads = 1;
};

struct PerturbationGap {
  std::string family;  // "gain" or "offset"
  double mean_gap = 0.0;
  double std_error = 0.0;
};

struct AgentExploitability {
  double gain_deviation = 0.0;  // max_t ||K - K_batch||_F / max(||K_batch||_F, 1)
  double gain_tolerance = 1e-9;
  bool gains_agree = false;

  double control_gap = 0.0;  // zero perturbation, exactly 0 under common noise
  std::vector<PerturbationGap> perturbations;
  double agent_gap = 0.0;            // min over perturbations of mean_gap
  double agent_gap_std_error = 0.0;  // standard error of that perturbation
  double worst_z_score = 0.0;        // min over perturbations of mean / se
  bool statistical_pass = false;     // every mean_gap >= -3 se

  std::string deviation_class;
  bool pass() const noexcept { return gains_agree && statistical_pass; }
};

// `reference` supplies the environment (Y* law, V*, Zbar*, augmented system);
// `candidate_K` is the policy whose optimality is tested.
AgentExploitability agent_exploitability(const GameSpec& spec,
                                         const Equilibrium& reference,
                                         const MatrixSeq& candidate_K,
                                         const AgentExploitabilityOptions& options);

// ---------------------------------------------------------------------------
// Consistency

struct RunConsistency {
  std::uint64_t seed = 0;
  int N = 0;
  double raw_error = 0.0;         // max_t ||Zbar_emp_t - Zbar*_t||
  double normalized_error = 0.0;  // sqrt(N) * raw_error
  double cross_sectional_std = 0.0;  // max_t sqrt(trace of sample covariance)
  double neighborhood_average_error = 0.0;  // max_t ||mean_k Y_k - Zbar_emp_t||
};

struct ConsistencyReport {
  std::vector<RunConsistency> runs;
  double median_raw_error = 0.0;
  double max_raw_error = 0.0;
  double median_normalized_error = 0.0;
  double max_normalized_error = 0.0;
  double median_cross_sectional_std = 0.0;
  double bound_factor = 4.0;
  double roundoff_floor = 0.0;  // raw errors below this are summation round-off
  // median normalized <= bound_factor * median std + sqrt(N) * roundoff_floor
  bool pass = false;

  double bound(int N) const;
};

// 1e-12 (1 + max_t ||Zbar*_t||).
double consistency_roundoff_floor(const VectorSeq& Z_bar);

RunConsistency run_consistency(const VectorSeq& Z_bar, const PopulationRun& run);
ConsistencyReport check_consistency(const VectorSeq& Z_bar,
                                    std::span<const PopulationRun> runs);

struct ConsistencyStudy {
  std::vector<int> population_sizes;
  std::vector<ConsistencyReport> reports;
  // Strictly, in the order given; a pair of medians both under the round-off
  // floor (noiseless runs) counts as decreasing.
  bool raw_error_decreasing = false;
  bool pass = false;
};

ConsistencyStudy consistency_study(const GameSpec& spec,
                                   const PopulationPolicy& policy,
                                   std::span<const int> population_sizes,
                                   std::span<const std::uint64_t> seeds,
                                   int threads = 1);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Aggregated report

struct Verdict {
  std::string check;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::optional<TpbvpResult> tpbvp;
  std::optional<AdversaryBestResponse> adversary;
  std::optional<AdversaryBestResponse> adversary_feedback;  // diagnostic only
  std::optional<AgentExploitability> agent;
  std::optional<ConsistencyStudy> consistency;
  std::vector<Verdict> verdicts;

  bool pass() const noexcept;
};

inline constexpr double kTpbvpTolerance = 1e-9;
inline constexpr double kAdversaryGapTolerance = 1e-8;

struct VerificationOptions {
  bool tpbvp = true;
  bool adversary = true;
  bool agent = true;
  bool consistency = true;
  AgentExploitabilityOptions agent_options;
  std::vector<int> population_sizes{1000};
  std::vector<std::uint64_t> seeds{0};
  int threads = 1;
};

// Runs the selected checks against a (possibly externally supplied)
// equilibrium and collects one verdict per threshold.
VerificationReport verify_equilibrium(const GameSpec& spec, const Equilibrium& eq,
                                      const VerificationOptions& options);

}  // namespace amfg
