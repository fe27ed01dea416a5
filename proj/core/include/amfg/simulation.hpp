#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amfg/equilibrium.hpp"
#include "amfg/model.hpp"
#include "amfg/types.hpp"

namespace amfg {

// assignment[i] is the neighborhood id of agent i, ids 0..N/m-1.
using NeighborhoodAssignment = std::vector<int>;

// Uniformly random partition of N agents into N/m neighborhoods of size m.
// Throws Error if m does not divide N.
NeighborhoodAssignment assign_neighborhoods(int N, int m, std::uint64_t seed);

// Everything the finite population needs from a computed equilibrium.
struct PopulationPolicy {
  MatrixSeq K;               // u x 3z agent gains
  VectorSeq Z_bar;           // precomputed global mean field, used open loop
  VectorSeq V_star;          // precomputed adversary controls
  MatrixSeq adversary_gain;  // V = gain * Zbar, used by the reactive adversary
};

PopulationPolicy make_population_policy(const GameSpec& spec,
                                        const Equilibrium& eq);

enum class AdversaryMode {
  kPrecomputed,  // apply V*_t
  kReactive,     // apply adversary_gain_t * Zbar_emp_t
};

struct PopulationOptions {
  int threads = 1;
  AdversaryMode adversary = AdversaryMode::kPrecomputed;
};

struct PopulationRun {
  int N = 0;
  int m = 0;
  std::uint64_t seed = 0;
  NeighborhoodAssignment assignment;
  std::vector<std::vector<int>> members;  // per neighborhood, ascending

  MatrixSeq Z;         // t = 0..T, z x N (column i is agent i)
  MatrixSeq U;         // t = 0..T-1, u x N
  VectorSeq V_applied; // t = 0..T-1
  MatrixSeq Y_emp;     // t = 0..T, z x (N/m) neighborhood averages
  VectorSeq Zbar_emp;  // t = 0..T, population average

  int horizon() const noexcept { return static_cast<int>(U.size()); }
  int neighborhoods() const noexcept { return static_cast<int>(members.size()); }
};

// Samples Z_0^i ~ N(mu_0, Sigma_0), then every agent applies
// U_t^i = -K_t [Z_t^i; Y_t^i; Zbar*_t] with Y_t^i its neighborhood average.
// Noise for agent i comes from its own stream, so the result is bit-identical
// for any thread count.
PopulationRun run_population(const GameSpec& spec,
                             const PopulationPolicy& policy, int N,
                             std::uint64_t seed,
                             const PopulationOptions& options = {});

struct CostBreakdown {
  double state = 0.0;
  double local_consensus = 0.0;
  double global_consensus = 0.0;
  double control = 0.0;
  double adversary_bonus = 0.0;  // - sum_t ||V_t||_S^2
  double terminal = 0.0;

  double total() const noexcept {
    return state + local_consensus + global_consensus + control +
           adversary_bonus + terminal;
  }
};

struct CostReport {
  std::vector<double> J_agent;
  std::vector<CostBreakdown> breakdown;
  double J_agent_mean = 0.0;
  double J_adversary = 0.0;  // -J_agent_mean
  CostBreakdown mean_breakdown;
};

// Realized per-agent costs with the population average as global aggregate.
CostReport evaluate_costs(const PopulationRun& run, const GameSpec& spec);

struct EmpiricalMeanFields {
  VectorSeq Zbar_emp;
  MatrixSeq Y_emp;
  std::vector<double> max_deviation;   // per t, max_k ||Y_k - Zbar_emp||
  std::vector<double> mean_deviation;  // per t, mean_k ||Y_k - Zbar_emp||
};

// Recomputes the averages from the stored states.
EmpiricalMeanFields empirical_meanfields(const PopulationRun& run);

// Pairwise (tree) mean of the selected columns.
Vector pairwise_mean(const Matrix& columns, std::span<const int> indices);
Vector pairwise_mean(const Matrix& columns);
double pairwise_mean(std::span<const double> values);

}  // namespace amfg
