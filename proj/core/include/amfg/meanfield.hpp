#pragma once

#include <cstdint>

#include "amfg/model.hpp"
#include "amfg/riccati.hpp"
#include "amfg/rng.hpp"
#include "amfg/types.hpp"

namespace amfg {

struct MeanFieldTrajectories {
  VectorSeq Z_bar;        // t = 0..T, equilibrium global mean field
  VectorSeq V_star;       // t = 0..T-1, adversary controls
  VectorSeq zeta_bar;     // t = 0..T, mean agent co-state
  VectorSeq zeta0_bar;    // t = 0..T, adversary co-state
  VectorSeq s_bar;        // t = 0..T, global co-state offset (vanishes)
  VectorSeq s_tilde;      // t = 0..T, local co-state offset
  VectorSeq local_drift;  // t = 0..T-1, -E_tilde^{-1} M s_tilde_{t+1}
  MatrixSeq F2_tilde;     // t = 0..T-1, drift_t = F2_tilde_t Zbar_t
};

struct MeanCostates {
  VectorSeq zeta_bar;
  VectorSeq zeta0_bar;
  VectorSeq s_bar;
};

struct LocalOffsets {
  VectorSeq s_tilde;
  VectorSeq drift;
  MatrixSeq F2_tilde;
};

// Zbar_0 = mu_0, Zbar_{t+1} = F_bar_t Zbar_t.
VectorSeq propagate_global_mf(const MatrixSeq& F_bar, const Vector& mu_0);

// V*_t = S_t^{-1} C^T P_bar_{t+1} F_bar_t Zbar_t.
VectorSeq adversary_policy(const GameSpec& spec, const GlobalRiccati& global,
                           const VectorSeq& Z_bar);

// zeta_bar_t = P_bar_t Zbar_t; zeta0_bar from its own backward recursion
// zeta0_t = A^T zeta0_{t+1} - Q_t Zbar_t; s_bar from the offset recursion.
MeanCostates mean_costates(const GameSpec& spec, const GlobalRiccati& global,
                           const VectorSeq& Z_bar);

// Gain with drift_t = F2_tilde_t Zbar_t, from the matrix form of the offset
// recursion: L_T = Qbar_T, L_t = H_tilde_t L_{t+1} F_bar_t + Qbar_t, so
// s_tilde_t = -L_t Zbar_t and F2_tilde_t = E_tilde_t^{-1} M_t L_{t+1} F_bar_t.
MatrixSeq local_offset_gains(const GameSpec& spec, const GlobalRiccati& global,
                             const LocalRiccati& local);

// Same gain from the unrolled sum of products
//   sum_i (H_{t+1} ... H_{t+i}) Qbar_{t+1+i} (F_{t+i} ... F_t).
MatrixSeq local_offset_gains_closed_form(const GameSpec& spec,
                                         const GlobalRiccati& global,
                                         const LocalRiccati& local);

// s_tilde_T = -Qbar_T Zbar_T, s_tilde_t = H_tilde_t s_tilde_{t+1} - Qbar_t Zbar_t.
LocalOffsets compute_local_offsets(const GameSpec& spec,
                                   const GlobalRiccati& global,
                                   const LocalRiccati& local,
                                   const VectorSeq& Z_bar);

struct LocalMFPath {
  VectorSeq Y;  // t = 0..T
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  int m = 1;
};

// One sample of the equilibrium local mean field:
//   Y_0 = average of m draws from N(mu_0, Sigma_0),
//   Y_{t+1} = F1_tilde_t Y_t + drift_t + E_tilde_t^{-1} W~_t,  W~_t ~ N(0, Sigma_w / m).
class LocalMFSampler {
 public:
  LocalMFSampler(const GameSpec& spec, const LocalRiccati& local,
                 const VectorSeq& drift);

  LocalMFPath sample(std::uint64_t seed, std::uint64_t replication) const;

  // Draws into an existing path using an externally owned engine.
  void sample_into(Engine& engine, VectorSeq& Y) const;

 private:
  Vector mu_0_;
  GaussianSampler initial_;
  GaussianSampler noise_;
  MatrixSeq F1_;
  MatrixSeq Einv_;
  VectorSeq drift_;
  int m_;
};

LocalMFPath simulate_local_mf(const GameSpec& spec, const LocalRiccati& local,
                              const VectorSeq& drift, std::uint64_t seed,
                              std::uint64_t replication = 0);

}  // namespace amfg
