#pragma once

#include "amfg/meanfield.hpp"
#include "amfg/model.hpp"
#include "amfg/riccati.hpp"

namespace amfg {

struct Equilibrium {
  EquilibriumSolution solution;
  MeanFieldTrajectories trajectories;
};

// Full pipeline on a validated spec: validity Riccati (throws
// ValidityConditionError), global and local Riccati families, mean-field
// trajectories, local offsets, augmented system and agent gains.
Equilibrium solve_equilibrium(const GameSpec& spec);

// Mean agent control implied by gains K when Z, Y* and Zbar* all sit at Zbar*:
// -K_t [Zbar_t; Zbar_t; Zbar_t].
VectorSeq mean_agent_controls(const MatrixSeq& K, const VectorSeq& Z_bar);

// Throws SpecError naming the first field whose length or shape does not fit
// `spec`.
void check_equilibrium_shapes(const GameSpec& spec, const Equilibrium& eq);

}  // namespace amfg
