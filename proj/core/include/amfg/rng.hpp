#pragma once

#include <cstdint>
#include <random>

#include "amfg/types.hpp"

namespace amfg {

using Engine = std::mt19937_64;

// Independent purposes draw from disjoint stream families so that, e.g., the
// neighborhood shuffle never shares randomness with agent noise.
enum class StreamDomain : std::uint32_t {
  kNeighborhoods = 1,
  kAgents = 2,
  kLocalMeanField = 3,
  kRollouts = 4,
  kPerturbations = 5,
};

// Engine for stream `index` of `domain` under `seed`. Results depend only on
// the triple, never on how work is scheduled across threads.
Engine make_engine(std::uint64_t seed, StreamDomain domain, std::uint64_t index);

// Zero-mean Gaussian sampler for a PSD (possibly singular) covariance.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Matrix& covariance);

  Vector draw(Engine& engine) const;
  int dim() const noexcept { return static_cast<int>(factor_.rows()); }

 private:
  Matrix factor_;
};

}  // namespace amfg
