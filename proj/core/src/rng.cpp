#include "amfg/rng.hpp"

#include "amfg/linalg.hpp"

namespace amfg {

Engine make_engine(std::uint64_t seed, StreamDomain domain,
                   std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(domain),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Engine(seq);
}

GaussianSampler::GaussianSampler(const Matrix& covariance)
    : factor_(linalg::covariance_factor(covariance)) {}

Vector GaussianSampler::draw(Engine& engine) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector xi(factor_.cols());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(engine);
  return factor_ * xi;
}

}  // namespace amfg
