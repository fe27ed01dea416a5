#include "amfg/meanfield.hpp"

#include "amfg/error.hpp"
#include "amfg/linalg.hpp"

namespace amfg {

VectorSeq propagate_global_mf(const MatrixSeq& F_bar, const Vector& mu_0) {
  VectorSeq Z;
  Z.reserve(F_bar.size() + 1);
  Z.push_back(mu_0);
  for (const auto& F : F_bar) Z.push_back(F * Z.back());
  return Z;
}

VectorSeq adversary_policy(const GameSpec& spec, const GlobalRiccati& global,
                           const VectorSeq& Z_bar) {
  VectorSeq V;
  V.reserve(static_cast<std::size_t>(spec.T()));
  for (int t = 0; t < spec.T(); ++t) {
    V.push_back(adversary_gain(spec, global, t) *
                Z_bar[static_cast<std::size_t>(t)]);
  }
  return V;
}

MeanCostates mean_costates(const GameSpec& spec, const GlobalRiccati& global,
                           const VectorSeq& Z_bar) {
  const int T = spec.T();
  const auto n = static_cast<std::size_t>(T);
  MeanCostates c;
  c.zeta_bar.resize(n + 1);
  c.zeta0_bar.resize(n + 1);
  c.s_bar.resize(n + 1);

  for (std::size_t t = 0; t <= n; ++t) c.zeta_bar[t] = global.P_bar[t] * Z_bar[t];

  c.zeta0_bar[n] = -spec.Q[n] * Z_bar[n];
  for (int t = T - 1; t >= 0; --t) {
    const auto i = static_cast<std::size_t>(t);
    c.zeta0_bar[i] =
        spec.A.transpose() * c.zeta0_bar[i + 1] - spec.Q[i] * Z_bar[i];
  }

  const int z = spec.z();
  const Matrix I = Matrix::Identity(z, z);
  c.s_bar[n] = Vector::Zero(z);
  for (int t = T - 1; t >= 0; --t) {
    const auto i = static_cast<std::size_t>(t);
    const Matrix Einv_M =
        linalg::solve(global.E[i], coupling_matrix(spec, t), "E", t);
    c.s_bar[i] =
        spec.A.transpose() * (I - global.P_bar[i + 1] * Einv_M) * c.s_bar[i + 1];
  }
  return c;
}

MatrixSeq local_offset_gains(const GameSpec& spec, const GlobalRiccati& global,
                             const LocalRiccati& local) {
  const int T = spec.T();
  const auto n = static_cast<std::size_t>(T);
  MatrixSeq L(n + 1);
  L[n] = spec.Qbar[n];
  for (int t = T - 1; t >= 0; --t) {
    const auto i = static_cast<std::size_t>(t);
    L[i] = local.H_tilde[i] * L[i + 1] * global.F_bar[i] + spec.Qbar[i];
  }
  MatrixSeq F2(n);
  for (int t = 0; t < T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    const Matrix rhs = coupling_matrix(spec, t) * L[i + 1] * global.F_bar[i];
    F2[i] = linalg::solve(local.E_tilde[i], rhs, "E_tilde", t);
  }
  return F2;
}

MatrixSeq local_offset_gains_closed_form(const GameSpec& spec,
                                         const GlobalRiccati& global,
                                         const LocalRiccati& local) {
  const int T = spec.T();
  const int z = spec.z();
  MatrixSeq F2(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    Matrix sum = Matrix::Zero(z, z);
    for (int i = 0; i + t + 1 <= T; ++i) {
      Matrix left = Matrix::Identity(z, z);
      for (int j = 1; j <= i; ++j) {
        left = left * local.H_tilde[static_cast<std::size_t>(t + j)];
      }
      Matrix right = Matrix::Identity(z, z);
      for (int j = 0; j <= i; ++j) {
        right = right * global.F_bar[static_cast<std::size_t>(t + i - j)];
      }
      sum += left * spec.Qbar[static_cast<std::size_t>(t + 1 + i)] * right;
    }
    F2[static_cast<std::size_t>(t)] = linalg::solve(
        local.E_tilde[static_cast<std::size_t>(t)],
        coupling_matrix(spec, t) * sum, "E_tilde", t);
  }
  return F2;
}

LocalOffsets compute_local_offsets(const GameSpec& spec,
                                   const GlobalRiccati& global,
                                   const LocalRiccati& local,
                                   const VectorSeq& Z_bar) {
  const int T = spec.T();
  const auto n = static_cast<std::size_t>(T);
  LocalOffsets out;
  out.s_tilde.resize(n + 1);
  out.s_tilde[n] = -spec.Qbar[n] * Z_bar[n];
  for (int t = T - 1; t >= 0; --t) {
    const auto i = static_cast<std::size_t>(t);
    out.s_tilde[i] =
        local.H_tilde[i] * out.s_tilde[i + 1] - spec.Qbar[i] * Z_bar[i];
  }
  out.drift.resize(n);
  for (int t = 0; t < T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    const Vector rhs = -(coupling_matrix(spec, t) * out.s_tilde[i + 1]);
    out.drift[i] = linalg::solve(local.E_tilde[i], rhs, "E_tilde", t);
  }
  out.F2_tilde = local_offset_gains(spec, global, local);
  return out;
}

LocalMFSampler::LocalMFSampler(const GameSpec& spec, const LocalRiccati& local,
                               const VectorSeq& drift)
    : mu_0_(spec.mu_0),
      initial_(spec.Sigma_0),
      noise_(spec.Sigma_w / spec.neighborhood_size),
      F1_(local.F1_tilde),
      drift_(drift),
      m_(spec.neighborhood_size) {
  if (drift_.size() != F1_.size()) {
    throw Error("LocalMFSampler: drift and F1_tilde cover different horizons");
  }
  Einv_.reserve(F1_.size());
  for (std::size_t t = 0; t < local.E_tilde.size(); ++t) {
    Einv_.push_back(
        linalg::inverse(local.E_tilde[t], "E_tilde", static_cast<int>(t)));
  }
}

void LocalMFSampler::sample_into(Engine& engine, VectorSeq& Y) const {
  const auto n = F1_.size();
  Y.resize(n + 1);
  // Y_0 is the average of m independent initial states.
  Vector sum = Vector::Zero(mu_0_.size());
  for (int k = 0; k < m_; ++k) sum += initial_.draw(engine);
  Y[0] = mu_0_ + sum / static_cast<double>(m_);
  for (std::size_t t = 0; t < n; ++t) {
    Y[t + 1] = F1_[t] * Y[t] + drift_[t] + Einv_[t] * noise_.draw(engine);
  }
}

LocalMFPath LocalMFSampler::sample(std::uint64_t seed,
                                   std::uint64_t replication) const {
  LocalMFPath path;
  path.seed = seed;
  path.replication = replication;
  path.m = m_;
  Engine engine = make_engine(seed, StreamDomain::kLocalMeanField, replication);
  sample_into(engine, path.Y);
  return path;
}

LocalMFPath simulate_local_mf(const GameSpec& spec, const LocalRiccati& local,
                              const VectorSeq& drift, std::uint64_t seed,
                              std::uint64_t replication) {
  return LocalMFSampler(spec, local, drift).sample(seed, replication);
}

}  // namespace amfg
