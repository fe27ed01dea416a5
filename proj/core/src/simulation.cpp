#include "amfg/simulation.hpp"

#include <algorithm>
#include <numeric>

#include "amfg/error.hpp"
#include "amfg/parallel.hpp"
#include "amfg/rng.hpp"

namespace amfg {
namespace {

template <typename Leaf>
Vector pairwise_sum(std::size_t begin, std::size_t end, const Leaf& leaf) {
  if (end - begin <= 8) {
    Vector acc = leaf(begin);
    for (std::size_t k = begin + 1; k < end; ++k) acc += leaf(k);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(begin, mid, leaf) + pairwise_sum(mid, end, leaf);
}

double pairwise_sum_scalar(std::span<const double> v) {
  if (v.size() <= 8) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t mid = v.size() / 2;
  return pairwise_sum_scalar(v.first(mid)) + pairwise_sum_scalar(v.subspan(mid));
}

double weighted_square(const Vector& x, const Matrix& W) {
  return x.dot(W * x);
}

void record_aggregates(PopulationRun& run, std::size_t t) {
  const Matrix& Z = run.Z[t];
  Matrix Y(Z.rows(), run.neighborhoods());
  for (std::size_t k = 0; k < run.members.size(); ++k) {
    Y.col(static_cast<Eigen::Index>(k)) = pairwise_mean(Z, run.members[k]);
  }
  run.Y_emp[t] = std::move(Y);
  run.Zbar_emp[t] = pairwise_mean(Z);
}

}  // namespace

Vector pairwise_mean(const Matrix& columns, std::span<const int> indices) {
  if (indices.empty()) throw Error("pairwise_mean: empty selection");
  const Vector sum = pairwise_sum(0, indices.size(), [&](std::size_t k) {
    return Vector(columns.col(indices[k]));
  });
  return sum / static_cast<double>(indices.size());
}

Vector pairwise_mean(const Matrix& columns) {
  if (columns.cols() == 0) throw Error("pairwise_mean: no columns");
  const auto n = static_cast<std::size_t>(columns.cols());
  const Vector sum = pairwise_sum(0, n, [&](std::size_t k) {
    return Vector(columns.col(static_cast<Eigen::Index>(k)));
  });
  return sum / static_cast<double>(n);
}

double pairwise_mean(std::span<const double> values) {
  if (values.empty()) throw Error("pairwise_mean: empty range");
  return pairwise_sum_scalar(values) / static_cast<double>(values.size());
}

NeighborhoodAssignment assign_neighborhoods(int N, int m, std::uint64_t seed) {
  if (N < 1 || m < 1 || N % m != 0) {
    throw Error("neighborhood size m=" + std::to_string(m) +
                " must divide the population size N=" + std::to_string(N));
  }
  std::vector<int> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  Engine engine = make_engine(seed, StreamDomain::kNeighborhoods, 0);
  std::shuffle(order.begin(), order.end(), engine);
  NeighborhoodAssignment assignment(static_cast<std::size_t>(N));
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    assignment[static_cast<std::size_t>(order[slot])] =
        static_cast<int>(slot) / m;
  }
  return assignment;
}

PopulationPolicy make_population_policy(const GameSpec& spec,
                                        const Equilibrium& eq) {
  PopulationPolicy p;
  p.K = eq.solution.agent.K;
  p.Z_bar = eq.trajectories.Z_bar;
  p.V_star = eq.trajectories.V_star;
  for (int t = 0; t < spec.T(); ++t) {
    p.adversary_gain.push_back(adversary_gain(spec, eq.solution.global, t));
  }
  return p;
}

PopulationRun run_population(const GameSpec& spec,
                             const PopulationPolicy& policy, int N,
                             std::uint64_t seed,
                             const PopulationOptions& options) {
  const int T = spec.T();
  const int z = spec.z();
  const int m = spec.neighborhood_size;
  const auto steps = static_cast<std::size_t>(T);
  if (policy.K.size() != steps || policy.V_star.size() != steps ||
      policy.Z_bar.size() != steps + 1) {
    throw Error("run_population: policy does not match the horizon");
  }
  for (const auto& K : policy.K) {
    if (K.rows() != spec.u() || K.cols() != 3 * z) {
      throw Error("run_population: gain shape mismatch");
    }
  }
  if (options.adversary == AdversaryMode::kReactive &&
      policy.adversary_gain.size() != steps) {
    throw Error("run_population: reactive adversary needs adversary gains");
  }

  PopulationRun run;
  run.N = N;
  run.m = m;
  run.seed = seed;
  run.assignment = assign_neighborhoods(N, m, seed);
  run.members.assign(static_cast<std::size_t>(N / m), {});
  for (int i = 0; i < N; ++i) {
    run.members[static_cast<std::size_t>(run.assignment[i])].push_back(i);
  }

  run.Z.assign(steps + 1, Matrix(z, N));
  run.U.assign(steps, Matrix(spec.u(), N));
  run.Y_emp.resize(steps + 1);
  run.Zbar_emp.resize(steps + 1);
  run.V_applied.resize(steps);

  // Each agent's initial state and noise come from its own stream.
  MatrixSeq W(steps, Matrix(z, N));
  const GaussianSampler initial(spec.Sigma_0);
  const GaussianSampler process(spec.Sigma_w);
  parallel_for(static_cast<std::size_t>(N), options.threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t i = begin; i < end; ++i) {
                   Engine engine =
                       make_engine(seed, StreamDomain::kAgents, i);
                   const auto col = static_cast<Eigen::Index>(i);
                   run.Z[0].col(col) = spec.mu_0 + initial.draw(engine);
                   for (std::size_t t = 0; t < steps; ++t) {
                     W[t].col(col) = process.draw(engine);
                   }
                 }
               });

  for (std::size_t t = 0; t < steps; ++t) {
    record_aggregates(run, t);
    run.V_applied[t] = options.adversary == AdversaryMode::kReactive
                           ? Vector(policy.adversary_gain[t] * run.Zbar_emp[t])
                           : policy.V_star[t];

    const Matrix& K = policy.K[t];
    const Matrix K_own = K.leftCols(z);
    const Matrix K_local = K.middleCols(z, z);
    const Vector global_term = K.rightCols(z) * policy.Z_bar[t];
    const Vector common = spec.C * run.V_applied[t];
    const Matrix local_terms = K_local * run.Y_emp[t];

    parallel_for(static_cast<std::size_t>(N), options.threads,
                 [&](std::size_t begin, std::size_t end) {
                   for (std::size_t i = begin; i < end; ++i) {
                     const auto col = static_cast<Eigen::Index>(i);
                     const auto hood = run.assignment[i];
                     const Vector Zi = run.Z[t].col(col);
                     const Vector Ui =
                         -(K_own * Zi + local_terms.col(hood) + global_term);
                     run.U[t].col(col) = Ui;
                     run.Z[t + 1].col(col) =
                         spec.A * Zi + spec.B * Ui + common + W[t].col(col);
                   }
                 });
  }
  record_aggregates(run, steps);
  return run;
}

CostReport evaluate_costs(const PopulationRun& run, const GameSpec& spec) {
  const int T = run.horizon();
  const auto n = static_cast<std::size_t>(run.N);
  const auto steps = static_cast<std::size_t>(T);
  CostReport report;
  report.breakdown.assign(n, CostBreakdown{});
  report.J_agent.assign(n, 0.0);

  std::vector<double> bonus(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    bonus[t] = -weighted_square(run.V_applied[t], spec.S[t]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const auto hood = run.assignment[i];
    CostBreakdown& b = report.breakdown[i];
    for (std::size_t t = 0; t <= steps; ++t) {
      const Vector Zi = run.Z[t].col(col);
      const Vector local = Zi - run.Y_emp[t].col(hood);
      const Vector global = Zi - run.Zbar_emp[t];
      const double state = weighted_square(Zi, spec.Q[t]);
      const double lc = weighted_square(local, spec.Qtilde[t]);
      const double gc = weighted_square(global, spec.Qbar[t]);
      if (t == steps) {
        b.terminal = state + lc + gc;
      } else {
        b.state += state;
        b.local_consensus += lc;
        b.global_consensus += gc;
        b.control += weighted_square(run.U[t].col(col), spec.R[t]);
        b.adversary_bonus += bonus[t];
      }
    }
    report.J_agent[i] = b.total();
  }

  auto mean_of = [&](auto field) {
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = field(report.breakdown[i]);
    return pairwise_mean(values);
  };
  report.J_agent_mean = pairwise_mean(report.J_agent);
  report.J_adversary = -report.J_agent_mean;
  report.mean_breakdown.state = mean_of([](const CostBreakdown& b) { return b.state; });
  report.mean_breakdown.local_consensus =
      mean_of([](const CostBreakdown& b) { return b.local_consensus; });
  report.mean_breakdown.global_consensus =
      mean_of([](const CostBreakdown& b) { return b.global_consensus; });
  report.mean_breakdown.control =
      mean_of([](const CostBreakdown& b) { return b.control; });
  report.mean_breakdown.adversary_bonus =
      mean_of([](const CostBreakdown& b) { return b.adversary_bonus; });
  report.mean_breakdown.terminal =
      mean_of([](const CostBreakdown& b) { return b.terminal; });
  return report;
}

EmpiricalMeanFields empirical_meanfields(const PopulationRun& run) {
  EmpiricalMeanFields out;
  const auto states = run.Z.size();
  out.Zbar_emp.resize(states);
  out.Y_emp.resize(states);
  out.max_deviation.resize(states);
  out.mean_deviation.resize(states);
  for (std::size_t t = 0; t < states; ++t) {
    const Matrix& Z = run.Z[t];
    Matrix Y(Z.rows(), run.neighborhoods());
    for (std::size_t k = 0; k < run.members.size(); ++k) {
      Y.col(static_cast<Eigen::Index>(k)) = pairwise_mean(Z, run.members[k]);
    }
    out.Zbar_emp[t] = pairwise_mean(Z);
    std::vector<double> dev(static_cast<std::size_t>(Y.cols()));
    for (Eigen::Index k = 0; k < Y.cols(); ++k) {
      dev[static_cast<std::size_t>(k)] = (Y.col(k) - out.Zbar_emp[t]).norm();
    }
    out.max_deviation[t] = *std::max_element(dev.begin(), dev.end());
    out.mean_deviation[t] = pairwise_mean(dev);
    out.Y_emp[t] = std::move(Y);
  }
  return out;
}

}  // namespace amfg
