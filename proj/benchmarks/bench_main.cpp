#include <benchmark/benchmark.h>

#include <random>

#include "amfg/equilibrium.hpp"
#include "amfg/model.hpp"
#include "amfg/simulation.hpp"
#include "amfg/verification.hpp"

namespace {

amfg::GameSpec make_spec(int z, int horizon, int m) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n(0.0, 0.3);
  auto random = [&](int rows, int cols) {
    amfg::Matrix a(rows, cols);
    for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = n(rng);
    return a;
  };
  const amfg::Matrix I = amfg::Matrix::Identity(z, z);
  const amfg::Matrix A0 = I + random(z, z);
  const amfg::Matrix A = 0.8 / Eigen::JacobiSVD<amfg::Matrix>(A0).singularValues()(0) * A0;
  return amfg::validate_spec(amfg::make_constant_spec(
      A, random(z, z), 0.3 * random(z, z), I, 0.5 * I,
      0.5 * I, I, 20.0 * I, horizon, amfg::Vector::Ones(z), 0.04 * I, 0.04 * I, m));
}

void BM_SolveEquilibrium(benchmark::State& state) {
  const auto spec = make_spec(static_cast<int>(state.range(0)),
                              static_cast<int>(state.range(1)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(amfg::solve_equilibrium(spec));
  }
}
BENCHMARK(BM_SolveEquilibrium)->Args({1, 10})->Args({3, 50})->Args({8, 100});

void BM_Population(benchmark::State& state) {
  const auto spec = make_spec(2, 20, 10);
  const auto eq = amfg::solve_equilibrium(spec);
  const auto policy = amfg::make_population_policy(spec, eq);
  amfg::PopulationOptions options;
  options.threads = static_cast<int>(state.range(1));
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(amfg::run_population(spec, policy, N, 1, options));
  }
  state.SetItemsProcessed(state.iterations() * N);
}
BENCHMARK(BM_Population)->Args({1000, 1})->Args({10000, 1})->Args({10000, 4})
    ->Unit(benchmark::kMillisecond);

void BM_Exploitability(benchmark::State& state) {
  const auto spec = make_spec(2, 10, 5);
  const auto eq = amfg::solve_equilibrium(spec);
  amfg::AgentExploitabilityOptions options;
  options.n_replications = static_cast<int>(state.range(0));
  options.n_perturbations = 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        amfg::agent_exploitability(spec, eq, eq.solution.agent.K, options));
  }
}
BENCHMARK(BM_Exploitability)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_TpbvpOracle(benchmark::State& state) {
  const auto spec = make_spec(3, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(amfg::solve_tpbvp(spec));
  }
}
BENCHMARK(BM_TpbvpOracle)->Arg(5)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
