// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "amfg/equilibrium.hpp"
#include "amfg/io.hpp"
#include "amfg/linalg.hpp"
#include "amfg/meanfield.hpp"
#include "amfg/riccati.hpp"
#include "amfg/simulation.hpp"
#include "amfg/verification.hpp"
#include "instances.hpp"

namespace {

using namespace amfg;
namespace fs = std::filesystem;
using testing::S2Options;
using testing::s2_spec;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

std::string sci(double x) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << x;
  return s.str();
}

std::vector<GameSpec> fifty_instances() {
  return testing::random_valid_specs(50, 20240601);
}

bool run_criterion(int id, const std::string& name, double time_limit_s,
                   const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = elapsed < time_limit_s;
  const bool pass = out.pass && in_time;
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name
            << "):" << out.detail.str() << "; runtime " << elapsed << " s (limit "
            << time_limit_s << " s)" << (in_time ? "" : " [too slow]") << std::endl;
  return pass;
}

void criterion1(Outcome& out) {
  constexpr double tol = 1e-10;
  const GameSpec spec = s2_spec();
  const Equilibrium eq = solve_equilibrium(spec);
  const auto& sol = eq.solution;
  const auto& tr = eq.trajectories;
  const PopulationRun run =
      run_population(spec, make_population_policy(spec, eq), 1, 0);
  const double cost = evaluate_costs(run, spec).J_agent_mean;

  const std::vector<std::pair<const char*, double>> errors{
      {"P_hat_0", std::abs(sol.validity.P_hat[0](0, 0) - 2.5)},
      {"P_bar_0", std::abs(sol.global.P_bar[0](0, 0) - 1.6)},
      {"F_bar_0", std::abs(sol.global.F_bar[0](0, 0) - 0.6)},
      {"V*_0", std::abs(tr.V_star[0](0) - 0.2)},
      {"K_0[0]", std::abs(sol.agent.K[0](0, 0) - 0.5)},
      {"K_0[1]", std::abs(sol.agent.K[0](0, 1) - 0.0)},
      {"K_0[2]", std::abs(sol.agent.K[0](0, 2) - 0.1)},
      {"Zbar_0", std::abs(tr.Z_bar[0](0) - 1.0)},
      {"Zbar_1", std::abs(tr.Z_bar[1](0) - 0.6)},
      {"cost", std::abs(cost - 1.6)},
  };
  double worst = 0.0;
  for (const auto& [what, err] : errors) {
    worst = std::max(worst, err);
    out.require(err <= tol, what);
  }
  out.detail << " max abs error " << sci(worst) << " (tol 1e-10)";
}

void criterion2(Outcome& out) {
  double worst = 0.0;
  int count = 0;
  for (const GameSpec& spec : fifty_instances()) {
    worst = std::max(worst, tpbvp_oracle(spec, solve_equilibrium(spec).trajectories).error);
    ++count;
  }
  out.require(count >= 50, "instance count");
  out.require(worst <= 1e-9, "oracle deviation");
  out.detail << " " << count << " instances, max deviation " << sci(worst) << " (tol 1e-9)";
}

void criterion3(Outcome& out) {
  double worst_ratio = 0.0;
  for (const GameSpec& spec : fifty_instances()) {
    const auto tr = solve_equilibrium(spec).trajectories;
    double scale = 0.0;
    for (const auto& z : tr.Z_bar) scale = std::max(scale, z.norm());
    for (const auto& s : tr.s_bar) {
      const double ratio = scale > 0.0 ? s.norm() / scale : s.norm();
      worst_ratio = std::max(worst_ratio, ratio);
    }
  }
  out.require(worst_ratio <= 1e-12, "s_bar norm");
  out.detail << " max_t |s_bar_t| / max_t |Zbar_t| = " << sci(worst_ratio)
             << " (tol 1e-12)";
}

void criterion4(Outcome& out) {
  double zeta = 0.0, anti = 0.0, bridge = 0.0;
  for (const GameSpec& spec : fifty_instances()) {
    const Equilibrium eq = solve_equilibrium(spec);
    const auto& tr = eq.trajectories;
    for (std::size_t t = 0; t < tr.Z_bar.size(); ++t) {
      zeta = std::max(zeta, (tr.zeta_bar[t] - eq.solution.global.P_bar[t] * tr.Z_bar[t]).norm());
      anti = std::max(anti, (tr.zeta_bar[t] + tr.zeta0_bar[t]).norm());
    }
    bridge = std::max(bridge, smp_bridge_error(spec, tr));
  }
  out.require(zeta <= 1e-10, "zeta = P_bar Zbar");
  out.require(anti <= 1e-10, "zeta + zeta0 = 0");
  out.require(bridge <= 1e-10, "mean-control bridge");
  out.detail << " |zeta - P_bar Zbar| " << sci(zeta) << ", |zeta + zeta0| " << sci(anti)
             << ", bridge residual " << sci(bridge) << " (tol 1e-10)";
}

void criterion5(Outcome& out) {
  double worst = 0.0;
  bool all_concave = true;
  for (const GameSpec& spec : fifty_instances()) {
    const Equilibrium eq = solve_equilibrium(spec);
    const AdversaryBestResponse br =
        adversary_best_response(spec, eq.solution.agent.K, eq.trajectories.Z_bar,
                                eq.trajectories.V_star, AgentResponse::kOpenLoop);
    all_concave = all_concave && br.concave;
    if (br.concave) worst = std::max(worst, br.gap_inf);
  }
  out.require(all_concave, "concave on valid instances");
  out.require(worst <= 1e-8, "V_br = V*");

  S2Options o;
  o.S = 0.5;
  const GameSpec bad = s2_spec(o);
  const AdversaryBestResponse scalar_bad = best_response_from_quadratic(
      reduced_adversary_objective(bad, VectorSeq{Vector::Zero(1)}),
      VectorSeq{Vector::Zero(1)}, 1);
  out.require(!scalar_bad.concave, "scalar S = 0.5 reported indefinite");
  int invalid_flagged = 0;
  const int invalid_total = 20;
  for (int k = 0; k < invalid_total; ++k) {
    const GameSpec spec = testing::random_invalid_spec(5000 + static_cast<std::uint64_t>(k));
    const VectorSeq zero(static_cast<std::size_t>(spec.T()), Vector::Zero(spec.u()));
    const AdversaryBestResponse br = best_response_from_quadratic(
        reduced_adversary_objective(spec, zero),
        VectorSeq(zero.size(), Vector::Zero(spec.v())), spec.v());
    invalid_flagged += (!evaluate_validity(spec).valid() && !br.concave) ? 1 : 0;
  }
  out.require(invalid_flagged == invalid_total, "invalid instances reported indefinite");
  out.detail << " max |V_br - V*|_inf " << sci(worst) << " over 50 valid instances (tol 1e-8);"
             << " S = 0.5 Hessian max eigenvalue " << scalar_bad.max_hessian_eigenvalue
             << "; " << invalid_flagged << "/" << invalid_total
             << " random invalid instances indefinite";
}

void criterion6(Outcome& out) {
  double worst_gain = 0.0;
  for (const GameSpec& spec : fifty_instances()) {
    const Equilibrium eq = solve_equilibrium(spec);
    const MatrixSeq batch = batch_lqr_gains(eq.solution.augmented, spec.R);
    for (std::size_t t = 0; t < batch.size(); ++t) {
      worst_gain = std::max(worst_gain, (eq.solution.agent.K[t] - batch[t]).norm() /
                                            std::max(batch[t].norm(), 1.0));
    }
  }
  out.require(worst_gain <= 1e-9, "independent gains agree");

  S2Options noisy;
  noisy.Sigma_0 = 0.04;
  noisy.Sigma_w = 0.04;
  noisy.m = 10;
  double worst_z = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  int scalar_runs = 0;
  for (const GameSpec& spec : {s2_spec(), s2_spec(noisy)}) {
    const Equilibrium eq = solve_equilibrium(spec);
    for (double size : {0.1, 0.3, 1.0}) {
      AgentExploitabilityOptions opts;
      opts.n_perturbations = 64;
      opts.n_replications = 2000;
      opts.seed = 17;
      opts.relative_size = size;
      opts.threads = worker_threads();
      const AgentExploitability ex = agent_exploitability(spec, eq, eq.solution.agent.K, opts);
      out.require(ex.pass(), "exploitability verdict");
      out.require(ex.control_gap == 0.0, "zero-perturbation control");
      out.require(ex.perturbations.size() == 64, "perturbation count");
      for (const auto& p : ex.perturbations) {
        out.require(p.mean_gap > 0.0, "strictly positive gap");
        min_gap = std::min(min_gap, p.mean_gap);
      }
      worst_z = std::min(worst_z, ex.worst_z_score);
      ++scalar_runs;
    }
  }

  GameSpec random = testing::random_valid_spec(31337);
  const Equilibrium req = solve_equilibrium(random);
  AgentExploitabilityOptions ropts;
  ropts.seed = 99;
  ropts.threads = worker_threads();
  const AgentExploitability rex = agent_exploitability(random, req, req.solution.agent.K, ropts);
  out.require(rex.pass(), "random instance exploitability");

  out.detail << " gain deviation " << sci(worst_gain) << " (tol 1e-9); " << scalar_runs
             << " scalar runs x 64 perturbations x 2000 rollouts, min gap " << sci(min_gap)
             << " (> 0), worst gap/se " << sci(worst_z) << "; random instance agent_gap "
             << sci(rex.agent_gap) << " with se " << sci(rex.agent_gap_std_error)
             << " (>= -3 se)";
}

void criterion7(Outcome& out) {
  S2Options o;
  o.Sigma_0 = 0.04;
  o.Sigma_w = 0.04;
  o.m = 10;
  const GameSpec spec = s2_spec(o);
  const Equilibrium eq = solve_equilibrium(spec);
  const std::vector<int> sizes{100, 1000, 10000};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 20; ++s) seeds.push_back(s);
  const ConsistencyStudy study = consistency_study(
      spec, make_population_policy(spec, eq), sizes, seeds, worker_threads());
  for (std::size_t k = 0; k < study.reports.size(); ++k) {
    const auto& r = study.reports[k];
    out.require(r.pass, "CLT bound at N=" + std::to_string(sizes[k]));
    out.detail << " N=" << sizes[k] << ": median raw " << sci(r.median_raw_error)
               << ", median sqrt(N) err " << sci(r.median_normalized_error) << " <= 4 x "
               << sci(r.median_cross_sectional_std) << ";";
  }
  out.require(study.raw_error_decreasing, "median raw error decreasing");
  out.detail << " raw error decreasing: " << (study.raw_error_decreasing ? "yes" : "no");
}

void criterion8(Outcome& out) {
  testing::RandomSpecOptions zero_qbar;
  zero_qbar.zero_qbar = true;
  double generator = 0.0;
  for (const GameSpec& spec : testing::random_valid_specs(50, 777, zero_qbar)) {
    const GlobalRiccati g = solve_global_riccati(spec);
    const LocalRiccati l = solve_local_riccati(spec);
    generator = std::max(generator, linalg::max_deviation(g.F_bar, l.F1_tilde));
  }
  out.require(generator <= 1e-12, "F1_tilde = F_bar");

  double worst_var = 0.0;
  for (int m : {1, 10}) {
    S2Options o;
    o.Sigma_0 = 0.04;
    o.Sigma_w = 0.04;
    o.m = m;
    const GameSpec spec = s2_spec(o);
    const Equilibrium eq = solve_equilibrium(spec);
    const LocalMFSampler sampler(spec, eq.solution.local, eq.trajectories.local_drift);
    const int R = 10000;
    double sum = 0.0, sq = 0.0;
    for (int r = 0; r < R; ++r) {
      const double y = sampler.sample(2024, static_cast<std::uint64_t>(r)).Y[0](0);
      sum += y;
      sq += y * y;
    }
    const double mean = sum / R;
    const double var = (sq - R * mean * mean) / (R - 1);
    const double rel = std::abs(var / (0.04 / m) - 1.0);
    worst_var = std::max(worst_var, rel);
  }
  out.require(worst_var <= 0.1, "Var(Y_0) within 10% of Sigma_0 / m");

  double drift = 0.0;
  for (const GameSpec& spec : fifty_instances()) {
    const GlobalRiccati g = solve_global_riccati(spec);
    const LocalRiccati l = solve_local_riccati(spec);
    const VectorSeq Z = propagate_global_mf(g.F_bar, spec.mu_0);
    const LocalOffsets off = compute_local_offsets(spec, g, l, Z);
    const MatrixSeq closed = local_offset_gains_closed_form(spec, g, l);
    for (std::size_t t = 0; t < off.drift.size(); ++t) {
      const double scale = 1.0 + off.drift[t].norm();
      drift = std::max(drift, (off.drift[t] - off.F2_tilde[t] * Z[t]).norm() / scale);
      drift = std::max(drift, (off.drift[t] - closed[t] * Z[t]).norm() / scale);
    }
  }
  out.require(drift <= 1e-10, "drift = F2_tilde Zbar");
  out.detail << " |F1_tilde - F_bar| " << sci(generator) << " (tol 1e-12); Var(Y_0) relative error "
             << sci(worst_var) << " (tol 0.1, 1e4 samples); drift vs F2_tilde Zbar "
             << sci(drift) << " (tol 1e-10)";
}

struct CliResult {
  int code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(AMFG_CLI) + " " + args + " 2>&1";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void criterion9(Outcome& out) {
  const fs::path dir =
      fs::temp_directory_path() / ("amfg_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  S2Options bad_opts;
  bad_opts.S = 0.5;
  write_text_file(dir / "good.json", serialize_spec(s2_spec()));
  write_text_file(dir / "bad.json", serialize_spec(s2_spec(bad_opts)));

  const CliResult bad = run_cli("solve --spec " + (dir / "bad.json").string() + " --out " +
                                (dir / "bad").string());
  const CliResult good = run_cli("solve --spec " + (dir / "good.json").string() + " --out " +
                                 (dir / "good").string());
  out.require(bad.code == 2, "S = 0.5 exit code 2");
  out.require(bad.output.find("margin -0.5") != std::string::npos, "margin -0.5 printed");
  out.require(good.code == 0, "S = 3 exit code 0");
  out.require(good.output.find("validity margin t=0: 2\n") != std::string::npos,
              "margin 2 printed");
  const double margin = solve_validation_riccati(s2_spec()).margins[0];
  out.require(std::abs(margin - 2.0) <= 1e-12, "margin value");
  out.detail << " S = 0.5 -> exit " << bad.code << ", S = 3 -> exit " << good.code
             << " with margin " << margin;
  fs::remove_all(dir);
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    double limit;
    void (*body)(Outcome&);
  };
  const Entry entries[] = {
      {1, "scalar ground truth", 1.0, criterion1},
      {2, "forward-backward oracle", 10.0, criterion2},
      {3, "global offset vanishes", 10.0, criterion3},
      {4, "co-state antisymmetry and mean bridge", 10.0, criterion4},
      {5, "adversary optimality", 5.0, criterion5},
      {6, "agent optimality", 60.0, criterion6},
      {7, "finite-population consistency", 120.0, criterion7},
      {8, "local mean-field law", 10.0, criterion8},
      {9, "validity gate", 10.0, criterion9},
  };
  int failures = 0;
  for (const auto& e : entries) {
    if (!run_criterion(e.id, e.name, e.limit, e.body)) ++failures;
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << " ("
            << failures << " failing)" << std::endl;
  return failures == 0 ? 0 : 1;
}
