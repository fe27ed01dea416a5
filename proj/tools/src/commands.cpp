#include "commands.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amfg/equilibrium.hpp"
#include "amfg/error.hpp"
#include "amfg/io.hpp"
#include "amfg/model.hpp"
#include "amfg/parallel.hpp"
#include "amfg/riccati.hpp"
#include "amfg/simulation.hpp"
#include "amfg/verification.hpp"
#include "manifest.hpp"

#ifndef AMFG_VERSION
#define AMFG_VERSION "0.0.0"
#endif

namespace amfg::cli {

namespace fs = std::filesystem;

namespace {

struct SolveArgs {
  std::string spec;
  std::string out;
};

struct SeedArgs {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  int seed_count = 0;

  // Explicit list wins; otherwise seed_count consecutive seeds from `seed`.
  std::vector<std::uint64_t> expand(std::size_t default_count) const {
    if (!seeds.empty()) return seeds;
    const std::size_t n =
        seed_count > 0 ? static_cast<std::size_t>(seed_count) : default_count;
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(seed + i);
    return out;
  }
};

struct SimulateArgs {
  std::string spec;
  std::string solution;
  std::string out;
  int n_agents = 0;
  SeedArgs seeds;
  bool reactive = false;
  bool agents = false;
  int threads = 1;
};

struct VerifyArgs {
  std::string spec;
  std::string solution;
  std::string out;
  std::vector<std::string> checks{"tpbvp", "adversary", "agent", "consistency"};
  int replications = 2000;
  int perturbations = 64;
  std::vector<int> n_agents;
  SeedArgs seeds;
  int threads = 1;
};

struct ExportArgs {
  std::string solution;
  std::vector<std::string> series;
  std::string format = "csv";
  std::string out;
};

fs::path solution_file(const std::string& path) {
  const fs::path p(path);
  return fs::is_directory(p) ? p / "solution.json" : p;
}

GameSpec read_spec(const std::string& path) {
  return validate_spec(load_spec_file(path));
}

StoredEquilibrium read_solution_for(const GameSpec& spec, const std::string& path) {
  StoredEquilibrium stored = load_equilibrium_file(solution_file(path));
  if (!identical(stored.spec, spec)) {
    throw Error("solution " + solution_file(path).string() +
                " was computed from a different spec");
  }
  return stored;
}

RunManifest base_manifest(const std::string& command, const std::string& spec,
                          const std::string& out) {
  RunManifest m;
  m.command = command;
  m.spec_path = fs::absolute(spec);
  m.spec_sha256 = sha256_file(spec);
  m.output_dir = fs::absolute(out);
  m.tool_version = AMFG_VERSION;
  return m;
}

void write_table(const SeriesTable& table, const fs::path& stem) {
  std::ostringstream csv;
  table.write_csv(csv);
  write_text_file(fs::path(stem).replace_extension(".csv"), csv.str());
  write_text_file(fs::path(stem).replace_extension(".json"), table.to_json());
}

std::string validity_json(const ValidityReport& report) {
  std::ostringstream out;
  out << "{\n  \"valid\": " << (report.valid() ? "true" : "false")
      << ",\n  \"threshold\": " << format_double(kValidityThreshold);
  if (report.failed_step) {
    out << ",\n  \"failed_step\": " << *report.failed_step
        << ",\n  \"failed_margin\": " << format_double(report.failed_margin);
  }
  out << ",\n  \"margins\": [";
  for (std::size_t t = 0; t < report.riccati.margins.size(); ++t) {
    out << (t ? ", " : "") << format_double(report.riccati.margins[t]);
  }
  out << "]\n}\n";
  return out.str();
}

int cmd_solve(const SolveArgs& args) {
  RunManifest manifest = base_manifest("solve", args.spec, args.out);
  const GameSpec spec = read_spec(args.spec);
  write_manifest(manifest);

  const ValidityReport validity = evaluate_validity(spec);
  write_text_file(fs::path(args.out) / "validity.json", validity_json(validity));
  if (!validity.valid()) {
    std::cerr << "validity condition violated at t=" << *validity.failed_step
              << ": margin " << format_double(validity.failed_margin)
              << " (must exceed " << format_double(kValidityThreshold) << ")\n";
    return kValidityFailure;
  }
  for (std::size_t t = 0; t < validity.riccati.margins.size(); ++t) {
    std::cout << "validity margin t=" << t << ": "
              << format_double(validity.riccati.margins[t]) << '\n';
  }

  const Equilibrium eq = solve_equilibrium(spec);
  const fs::path out(args.out);
  write_text_file(out / "solution.json", equilibrium_to_json(spec, eq));
  write_table(trajectory_table(eq), out / "trajectories");
  write_table(matrix_table(eq), out / "matrices");
  std::cout << "wrote " << (out / "solution.json").string() << '\n';
  return kOk;
}

int cmd_simulate(const SimulateArgs& args) {
  RunManifest manifest = base_manifest("simulate", args.spec, args.out);
  const GameSpec spec = read_spec(args.spec);
  const StoredEquilibrium stored = read_solution_for(spec, args.solution);
  if (args.n_agents % spec.neighborhood_size != 0) {
    throw Error("--n-agents " + std::to_string(args.n_agents) +
                " is not a multiple of neighborhood_size " +
                std::to_string(spec.neighborhood_size));
  }
  const std::vector<std::uint64_t> seeds = args.seeds.expand(1);
  manifest.solution_path = fs::absolute(solution_file(args.solution));
  manifest.seeds = seeds;
  manifest.n_agents = args.n_agents;
  manifest.neighborhood_size = spec.neighborhood_size;
  manifest.threads = args.threads;
  write_manifest(manifest);

  const PopulationPolicy policy = make_population_policy(spec, stored.equilibrium);
  PopulationOptions options;
  options.threads = args.threads;
  options.adversary =
      args.reactive ? AdversaryMode::kReactive : AdversaryMode::kPrecomputed;

  for (std::uint64_t seed : seeds) {
    const PopulationRun run =
        run_population(spec, policy, args.n_agents, seed, options);
    const CostReport costs = evaluate_costs(run, spec);
    const fs::path dir = fs::path(args.out) / ("seed_" + std::to_string(seed));
    std::ostringstream csv;
    run_table(run, args.agents).write_csv(csv);
    write_text_file(dir / "trajectories.csv", csv.str());
    write_text_file(dir / "costs.json", cost_report_to_json(costs, run));
    std::cout << "seed " << seed << ": mean agent cost "
              << format_double(costs.J_agent_mean) << '\n';
  }
  return kOk;
}

int cmd_verify(const VerifyArgs& args) {
  const GameSpec spec = read_spec(args.spec);
  const StoredEquilibrium stored = read_solution_for(spec, args.solution);

  VerificationOptions options;
  auto wants = [&](const char* name) {
    return std::find(args.checks.begin(), args.checks.end(), name) !=
           args.checks.end();
  };
  for (const auto& c : args.checks) {
    if (c != "tpbvp" && c != "adversary" && c != "agent" && c != "consistency") {
      throw CLI::ValidationError("--checks", "unknown check '" + c + "'");
    }
  }
  options.tpbvp = wants("tpbvp");
  options.adversary = wants("adversary");
  options.agent = wants("agent");
  options.consistency = wants("consistency");
  options.agent_options.n_replications = args.replications;
  options.agent_options.n_perturbations = args.perturbations;
  options.threads = args.threads;
  options.seeds = args.seeds.expand(20);
  options.agent_options.seed = options.seeds.front();
  options.population_sizes = args.n_agents;
  if (options.population_sizes.empty()) {
    options.population_sizes = {100 * spec.neighborhood_size};
  }
  for (int N : options.population_sizes) {
    if (N <= 0 || N % spec.neighborhood_size != 0) {
      throw Error("--n-agents " + std::to_string(N) +
                  " is not a positive multiple of neighborhood_size");
    }
  }

  if (!args.out.empty()) {
    RunManifest manifest = base_manifest("verify", args.spec, args.out);
    manifest.solution_path = fs::absolute(solution_file(args.solution));
    manifest.seeds = options.seeds;
    manifest.n_agents = options.consistency ? options.population_sizes.back() : 0;
    manifest.neighborhood_size = spec.neighborhood_size;
    manifest.replications = options.agent ? args.replications : 0;
    manifest.perturbations = options.agent ? args.perturbations : 0;
    manifest.checks = args.checks;
    manifest.threads = args.threads;
    write_manifest(manifest);
  }

  const VerificationReport report =
      verify_equilibrium(spec, stored.equilibrium, options);
  const std::string json = verification_report_to_json(report);
  if (args.out.empty()) {
    std::cout << json;
  } else {
    write_text_file(fs::path(args.out) / "report.json", json);
  }
  for (const auto& v : report.verdicts) {
    std::cerr << (v.pass ? "PASS " : "FAIL ") << v.check << ": "
              << format_double(v.value) << " (threshold "
              << format_double(v.threshold) << ")\n";
  }
  return report.pass() ? kOk : kVerdictFailure;
}

int cmd_export(const ExportArgs& args) {
  const StoredEquilibrium stored = load_equilibrium_file(solution_file(args.solution));
  SeriesTable table = trajectory_table(stored.equilibrium);
  table.append(matrix_table(stored.equilibrium));
  if (!args.series.empty()) {
    const std::vector<std::string> known = table.series_names();
    for (const auto& name : args.series) {
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw CLI::ValidationError("--series", "unknown series '" + name + "'");
      }
    }
    table = table.select(args.series);
  }
  std::string content;
  if (args.format == "json") {
    content = table.to_json();
  } else {
    std::ostringstream csv;
    table.write_csv(csv);
    content = csv.str();
  }
  if (args.out.empty()) {
    std::cout << content;
  } else {
    write_text_file(args.out, content);
  }
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Adversarial LQ mean-field games on multigraphs"};
  app.set_version_flag("--version", AMFG_VERSION);
  app.require_subcommand(1);
  const int default_threads = default_thread_count();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Compute the equilibrium");
  solve_cmd->add_option("--spec", solve.spec, "Game spec (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--out", solve.out, "Output directory")->required();

  SimulateArgs sim;
  sim.threads = default_threads;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a finite population");
  sim_cmd->add_option("--spec", sim.spec, "Game spec (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--solution", sim.solution, "solution.json or its directory")
      ->required()
      ->check(CLI::ExistingPath);
  sim_cmd->add_option("--n-agents", sim.n_agents, "Population size N")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* sim_seed = sim_cmd->add_option("--seed", sim.seeds.seed, "Base seed");
  auto* sim_seeds = sim_cmd->add_option("--seeds", sim.seeds.seeds,
                                        "Explicit seed list")
                        ->delimiter(',')
                        ->excludes(sim_seed);
  sim_cmd->add_option("--seed-count", sim.seeds.seed_count,
                      "Number of consecutive seeds from --seed")
      ->check(CLI::PositiveNumber)
      ->excludes(sim_seeds);
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();
  sim_cmd->add_flag("--reactive-adversary", sim.reactive,
                    "Adversary reacts to the empirical mean field");
  sim_cmd->add_flag("--agents", sim.agents, "Also export per-agent states and controls");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  VerifyArgs ver;
  ver.threads = default_threads;
  auto* ver_cmd = app.add_subcommand("verify", "Verify an equilibrium");
  ver_cmd->add_option("--spec", ver.spec, "Game spec (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  ver_cmd->add_option("--solution", ver.solution, "solution.json or its directory")
      ->required()
      ->check(CLI::ExistingPath);
  ver_cmd->add_option("--checks", ver.checks,
                      "Subset of tpbvp,adversary,agent,consistency")
      ->delimiter(',');
  ver_cmd->add_option("--replications", ver.replications, "Rollouts per policy")
      ->check(CLI::Range(2, 100000000));
  ver_cmd->add_option("--perturbations", ver.perturbations, "Perturbed policies")
      ->check(CLI::NonNegativeNumber);
  ver_cmd->add_option("--n-agents", ver.n_agents,
                      "Population sizes for the consistency check")
      ->delimiter(',');
  auto* ver_seed = ver_cmd->add_option("--seed", ver.seeds.seed, "Base seed");
  auto* ver_seeds = ver_cmd->add_option("--seeds", ver.seeds.seeds,
                                        "Explicit seed list")
                        ->delimiter(',')
                        ->excludes(ver_seed);
  ver_cmd->add_option("--seed-count", ver.seeds.seed_count,
                      "Number of consecutive seeds from --seed (default 20)")
      ->check(CLI::PositiveNumber)
      ->excludes(ver_seeds);
  ver_cmd->add_option("--out", ver.out, "Output directory (report to stdout if omitted)");
  ver_cmd->add_option("--threads", ver.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  ExportArgs exp;
  auto* exp_cmd = app.add_subcommand("export", "Export solution series for plotting");
  exp_cmd->add_option("--solution", exp.solution, "solution.json or its directory")
      ->required()
      ->check(CLI::ExistingPath);
  exp_cmd->add_option("--series", exp.series, "Series names (default: all)")
      ->delimiter(',');
  exp_cmd->add_option("--format", exp.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  exp_cmd->add_option("--out", exp.out, "Output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageOrIo;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*ver_cmd) return cmd_verify(ver);
    if (*exp_cmd) return cmd_export(exp);
  } catch (const ValidityConditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidityFailure;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageOrIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageOrIo;
  }
  return kUsageOrIo;
}

}  // namespace amfg::cli
