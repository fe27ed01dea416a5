#include "amfg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <algorithm>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "amfg/error.hpp"

namespace amfg {

using json = nlohmann::json;

namespace {

std::string index_label(Eigen::Index i) { return std::to_string(i); }

std::string index_label(Eigen::Index i, Eigen::Index j) {
  return std::to_string(i) + "." + std::to_string(j);
}

json number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json seq_json(const VectorSeq& seq) {
  json out = json::array();
  for (const auto& v : seq) out.push_back(vector_json(v));
  return out;
}

json seq_json(const MatrixSeq& seq) {
  json out = json::array();
  for (const auto& m : seq) out.push_back(matrix_json(m));
  return out;
}

json doubles_json(const std::vector<double>& values) {
  json out = json::array();
  for (double x : values) out.push_back(number(x));
  return out;
}

const json& field(const json& obj, const char* key, const std::string& path) {
  const std::string where = path.empty() ? key : path + "." + key;
  if (!obj.is_object() || !obj.contains(key)) {
    throw SpecError(where, "missing field");
  }
  return obj.at(key);
}

std::string child(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

double read_double(const json& node, const std::string& path) {
  if (node.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!node.is_number()) throw SpecError(path, "expected a number");
  return node.get<double>();
}

Vector read_vector(const json& node, const std::string& path) {
  if (!node.is_array()) throw SpecError(path, "expected an array");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) =
        read_double(node[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix read_matrix(const json& node, const std::string& path) {
  if (!node.is_array()) throw SpecError(path, "expected a nested array");
  const auto rows = static_cast<Eigen::Index>(node.size());
  const auto cols =
      rows == 0 ? 0 : static_cast<Eigen::Index>(node[0].is_array() ? node[0].size() : 0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rpath = path + "[" + std::to_string(i) + "]";
    const json& row = node[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw SpecError(rpath, "ragged matrix row");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = read_double(row[static_cast<std::size_t>(j)],
                            rpath + "[" + std::to_string(j) + "]");
    }
  }
  return m;
}

VectorSeq read_vector_seq(const json& obj, const char* key, const std::string& path) {
  const json& node = field(obj, key, path);
  const std::string where = child(path, key);
  if (!node.is_array()) throw SpecError(where, "expected an array");
  VectorSeq out;
  for (std::size_t t = 0; t < node.size(); ++t) {
    out.push_back(read_vector(node[t], where + "[" + std::to_string(t) + "]"));
  }
  return out;
}

MatrixSeq read_matrix_seq(const json& obj, const char* key, const std::string& path) {
  const json& node = field(obj, key, path);
  const std::string where = child(path, key);
  if (!node.is_array()) throw SpecError(where, "expected an array");
  MatrixSeq out;
  for (std::size_t t = 0; t < node.size(); ++t) {
    out.push_back(read_matrix(node[t], where + "[" + std::to_string(t) + "]"));
  }
  return out;
}

std::vector<double> read_doubles(const json& obj, const char* key,
                                 const std::string& path) {
  const Vector v = read_vector(field(obj, key, path), child(path, key));
  return {v.data(), v.data() + v.size()};
}

}  // namespace

// ---------------------------------------------------------------------------
// SeriesTable

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

void SeriesTable::add(const std::string& name, const VectorSeq& seq, int t0) {
  for (std::size_t t = 0; t < seq.size(); ++t) {
    for (Eigen::Index i = 0; i < seq[t].size(); ++i) {
      rows_.push_back({t0 + static_cast<int>(t), index_label(i), seq[t](i), name});
    }
  }
}

void SeriesTable::add(const std::string& name, const MatrixSeq& seq, int t0) {
  for (std::size_t t = 0; t < seq.size(); ++t) {
    for (Eigen::Index i = 0; i < seq[t].rows(); ++i) {
      for (Eigen::Index j = 0; j < seq[t].cols(); ++j) {
        rows_.push_back(
            {t0 + static_cast<int>(t), index_label(i, j), seq[t](i, j), name});
      }
    }
  }
}

void SeriesTable::add(const std::string& name, std::span<const double> values,
                      int t0) {
  for (std::size_t t = 0; t < values.size(); ++t) {
    rows_.push_back({t0 + static_cast<int>(t), "0", values[t], name});
  }
}

void SeriesTable::append(const SeriesTable& other) {
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::vector<std::string> SeriesTable::series_names() const {
  std::vector<std::string> names;
  for (const auto& r : rows_) {
    if (std::find(names.begin(), names.end(), r.series) == names.end()) {
      names.push_back(r.series);
    }
  }
  return names;
}

SeriesTable SeriesTable::select(std::span<const std::string> names) const {
  SeriesTable out;
  for (const auto& r : rows_) {
    if (std::find(names.begin(), names.end(), r.series) != names.end()) {
      out.rows_.push_back(r);
    }
  }
  return out;
}

void SeriesTable::write_csv(std::ostream& out) const {
  out << "t,component,value,series\n";
  for (const auto& r : rows_) {
    out << r.t << ',' << r.component << ',' << format_double(r.value) << ','
        << r.series << '\n';
  }
}

std::string SeriesTable::to_json() const {
  json doc = json::object();
  for (const auto& name : series_names()) {
    doc[name] = {{"t", json::array()},
                 {"component", json::array()},
                 {"value", json::array()}};
  }
  for (const auto& r : rows_) {
    json& s = doc[r.series];
    s["t"].push_back(r.t);
    s["component"].push_back(r.component);
    s["value"].push_back(number(r.value));
  }
  return doc.dump(2) + "\n";
}

SeriesTable trajectory_table(const Equilibrium& eq) {
  const auto& tr = eq.trajectories;
  SeriesTable table;
  table.add("Z_bar", tr.Z_bar);
  table.add("V_star", tr.V_star);
  table.add("U_bar", mean_agent_controls(eq.solution.agent.K, tr.Z_bar));
  table.add("zeta_bar", tr.zeta_bar);
  table.add("zeta0_bar", tr.zeta0_bar);
  table.add("s_bar", tr.s_bar);
  table.add("s_tilde", tr.s_tilde);
  table.add("local_drift", tr.local_drift);
  return table;
}

SeriesTable matrix_table(const Equilibrium& eq) {
  const auto& sol = eq.solution;
  SeriesTable table;
  table.add("validity_margin", sol.validity.margins);
  table.add("P_hat", sol.validity.P_hat);
  table.add("P_bar", sol.global.P_bar);
  table.add("E", sol.global.E);
  table.add("F_bar", sol.global.F_bar);
  table.add("P_tilde", sol.local.P_tilde);
  table.add("E_tilde", sol.local.E_tilde);
  table.add("H_tilde", sol.local.H_tilde);
  table.add("F1_tilde", sol.local.F1_tilde);
  table.add("F2_tilde", eq.trajectories.F2_tilde);
  table.add("K", sol.agent.K);
  table.add("P_star", sol.agent.P_star);
  return table;
}

SeriesTable run_table(const PopulationRun& run, bool include_agents) {
  SeriesTable table;
  table.add("Zbar_emp", run.Zbar_emp);
  table.add("V_applied", run.V_applied);
  table.add("Y_emp", run.Y_emp);
  if (include_agents) {
    table.add("Z", run.Z);
    table.add("U", run.U);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Equilibrium persistence

std::string equilibrium_to_json(const GameSpec& spec, const Equilibrium& eq) {
  const auto& sol = eq.solution;
  const auto& tr = eq.trajectories;
  json doc;
  doc["spec"] = json::parse(serialize_spec(spec));
  doc["validity"] = {{"P_hat", seq_json(sol.validity.P_hat)},
                     {"margins", doubles_json(sol.validity.margins)}};
  doc["global"] = {{"P_bar", seq_json(sol.global.P_bar)},
                   {"E", seq_json(sol.global.E)},
                   {"F_bar", seq_json(sol.global.F_bar)}};
  doc["local"] = {{"P_tilde", seq_json(sol.local.P_tilde)},
                  {"E_tilde", seq_json(sol.local.E_tilde)},
                  {"H_tilde", seq_json(sol.local.H_tilde)},
                  {"F1_tilde", seq_json(sol.local.F1_tilde)}};
  doc["augmented"] = {{"block", sol.augmented.block},
                      {"A_aug", seq_json(sol.augmented.A_aug)},
                      {"B_aug", matrix_json(sol.augmented.B_aug)},
                      {"Q_aug", seq_json(sol.augmented.Q_aug)},
                      {"Sigma_w_aug", seq_json(sol.augmented.Sigma_w_aug)}};
  doc["agent"] = {{"P_star", seq_json(sol.agent.P_star)},
                  {"K", seq_json(sol.agent.K)}};
  doc["trajectories"] = {{"Z_bar", seq_json(tr.Z_bar)},
                         {"V_star", seq_json(tr.V_star)},
                         {"zeta_bar", seq_json(tr.zeta_bar)},
                         {"zeta0_bar", seq_json(tr.zeta0_bar)},
                         {"s_bar", seq_json(tr.s_bar)},
                         {"s_tilde", seq_json(tr.s_tilde)},
                         {"local_drift", seq_json(tr.local_drift)},
                         {"F2_tilde", seq_json(tr.F2_tilde)}};
  return doc.dump(2) + "\n";
}

StoredEquilibrium equilibrium_from_json(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw SpecError("", std::string("invalid JSON: ") + e.what());
  }

  StoredEquilibrium out;
  out.spec = validate_spec(load_spec(field(doc, "spec", "").dump()));
  auto& sol = out.equilibrium.solution;
  auto& tr = out.equilibrium.trajectories;

  const json& val = field(doc, "validity", "");
  sol.validity.P_hat = read_matrix_seq(val, "P_hat", "validity");
  sol.validity.margins = read_doubles(val, "margins", "validity");

  const json& glob = field(doc, "global", "");
  sol.global.P_bar = read_matrix_seq(glob, "P_bar", "global");
  sol.global.E = read_matrix_seq(glob, "E", "global");
  sol.global.F_bar = read_matrix_seq(glob, "F_bar", "global");

  const json& loc = field(doc, "local", "");
  sol.local.P_tilde = read_matrix_seq(loc, "P_tilde", "local");
  sol.local.E_tilde = read_matrix_seq(loc, "E_tilde", "local");
  sol.local.H_tilde = read_matrix_seq(loc, "H_tilde", "local");
  sol.local.F1_tilde = read_matrix_seq(loc, "F1_tilde", "local");

  const json& aug = field(doc, "augmented", "");
  const json& block = field(aug, "block", "augmented");
  if (!block.is_number_integer()) throw SpecError("augmented.block", "expected an integer");
  sol.augmented.block = block.get<int>();
  sol.augmented.A_aug = read_matrix_seq(aug, "A_aug", "augmented");
  sol.augmented.B_aug = read_matrix(field(aug, "B_aug", "augmented"), "augmented.B_aug");
  sol.augmented.Q_aug = read_matrix_seq(aug, "Q_aug", "augmented");
  sol.augmented.Sigma_w_aug = read_matrix_seq(aug, "Sigma_w_aug", "augmented");

  const json& agent = field(doc, "agent", "");
  sol.agent.P_star = read_matrix_seq(agent, "P_star", "agent");
  sol.agent.K = read_matrix_seq(agent, "K", "agent");

  const json& traj = field(doc, "trajectories", "");
  tr.Z_bar = read_vector_seq(traj, "Z_bar", "trajectories");
  tr.V_star = read_vector_seq(traj, "V_star", "trajectories");
  tr.zeta_bar = read_vector_seq(traj, "zeta_bar", "trajectories");
  tr.zeta0_bar = read_vector_seq(traj, "zeta0_bar", "trajectories");
  tr.s_bar = read_vector_seq(traj, "s_bar", "trajectories");
  tr.s_tilde = read_vector_seq(traj, "s_tilde", "trajectories");
  tr.local_drift = read_vector_seq(traj, "local_drift", "trajectories");
  tr.F2_tilde = read_matrix_seq(traj, "F2_tilde", "trajectories");

  check_equilibrium_shapes(out.spec, out.equilibrium);
  return out;
}

StoredEquilibrium load_equilibrium_file(const std::filesystem::path& path) {
  return equilibrium_from_json(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json breakdown_json(const CostBreakdown& b) {
  return {{"state", number(b.state)},
          {"local_consensus", number(b.local_consensus)},
          {"global_consensus", number(b.global_consensus)},
          {"control", number(b.control)},
          {"adversary_bonus", number(b.adversary_bonus)},
          {"terminal", number(b.terminal)},
          {"total", number(b.total())}};
}

const char* response_name(AgentResponse r) {
  return r == AgentResponse::kOpenLoop ? "open_loop" : "feedback";
}

json adversary_json(const AdversaryBestResponse& br) {
  return {{"agent_response", response_name(br.response)},
          {"concave", br.concave},
          {"max_hessian_eigenvalue", number(br.max_hessian_eigenvalue)},
          {"V_br", seq_json(br.V_br)},
          {"gap_inf", number(br.gap_inf)},
          {"objective_gain", number(br.objective_gain)},
          {"adversary_cost_difference", number(br.adversary_cost_difference)},
          {"stationarity_residual", number(br.stationarity_residual)},
          {"stationarity_tolerance", number(br.stationarity_tolerance)}};
}

}  // namespace

std::string cost_report_to_json(const CostReport& report, const PopulationRun& run) {
  json doc;
  doc["N"] = run.N;
  doc["m"] = run.m;
  doc["seed"] = run.seed;
  doc["J_agent_mean"] = number(report.J_agent_mean);
  doc["J_adversary"] = number(report.J_adversary);
  doc["mean_breakdown"] = breakdown_json(report.mean_breakdown);
  doc["J_agent"] = doubles_json(report.J_agent);
  return doc.dump(2) + "\n";
}

std::string verification_report_to_json(const VerificationReport& report) {
  json doc;
  doc["pass"] = report.pass();
  if (report.tpbvp) {
    doc["tpbvp"] = {{"error", number(report.tpbvp->error)},
                    {"Z_bar_direct", seq_json(report.tpbvp->direct.Z_bar)},
                    {"zeta_bar_direct", seq_json(report.tpbvp->direct.zeta_bar)}};
  }
  if (report.adversary) {
    doc["adversary"] = adversary_json(*report.adversary);
    if (report.adversary_feedback) {
      doc["adversary"]["feedback_diagnostic"] =
          adversary_json(*report.adversary_feedback);
    }
  }
  if (report.agent) {
    const auto& a = *report.agent;
    json perts = json::array();
    for (const auto& p : a.perturbations) {
      perts.push_back({{"family", p.family},
                       {"mean_gap", number(p.mean_gap)},
                       {"std_error", number(p.std_error)}});
    }
    doc["agent"] = {{"gain_deviation", number(a.gain_deviation)},
                    {"gain_tolerance", number(a.gain_tolerance)},
                    {"gains_agree", a.gains_agree},
                    {"control_gap", number(a.control_gap)},
                    {"agent_gap", number(a.agent_gap)},
                    {"agent_gap_std_error", number(a.agent_gap_std_error)},
                    {"worst_z_score", number(a.worst_z_score)},
                    {"statistical_pass", a.statistical_pass},
                    {"deviation_class", a.deviation_class},
                    {"perturbations", std::move(perts)}};
  }
  if (report.consistency) {
    const auto& study = *report.consistency;
    json reports = json::array();
    for (std::size_t k = 0; k < study.reports.size(); ++k) {
      const auto& c = study.reports[k];
      json runs = json::array();
      for (const auto& r : c.runs) {
        runs.push_back({{"seed", r.seed},
                        {"N", r.N},
                        {"raw_error", number(r.raw_error)},
                        {"normalized_error", number(r.normalized_error)},
                        {"cross_sectional_std", number(r.cross_sectional_std)},
                        {"neighborhood_average_error",
                         number(r.neighborhood_average_error)}});
      }
      reports.push_back(
          {{"N", study.population_sizes[k]},
           {"median_raw_error", number(c.median_raw_error)},
           {"max_raw_error", number(c.max_raw_error)},
           {"median_normalized_error", number(c.median_normalized_error)},
           {"max_normalized_error", number(c.max_normalized_error)},
           {"median_cross_sectional_std", number(c.median_cross_sectional_std)},
           {"bound_factor", number(c.bound_factor)},
           {"roundoff_floor", number(c.roundoff_floor)},
           {"bound", number(c.bound(study.population_sizes[k]))},
           {"pass", c.pass},
           {"runs", std::move(runs)}});
    }
    doc["consistency"] = {{"raw_error_decreasing", study.raw_error_decreasing},
                          {"pass", study.pass},
                          {"populations", std::move(reports)}};
  }
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back({{"check", v.check},
                        {"pass", v.pass},
                        {"value", number(v.value)},
                        {"threshold", number(v.threshold)},
                        {"detail", v.detail}});
  }
  doc["verdicts"] = std::move(verdicts);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("cannot read " + path.string());
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace amfg
