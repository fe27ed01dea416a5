#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amfg/equilibrium.hpp"
#include "amfg/model.hpp"
#include "amfg/simulation.hpp"
#include "amfg/types.hpp"
#include "amfg/verification.hpp"

namespace amfg {

// ---------------------------------------------------------------------------
// Long-format series tables

// One scalar of a named time series. `component` is "i" for vector entries
// and "i.j" for matrix entries (row i, column j).
struct SeriesRow {
  int t = 0;
  std::string component;
  double value = 0.0;
  std::string series;
};

class SeriesTable {
 public:
  void add(const std::string& name, const VectorSeq& seq, int t0 = 0);
  void add(const std::string& name, const MatrixSeq& seq, int t0 = 0);
  void add(const std::string& name, std::span<const double> values, int t0 = 0);
  void append(const SeriesTable& other);

  const std::vector<SeriesRow>& rows() const noexcept { return rows_; }
  std::vector<std::string> series_names() const;

  // Keeps only rows whose series is listed, in the original order.
  SeriesTable select(std::span<const std::string> names) const;

  // Header "t,component,value,series"; doubles in shortest round-trip form.
  void write_csv(std::ostream& out) const;
  // {"<series>": {"t": [...], "component": [...], "value": [...]}, ...}
  std::string to_json() const;

 private:
  std::vector<SeriesRow> rows_;
};

// Mean-field trajectories and the implied mean agent control.
SeriesTable trajectory_table(const Equilibrium& eq);
// Riccati families, gains and validity margins.
SeriesTable matrix_table(const Equilibrium& eq);
// Empirical aggregates of a population run; per-agent states if requested.
SeriesTable run_table(const PopulationRun& run, bool include_agents = false);

std::string format_double(double value);

// ---------------------------------------------------------------------------
// Equilibrium persistence

// The complete Equilibrium plus the spec it was computed from, as JSON.
std::string equilibrium_to_json(const GameSpec& spec, const Equilibrium& eq);

struct StoredEquilibrium {
  GameSpec spec;
  Equilibrium equilibrium;
};

// Throws SpecError with the offending field path on malformed input.
StoredEquilibrium equilibrium_from_json(std::string_view document);
StoredEquilibrium load_equilibrium_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reports

std::string cost_report_to_json(const CostReport& report, const PopulationRun& run);
std::string verification_report_to_json(const VerificationReport& report);

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const std::filesystem::path& path);
// Writes through a temporary file in the same directory, then renames.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace amfg
