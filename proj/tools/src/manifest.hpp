#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace amfg::cli {

// Lowercase hex SHA-256 of the file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::filesystem::path spec_path;
  std::string spec_sha256;
  std::filesystem::path solution_path;  // empty for solve
  std::vector<std::uint64_t> seeds;
  int n_agents = 0;
  int neighborhood_size = 0;
  int replications = 0;
  int perturbations = 0;
  int threads = 1;
  std::vector<std::string> checks;
  std::filesystem::path output_dir;
  std::string tool_version;
};

void write_manifest(const RunManifest& manifest);

}  // namespace amfg::cli
