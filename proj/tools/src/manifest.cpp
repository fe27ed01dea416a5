#include "manifest.hpp"

#include <array>
#include <cstdio>
#include <memory>

#include <json.hpp>
#include <openssl/evp.h>

#include "amfg/error.hpp"
#include "amfg/io.hpp"

namespace amfg::cli {

std::string sha256_file(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw Error("SHA-256 failed for " + path.string());
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

void write_manifest(const RunManifest& m) {
  nlohmann::json doc;
  doc["command"] = m.command;
  doc["tool_version"] = m.tool_version;
  doc["spec"] = {{"path", m.spec_path.string()}, {"sha256", m.spec_sha256}};
  if (!m.solution_path.empty()) doc["solution"] = m.solution_path.string();
  if (!m.seeds.empty()) doc["seeds"] = m.seeds;
  if (m.n_agents > 0) doc["N"] = m.n_agents;
  if (m.neighborhood_size > 0) doc["m"] = m.neighborhood_size;
  if (m.replications > 0) doc["replications"] = m.replications;
  if (m.perturbations > 0) doc["perturbations"] = m.perturbations;
  if (!m.checks.empty()) doc["checks"] = m.checks;
  doc["threads"] = m.threads;
  doc["output_dir"] = m.output_dir.string();
  write_text_file(m.output_dir / "manifest.json", doc.dump(2) + "\n");
}

}  // namespace amfg::cli
