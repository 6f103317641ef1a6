#pragma once

#include <map>
#include <string>
#include <vector>

#include "favar/factors/factor_set.hpp"
#include "favar/panel.hpp"

namespace favar::cli {

// Content hash (FNV-1a 64, hex) of a file's bytes.
std::string file_hash(const std::string& path);

// Per-run ledger: which stages ran, under which config, and what they wrote.
// Stored as run_manifest.json in the artifact directory; downstream stages
// refuse to consume anything the ledger cannot vouch for.
struct RunManifest {
  std::string config_hash;
  long long seed = 0;
  // stage -> (file name -> content hash)
  std::map<std::string, std::map<std::string, std::string>> stages;
};

// Missing file loads as an empty manifest; a malformed one is BadArtifact.
RunManifest load_manifest(const std::string& dir);
void save_manifest(const std::string& dir, const RunManifest& m);

// Verifies that `stage` ran under `config_hash` and that each recorded
// output still hashes the same; throws StaleArtifact otherwise.
void require_stage(const RunManifest& m, const std::string& dir,
                   const std::string& stage, const std::string& config_hash);

// Records the named files (hashing their current bytes) under `stage`.
void record_stage(RunManifest& m, const std::string& dir,
                  const std::string& stage,
                  const std::vector<std::string>& files);

// Standardized panel + audit table; the pair round-trips the Panel exactly
// (values go through the shortest round-trip double format).
void write_panel_artifact(const std::string& dir, const Panel& panel,
                          const std::vector<std::string>& preamble);
Panel read_panel_artifact(const std::string& dir);

// Factor set export with enough preamble to rebuild the object: method,
// block widths, degenerate columns. Column names: anchors when known,
// otherwise f1..fK, then the observable names.
void write_factor_artifact(const std::string& dir,
                           const factors::FactorSet& fs,
                           const std::vector<std::string>& names,
                           const std::vector<std::string>& preamble);
factors::FactorSet read_factor_artifact(const std::string& dir);
std::vector<std::string> factor_column_names(const std::string& dir);

// Leading "# key=value" lines of a CSV artifact.
std::map<std::string, std::string> read_preamble(const std::string& path);

}  // namespace favar::cli
