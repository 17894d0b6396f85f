#pragma once

#include <string>
#include <vector>

#include "cfsi/config.hpp"

namespace cfsi {

struct Artifact {
  std::string name;    // file name inside the output directory
  std::string sha256;  // content hash as recorded in the manifest
};

struct RunResult {
  bool all_pass = false;              // every certificate line PASS, no failures
  std::vector<Artifact> artifacts;    // in emission order, manifest included last
  std::vector<std::string> failures;  // per-experiment failure notes
  std::string out_dir;
};

/// Execute the configured experiment: write the CSV tables, a certificate
/// (key: value lines ending in PASS/FAIL verdicts), optional SVG plots, and a
/// manifest listing every artifact with its content hash.  Failures are
/// recorded, never thrown, except for an unwritable output directory.
RunResult run_scenario(const ScenarioConfig& cfg);

}  // namespace cfsi
