#pragma once

#include <string>
#include <vector>

#include "scatterlab/config.hpp"

namespace scatterlab::app {

inline constexpr const char* kVersion = "0.3.0";

struct RunOptions {
  std::string kind;     // empty: the config's kind
  int threads = 1;
  std::string out_dir;  // empty: config.output
};

struct RunResult {
  std::string kind;
  std::string summary;             // human-readable lines for stdout
  std::vector<std::string> files;  // written artifacts, manifest last
  std::string manifest_json;
};

/// Runs one experiment and writes its CSV/JSON outputs plus manifest.json
/// into the output directory, each file atomically. On failure a manifest with
/// "status": "failed" and the list of files already written (marked partial)
/// replaces the regular one, then the error propagates.
RunResult run(const config::ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace scatterlab::app
