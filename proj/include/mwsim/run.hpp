#pragma once

#include <string>
#include <vector>

#include "mwsim/config.hpp"
#include "mwsim/wavefield.hpp"

namespace mwsim {

struct RunOptions {
  std::string out_dir = ".";
  unsigned threads = 0;  // 0 = all hardware threads; never changes results
  bool timing = true;    // record wall time in the manifest
};

struct RunOutputs {
  std::string run_hash;
  std::vector<std::string> files;  // data files, manifest last
  Metadata manifest;
  std::string summary;  // human-readable report for stdout
};

/// Hash of the canonical config and tool version; stamped on every output.
std::string run_hash(const RunConfig& config);

/// Executes the config's subcommand and writes its data files plus
/// `manifest.txt` into `out_dir`. The manifest is itself a valid config (all
/// provenance lines are comments), so `--config manifest.txt` reruns it.
RunOutputs run(const RunConfig& config, const RunOptions& options = {});

}  // namespace mwsim
