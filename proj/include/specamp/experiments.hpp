#pragma once

#include <string>
#include <vector>

#include "specamp/config.hpp"
#include "specamp/manifest.hpp"

namespace specamp {

// Registered experiment names, in listing order.
const std::vector<std::string>& experiment_names();

// Runs the configured experiment into <out>/<experiment> (out_override wins
// over config.out_dir). Writes the per-operation CSVs, the resolved config,
// and manifest.txt with a checksum per emitted file. Returns the run
// directory.
std::string run_experiment(const ExperimentConfig& config,
                           const std::string& out_override = "");

struct ReplayResult {
    std::string out_dir;
    // recorded files that no longer match in the original run directory
    std::vector<std::string> tampered;
    // files of the fresh re-run that differ from the recorded checksums
    std::vector<std::string> mismatches;
};

// Re-runs the configuration recorded next to the manifest into out_dir and
// compares both the original directory and the fresh outputs against the
// recorded checksums.
ReplayResult replay(const std::string& manifest_path, const std::string& out_dir);

}  // namespace specamp
