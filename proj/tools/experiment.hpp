#pragma once

#include <string>

namespace semisplit::cli {

// Runs a JSON experiment configuration (schema documented in the README) and
// writes the trace CSV files into outdir. Returns 0 on success, 2 on schema or
// validation failures.
int run_experiment(const std::string& config_path, const std::string& outdir);

}  // namespace semisplit::cli
