#pragma once

#include <cstdint>
#include <string>

namespace semisplit::cli {

struct ReproduceOptions {
  std::string outdir = ".";
  std::uint64_t seed = 1;
  int max_iters = 20000;
  double tol = 1e-7;
  bool verbose = false;
};

// Reruns one of the shipped examples (toy-ppa, saddle-drs, nonsmooth-min,
// stationary), writes traces, scan grids and summary.json into outdir.
// Returns 0 when every check passes, 1 otherwise.
int run_reproduce(const std::string& example, const ReproduceOptions& opts);

}  // namespace semisplit::cli
