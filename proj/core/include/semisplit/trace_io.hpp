#pragma once

// CSV export of solver traces and scan grids. Floats are printed with 17
// significant digits so reruns with the same config and seed are
// byte-identical.

#include <string>
#include <vector>

#include "semisplit/drs.hpp"
#include "semisplit/pppa.hpp"

namespace semisplit {

std::string format_sig17(double v);

// Header: k, x components, xbar components, vbar_norm, alpha, lambda,
// fejer_gap, shadow_res. Components are written plain for one-dimensional
// problems and with an index suffix otherwise.
void write_iterate_csv(const IterateTrace& trace, const std::string& path);

// Header: k, s, u, v, ybar, residual (same component convention).
void write_drs_csv(const DRSTrace& trace, const std::string& path);

struct ScanRow {
  double lambda = 0;
  double gamma = 0;
  double spectral_radius = 0;
  bool converged = false;
};

// Header: lambda, gamma, spectral_radius, converged_flag.
void write_scan_csv(const std::vector<ScanRow>& rows, const std::string& path);

}  // namespace semisplit
