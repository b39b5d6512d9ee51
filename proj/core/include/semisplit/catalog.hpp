#pragma once

// The four benchmark problems shipped with the library, wired to their
// certificates: the planar rotational field (weak Minty tightness), the
// linear saddle pair, and the two one-dimensional nonsmooth splitting
// problems with star-semimonotone subdifferentials.

#include <optional>
#include <string>

#include "semisplit/drs.hpp"
#include "semisplit/operators.hpp"
#include "semisplit/pppa.hpp"
#include "semisplit/semiparams.hpp"

namespace semisplit {

struct ToyProblem {
  OperatorSpec t;
  MintyCertificate cert;
  double rho_weak = 0.0;  // b / (a^2 + b^2)
};

// x -> f(|x|) [[b,a],[-a,b]] x with the zero-band profile (or f == 1), with the
// rho-weak-Minty certificate at the origin.
ToyProblem toy_ppa_problem(double a, double b, bool zero_band_profile);

struct DrsProblem {
  std::string id;
  OperatorSpec a, b;
  PDCertificate cert;
  std::optional<SemiParams> params_a, params_b;
  // The saddle certificate only holds with the image restricted to range(M);
  // unrestricted graph sampling is skipped for it.
  bool validate_certificate = true;
};

// Skew coupling plus b*I; the certificate sits on the tight boundary for the
// given stepsize. Requires a window-admissible gamma.
DrsProblem saddle_problem(double a, double b, double gamma);

// Separable nonsmooth minimization with two piecewise-quadratic terms;
// star-semimonotone at (0, -3)/(0, 3) with (-1.2, 0.2) and (1.6, 0.1).
DrsProblem nonsmooth_min_problem();

// Stationary-point problem with parameters (-0.3, -0.1) and (0.4, 0.4);
// multi-valued resolvents, R-linear tail.
DrsProblem stationary_problem();

// Lookup by the identifiers used by the command line tool:
// toy-ppa | saddle-drs | nonsmooth-min | stationary.
DrsProblem drs_problem_by_id(const std::string& id);

}  // namespace semisplit
