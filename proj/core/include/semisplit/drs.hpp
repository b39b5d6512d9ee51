#pragma once

// Relaxed Douglas-Rachford splitting, its primal-dual embedding and the
// equivalence checker against the preconditioned proximal point solver,
// stepsize-range calculators (oblique weak Minty and semimonotone forms),
// and the spectral-radius tightness machinery for the linear examples.

#include <functional>
#include <optional>
#include <vector>

#include "semisplit/operators.hpp"
#include "semisplit/pppa.hpp"
#include "semisplit/semiparams.hpp"

namespace semisplit {

struct DRSConfig {
  double gamma = 1.0;
  LambdaRule lambda = LambdaRule::fraction();
  int max_iters = 1000;
  double stop_tol = 1e-9;  // on |u_k - v_k|
  double divergence_norm = 1e9;
  ResolventSelection selection;
};

struct PDCertificate {
  double beta_p = 0.0;
  double beta_d = 0.0;
  std::vector<std::pair<Vec, Vec>> sstar;  // (x*, y*) pairs
};

struct DrsRecord {
  int k = 0;
  Vec s, u, v, ybar;
  double residual = 0;            // |u - v|
  double inclusion_residual = 0;  // membership defect of (u-v)/gamma in Au + Bv
  double fejer_gap = 0;
  bool relax_warning = false;
};

struct DRSTrace {
  std::vector<DrsRecord> records;
  RunStatus status = RunStatus::MaxIters;
  Vec s_final;
  double alpha = 0;
  bool any_relax_warning = false;
};

struct DrsStepResult {
  Vec snext, u, v;
};

DrsStepResult drs_step(const OperatorSpec& a, const OperatorSpec& b, const Vec& s, double gamma,
                       double lambda, const ResolventSelection& sel, std::mt19937_64& rng,
                       const Vec* bias_u = nullptr, const Vec* bias_v = nullptr);

// Stepsize window of the oblique weak Minty theorem; equals
// positive_quadratic_range(beta_D, 1, beta_P).
GammaInterval gamma_range_minty(double beta_p, double beta_d);

// Certificate for the primal-dual operator from star-semimonotonicity of the
// two summands: beta_P = rho_A [] rho_B, beta_D = mu_A [] mu_B. Throws
// AssumptionViolatedError naming the failed clause.
PDCertificate pd_cert_from_semi(const SemiParams& pa, const SemiParams& pb,
                                std::vector<std::pair<Vec, Vec>> sstar);

GammaInterval gamma_range_semi(const SemiParams& pa, const SemiParams& pb);

// Same, additionally intersected with the full-domain stepsize ranges of both
// resolvents (needed when the operators are only star-semimonotone, so the
// automatic-containment argument for maximal operators does not apply).
GammaInterval gamma_range_semi(const SemiParams& pa, const SemiParams& pb, const OperatorSpec& a,
                               const OperatorSpec& b);

// 1 + beta_P/gamma + gamma beta_D; positive on gamma_range_minty.
double alpha_drs(double gamma, double beta_p, double beta_d);

DRSTrace run_drs(const OperatorSpec& a, const OperatorSpec& b, const PDCertificate& cert,
                 const Vec& s0, const DRSConfig& cfg);

// Lockstep run of DRS from s0 = x0 - gamma y0 and the preconditioned proximal
// point iteration on the primal-dual operator from (x0, y0); returns the
// largest deviation among s_k vs x_k - gamma y_k, u_k vs xbar_k and the two
// ybar sequences over the horizon. Deterministic selection required.
double equivalence_check(const OperatorSpec& a, const OperatorSpec& b, const PDCertificate& cert,
                         const Vec& x0, const Vec& y0, const DRSConfig& cfg, int horizon);

// 2(1 + b/(a^2+b^2)): tight relaxation bound of the planar rotational example
// with constant profile. Requires b > 0.
double spectral_lambda_bar_toy(double a, double b);

// 2(a^2 g + b)(1 + g b) / (g (a^2 + b^2)) when the admissible window is
// nonempty (b > 0, or b < 0 with a^2 != b^2 and g between -1/b and -b/a^2);
// std::nullopt otherwise.
std::optional<double> spectral_lambda_bar_saddle(double a, double b, double gamma);

// Step matrices of the two linear examples, as functions of lambda.
linalg::GeneralMatrix toy_ppa_step_matrix(double a, double b, double lambda);
linalg::GeneralMatrix saddle_drs_step_matrix(double a, double b, double gamma, double lambda);

struct ScanPoint {
  double lambda = 0;
  double rho = 0;
};

using StepMatrixBuilder = std::function<linalg::GeneralMatrix(double)>;

std::vector<ScanPoint> spectral_scan(const StepMatrixBuilder& builder,
                                     const std::vector<double>& lambda_grid);

// Bisection refinement of the lambda where rho(H(lambda)) crosses 1, given a
// bracket [lo, hi] with a sign change of rho - 1.
double find_unit_radius_crossing(const StepMatrixBuilder& builder, double lo, double hi,
                                 double tol = 1e-9);

struct NonmonotonicityReport {
  double trace_primal = 0;
  double trace_dual = 0;
  double trace_primal_dual = 0;
};

// Traces of the symmetric parts of the primal, dual and primal-dual operators
// of the linear saddle family (2b, 2/b, 2/b); all negative when b < 0.
NonmonotonicityReport nonmonotonicity_report(double a, double b);

}  // namespace semisplit
