#pragma once

// Relaxed preconditioned proximal point solver with positive semidefinite
// preconditioners. Relaxation is steered by the oblique weak Minty matrix V
// through the per-iteration factor alpha_k; diagnostics cover the separating
// halfspace, the Fejer inequality of the shadow sequence, the sublinear rate
// certificate and an empirical R-linear tail fit.

#include <cstdint>
#include <optional>
#include <vector>

#include "semisplit/linalg.hpp"
#include "semisplit/operators.hpp"

namespace semisplit {

using linalg::SymMatrix;

// Symmetric PSD preconditioner M with the derived objects the analysis needs:
// an orthonormal range basis Z, the range projector Pi = Z Z', and the
// positive definite Q = M + (I - Pi).
struct Preconditioner {
  SymMatrix m;
  linalg::GeneralMatrix z;
  SymMatrix pi;
  SymMatrix q;

  static Preconditioner from_matrix(const SymMatrix& m, double rank_tol = 1e-10);
  static Preconditioner identity(int n);
  static Preconditioner scaled_identity(int n, double sigma);
  // The 2n x 2n Douglas-Rachford block preconditioner for stepsize gamma.
  static Preconditioner drs_embedding(int n, double gamma);

  int n() const { return m.n(); }
  Vec project(const Vec& x) const { return pi.apply(x); }
  double q_norm_sq(const Vec& x) const { return q.quad(x); }
};

struct MintyCertificate {
  SymMatrix v;
  std::vector<Vec> sstar;
};

struct LambdaRule {
  enum class Kind { Fixed, FractionOfTwoAlpha };
  Kind kind = Kind::FractionOfTwoAlpha;
  double value = 0.45;  // lambda for Fixed, theta in (0,1) otherwise

  static LambdaRule fixed(double lambda) { return LambdaRule{Kind::Fixed, lambda}; }
  static LambdaRule fraction(double theta = 0.45) {
    return LambdaRule{Kind::FractionOfTwoAlpha, theta};
  }
};

struct PPPAConfig {
  LambdaRule lambda = LambdaRule::fraction();
  int max_iters = 1000;
  double stop_tol = 1e-9;        // on |vbar_k|
  double divergence_norm = 1e9;  // abort threshold on |x_k|
  ResolventSelection selection;
  bool validate_certificate = true;
  bool diagnostics = true;
};

enum class RunStatus { Converged, ZeroFound, MaxIters, Diverged };

struct IterateRecord {
  int k = 0;
  Vec x, xbar, vbar;
  double vbar_norm = 0;
  double alpha = 0;
  double lambda = 0;
  double fejer_gap = 0;
  double shadow_res = 0;  // |Pi(x - xbar)|_Q
  bool relax_warning = false;
};

struct IterateTrace {
  std::vector<IterateRecord> records;
  RunStatus status = RunStatus::MaxIters;
  Vec x_final, xbar_final;
  bool any_relax_warning = false;
  bool lambda_exceeded_two = false;  // flags lambda_k outside (0,2)
};

// 1 + lambda_min(X^{1/2} Z' V Z X^{1/2}) with X = Z' Q Z; the solver validity
// gate requires this to be positive.
double eta_min(const Preconditioner& p, const SymMatrix& v);

// 1 + <M(x-xbar), V M(x-xbar)> / <x-xbar, M(x-xbar)>. Throws ZeroDetectedError
// when the M-seminorm vanishes (the step found a zero).
double alpha_k(const Preconditioner& p, const SymMatrix& v, const Vec& x, const Vec& xbar);

struct StepResult {
  Vec xnext, xbar, vbar;
  double alpha = 0;
  double lambda = 0;
  bool zero_found = false;
  bool relax_warning = false;
};

// One iteration: xbar solves M x in M xbar + T xbar, vbar = M(x - xbar),
// xnext = x + lambda (xbar - x). The preconditioned resolvent is dispatched on
// the preconditioner's structure (scaled identity, or the Douglas-Rachford
// embedding for a primal-dual operator); a general symmetric M is supported
// for linear T by direct solve.
StepResult pppa_step(const OperatorSpec& t, const Preconditioner& p, const SymMatrix& v,
                     const Vec& x, const LambdaRule& rule, const ResolventSelection& sel,
                     std::mt19937_64& rng, double stop_tol, const Vec* bias = nullptr);

IterateTrace run_pppa(const OperatorSpec& t, const Preconditioner& p, const MintyCertificate& cert,
                      const Vec& x0, const PPPAConfig& cfg);

struct HalfspaceReport {
  std::vector<double> sstar_slacks;  // membership slack of each projected solution
  double alpha_consistency = 0;      // |alpha from the halfspace formula - alpha_k|
  double projection_residual = 0;    // |Pi x+ - relaxed projection of w|
};

HalfspaceReport halfspace_diagnostics(const Preconditioner& p, const SymMatrix& v,
                                      const MintyCertificate& cert, const Vec& x, const Vec& xbar,
                                      const Vec& xnext, double lambda);

// min over w* in Pi S* of |w-w*|_Q^2 - lambda(2 alpha-lambda)|w-wbar|_Q^2 - |w+-w*|_Q^2.
double fejer_gap(const Preconditioner& p, const MintyCertificate& cert, const Vec& w_prev,
                 const Vec& w_next, const Vec& wbar, double lambda, double alpha);

struct RateCertificate {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
  double kappa = 0;
};

// min_k |vbar_k|^2 <= |M| <x0-x*, M(x0-x*)> / ((N+1) kappa), minimized over
// x* in S*. When kappa is omitted it is taken as min_k lambda_k(2 alpha_k -
// lambda_k) over the trace.
RateCertificate rate_certificate(const IterateTrace& trace, const MintyCertificate& cert,
                                 const Preconditioner& p,
                                 std::optional<double> kappa = std::nullopt);

struct RLinearFit {
  double q = 0;
  double r2 = 0;
  int points = 0;
};

// Least-squares slope of log(residual) over the trailing tail_fraction of the
// sequence; q = exp(slope). Requires >= 20 positive tail entries.
RLinearFit rlinear_fit(const std::vector<double>& residuals, double tail_fraction);
RLinearFit rlinear_fit(const IterateTrace& trace, double tail_fraction);

}  // namespace semisplit
