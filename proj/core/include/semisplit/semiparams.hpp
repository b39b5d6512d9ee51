#pragma once

// Scalar calculus of (mu, rho)-semimonotonicity parameters: parallel sums,
// existence classification, the rules for inverse / sum / parallel sum /
// identity shift / monotone embedding, resolvent stepsize ranges and
// Lipschitz constants, and the positive-quadratic-range fact every stepsize
// table reduces to.
//
// Conventions: [x]+ = max(0,x), [x]- = min(0,x); fractions with a zero
// denominator in range endpoints read as +infinity.

#include <optional>
#include <vector>

#include "semisplit/errors.hpp"
#include "semisplit/linalg.hpp"

namespace semisplit {

// Real number extended with +infinity (the only extension the parallel-sum
// algebra needs).
struct ExtReal {
  double value = 0.0;
  bool is_inf = false;

  static ExtReal inf() { return ExtReal{0.0, true}; }
  bool finite() const { return !is_inf; }
};

struct SemiParams {
  double mu = 0.0;
  double rho = 0.0;
};

enum class ExistenceClass { AllOperators, NoOperator, AffineOnly, Generic };

// Open interval of admissible stepsizes (lo, hi), hi possibly +infinity.
// Empty intervals are representable (lo >= hi).
struct GammaInterval {
  double lo = 0.0;
  ExtReal hi = ExtReal::inf();

  static GammaInterval empty();
  bool is_empty() const;
  bool contains(double gamma) const;
};

ExtReal parallel_sum(ExtReal a, ExtReal b);
double parallel_sum(double a, double b);

// The set {gamma > 0 : a g^2 + b g + c > 0} as an open interval. Standing
// hypothesis: b > -2 sqrt(ac) when ac >= 0.
GammaInterval positive_quadratic_range(double a, double b, double c);

ExistenceClass existence_class(const SemiParams& p);

SemiParams inverse_params(const SemiParams& p);
SemiParams sum_params(const SemiParams& a, const SemiParams& b);
SemiParams parallel_sum_params(const SemiParams& a, const SemiParams& b);

enum class ShiftKind { Exact, OneWay };
struct ShiftResult {
  SemiParams params;
  ShiftKind kind = ShiftKind::Exact;
  double c_used = 0.0;  // meaningful for the OneWay branch
};

// Parameters of A + alpha*I given parameters of A. When 1 + 2 rho alpha > 0
// the rule is an equivalence (Exact, maximality-preserving); otherwise the
// one-way rule applies with a free constant c > -rho (default -rho + 1).
ShiftResult shift_identity_params(const SemiParams& p, double alpha,
                                  std::optional<double> c = std::nullopt);

struct MonotoneEmbedding {
  double xi = 0.0;
  double nu = 0.0;
};

// (xi, nu) such that T is (mu,rho)-semimonotone iff (T - nu id)^{-1} - xi id
// is monotone; requires mu*rho < 1/4. Satisfies 1 + 2 xi nu = 1/sqrt(1-4 mu rho).
MonotoneEmbedding monotone_embedding(const SemiParams& p);

// Stepsizes for which the resolvent of a maximal (mu,rho)-semimonotone
// operator has full domain; equals positive_quadratic_range(mu, 1, rho).
GammaInterval resolvent_gamma_range(const SemiParams& p);

double resolvent_lipschitz(const SemiParams& p, double gamma);

// Subdifferential parameters from curvature bounds. sigma = lower curvature
// modulus, ell = upper; alpha and c are the free constants of the one-way
// branches (defaults: strict bound + 1).
SemiParams curvature_params(std::optional<double> sigma, std::optional<double> ell,
                            std::optional<double> alpha = std::nullopt,
                            std::optional<double> c = std::nullopt);

SemiParams pointwise_min_params(const std::vector<double>& ell_list,
                                std::optional<double> alpha = std::nullopt,
                                std::optional<double> c = std::nullopt);

// Infimal convolution rule; the level-boundedness condition is the caller's
// responsibility. Delegates to parallel_sum_params.
SemiParams infconv_params(const SemiParams& a, const SemiParams& b);

// Saddle operator of a sigma-convex-concave coupling under alpha-interaction
// dominance with envelope parameter delta. Returns the mu-maximal admissible
// pair.
SemiParams saddle_params(double alpha, double delta);

// (A + A')/2 - rho A'A - mu I >= 0 test for a linear operator.
bool linear_semimono_check(const linalg::GeneralMatrix& a, const SemiParams& p);

}  // namespace semisplit
