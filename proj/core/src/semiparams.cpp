#include "semisplit/semiparams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace semisplit {

namespace {

constexpr double kFeasTol = 1e-12;

double pos(double x) { return std::max(0.0, x); }
double neg(double x) { return std::min(0.0, x); }

}  // namespace

GammaInterval GammaInterval::empty() { return GammaInterval{1.0, ExtReal{0.0, false}}; }

bool GammaInterval::is_empty() const {
  if (hi.is_inf) return false;
  return !(lo < hi.value);
}

bool GammaInterval::contains(double gamma) const {
  if (is_empty()) return false;
  if (!(gamma > lo)) return false;
  return hi.is_inf || gamma < hi.value;
}

ExtReal parallel_sum(ExtReal a, ExtReal b) {
  if (b.is_inf) return a;
  if (a.is_inf) return b;
  if (a.value == 0.0 && b.value == 0.0) return ExtReal{0.0, false};
  const double s = a.value + b.value;
  if (s == 0.0)
    throw NotSummableError("parallel_sum: a + b = 0 with a != 0");
  return ExtReal{a.value * b.value / s, false};
}

double parallel_sum(double a, double b) {
  const ExtReal r = parallel_sum(ExtReal{a, false}, ExtReal{b, false});
  return r.value;
}

GammaInterval positive_quadratic_range(double a, double b, double c) {
  if (a * c >= 0.0 && !(b > -2.0 * std::sqrt(a * c)))
    throw HypothesisViolatedError("positive_quadratic_range: requires b > -2 sqrt(ac) when ac >= 0");
  if (a < 0.0 && c < 0.0 && !(b > 2.0 * std::sqrt(a * c))) return GammaInterval::empty();

  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    // no real roots; sign is constant, equal to sign(a) (a and c share it)
    if (a > 0.0) return GammaInterval{0.0, ExtReal::inf()};
    return GammaInterval::empty();
  }
  const double s = std::sqrt(disc);
  GammaInterval out;
  const double lo_num = 2.0 * pos(-c);
  if (lo_num == 0.0) {
    out.lo = 0.0;
  } else if (b + s > 0.0) {
    out.lo = lo_num / (b + s);
  } else {
    return GammaInterval::empty();  // a = 0, b <= 0, c < 0: no positive solutions
  }
  const double hi_den = 2.0 * pos(-a);
  if (hi_den == 0.0) {
    out.hi = ExtReal::inf();
  } else {
    out.hi = ExtReal{(b + s) / hi_den, false};
  }
  return out;
}

ExistenceClass existence_class(const SemiParams& p) {
  const double prod_neg = neg(p.mu) * neg(p.rho);
  const double prod_pos = pos(p.mu) * pos(p.rho);
  if (prod_neg >= 0.25 - kFeasTol && prod_neg > 0.0) return ExistenceClass::AllOperators;
  if (prod_pos > 0.25 + kFeasTol) return ExistenceClass::NoOperator;
  if (std::abs(prod_pos - 0.25) <= kFeasTol) return ExistenceClass::AffineOnly;
  return ExistenceClass::Generic;
}

SemiParams inverse_params(const SemiParams& p) { return SemiParams{p.rho, p.mu}; }

SemiParams sum_params(const SemiParams& a, const SemiParams& b) {
  if (!(a.rho + b.rho > 0.0) && !(a.rho == 0.0 && b.rho == 0.0))
    throw RuleInapplicableError("sum_params: requires rho_A + rho_B > 0 or rho_A = rho_B = 0");
  return SemiParams{a.mu + b.mu, parallel_sum(a.rho, b.rho)};
}

SemiParams parallel_sum_params(const SemiParams& a, const SemiParams& b) {
  if (!(a.mu + b.mu > 0.0) && !(a.mu == 0.0 && b.mu == 0.0))
    throw RuleInapplicableError("parallel_sum_params: requires mu_A + mu_B > 0 or mu_A = mu_B = 0");
  return SemiParams{parallel_sum(a.mu, b.mu), a.rho + b.rho};
}

ShiftResult shift_identity_params(const SemiParams& p, double alpha, std::optional<double> c) {
  const double den = 1.0 + 2.0 * p.rho * alpha;
  if (den > 0.0) {
    SemiParams out{(p.mu + alpha * (1.0 + p.rho * alpha)) / den, p.rho / den};
    return ShiftResult{out, ShiftKind::Exact, 0.0};
  }
  const double cc = c.value_or(-p.rho + 1.0);
  if (!(cc > -p.rho))
    throw InvalidShiftConstantError("shift_identity_params: one-way branch requires c > -rho");
  SemiParams out{p.mu + alpha * (1.0 - cc * alpha), parallel_sum(p.rho, cc)};
  return ShiftResult{out, ShiftKind::OneWay, cc};
}

MonotoneEmbedding monotone_embedding(const SemiParams& p) {
  const double prod = p.mu * p.rho;
  if (!(prod < 0.25))
    throw DegenerateClassError("monotone_embedding: requires mu*rho < 1/4");
  const double root = std::sqrt(1.0 - 4.0 * prod);
  return MonotoneEmbedding{p.rho / root, 2.0 * p.mu / (1.0 + root)};
}

GammaInterval resolvent_gamma_range(const SemiParams& p) {
  const double prod = p.mu * p.rho;
  const bool degenerate_ok = std::abs(pos(p.mu) * pos(p.rho) - 0.25) <= kFeasTol;
  if (!(prod < 0.25) && !degenerate_ok)
    throw DegenerateClassError("resolvent_gamma_range: requires mu*rho < 1/4 or [mu]+[rho]+ = 1/4");
  return positive_quadratic_range(p.mu, 1.0, p.rho);
}

double resolvent_lipschitz(const SemiParams& p, double gamma) {
  if (!resolvent_gamma_range(p).contains(gamma))
    throw GammaOutOfRangeError("resolvent_lipschitz: gamma outside the full-domain range");
  const double root = std::sqrt(std::max(0.0, 1.0 - 4.0 * p.mu * p.rho));
  const double den = 2.0 * (1.0 + p.mu * gamma + p.rho / gamma);
  return (std::abs(1.0 + 2.0 * p.rho / gamma) + root) / den;
}

namespace {

ExtReal ext_reciprocal(double x) {
  if (x == 0.0) return ExtReal::inf();
  return ExtReal{1.0 / x, false};
}

}  // namespace

SemiParams curvature_params(std::optional<double> sigma, std::optional<double> ell,
                            std::optional<double> alpha, std::optional<double> c) {
  if (!sigma && !ell)
    throw BranchPreconditionError("curvature_params: at least one of sigma, ell is required");

  if (sigma && !ell) return SemiParams{*sigma, 0.0};

  if (!sigma && ell) {
    const double l = *ell;
    if (l < 0.0) return SemiParams{0.0, 1.0 / l};
    const double a = alpha.value_or(l + 1.0);
    if (!(a > l)) throw BranchPreconditionError("curvature_params: requires alpha > ell");
    const double cc = c.value_or(1.0 / (a - l) + 1.0);
    if (!(cc > 1.0 / (a - l)))
      throw BranchPreconditionError("curvature_params: requires c > 1/(alpha - ell)");
    // f - (alpha/2)|.|^2 has negative upper curvature ell - alpha, so its
    // subdifferential is (0, 1/(ell - alpha)); shifting back by alpha*id gives
    const ExtReal r = parallel_sum(ExtReal{cc, false}, ext_reciprocal(l - a));
    return SemiParams{a * (1.0 - cc * a), r.value};
  }

  const double s = *sigma, l = *ell;
  if (!(s <= l)) throw BranchPreconditionError("curvature_params: requires sigma <= ell");
  if (l + s > 0.0) return SemiParams{parallel_sum(s, l), 1.0 / (l + s)};
  const double cc = c.value_or(l - s > 0.0 ? -1.0 / (l - s) + 1.0 : 1.0);
  if (!(1.0 + cc * (l - s) > 0.0))
    throw BranchPreconditionError("curvature_params: requires 1 + c(ell - sigma) > 0");
  const ExtReal r = parallel_sum(ExtReal{cc, false}, ext_reciprocal(l - s));
  return SemiParams{s * (1.0 - cc * s), r.value};
}

SemiParams pointwise_min_params(const std::vector<double>& ell_list, std::optional<double> alpha,
                                std::optional<double> c) {
  if (ell_list.empty())
    throw BranchPreconditionError("pointwise_min_params: empty curvature list");
  const double lmax = *std::max_element(ell_list.begin(), ell_list.end());
  return curvature_params(std::nullopt, lmax, alpha, c);
}

SemiParams infconv_params(const SemiParams& a, const SemiParams& b) {
  return parallel_sum_params(a, b);
}

SemiParams saddle_params(double alpha, double delta) {
  if (!(delta > 0.0)) throw BranchPreconditionError("saddle_params: requires delta > 0");
  if (!(alpha > -1.0 / delta))
    throw InteractionDominanceError("saddle_params: requires alpha > -1/delta");
  if (alpha < 1.0 / delta) {
    const SemiParams main{alpha / (1.0 - alpha * delta), -delta / (1.0 - alpha * delta)};
    if (alpha >= 0.0 && 0.0 > main.mu) return SemiParams{0.0, -delta};
    return main;
  }
  return SemiParams{0.0, -delta};
}

bool linear_semimono_check(const linalg::GeneralMatrix& a, const SemiParams& p) {
  using linalg::GeneralMatrix;
  const int n = a.rows();
  const GeneralMatrix ata = a.transpose().multiply(a);
  linalg::SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double id = (i == j) ? 1.0 : 0.0;
      s.set(i, j, 0.5 * (a(i, j) + a(j, i)) - p.rho * ata(i, j) - p.mu * id);
    }
  const auto eig = linalg::sym_eigen(s);
  return eig.values.front() >= -1e-10 * std::max(1.0, s.max_abs());
}

}  // namespace semisplit
