#include "semisplit/catalog.hpp"

#include <cmath>
#include <memory>

namespace semisplit {

ToyProblem toy_ppa_problem(double a, double b, bool zero_band_profile) {
  const RadialProfile profile =
      zero_band_profile ? RadialProfile::zero_band() : RadialProfile::constant_one();
  const double rho = b / (a * a + b * b);
  ToyProblem out{OperatorSpec(RotationalOp{a, b, profile}),
                 MintyCertificate{linalg::scale(rho, SymMatrix::identity(2)), {Vec{0.0, 0.0}}},
                 rho};
  return out;
}

DrsProblem saddle_problem(double a, double b, double gamma) {
  DrsProblem out;
  out.id = "saddle-drs";
  out.a = OperatorSpec(LinearOp{linalg::GeneralMatrix(2, {0.0, a, -a, 0.0})});
  out.b = OperatorSpec(ScaledIdentityOp{2, b});
  out.cert.beta_p = 0.0;
  out.cert.beta_d = b * (a * a * gamma * gamma + 1.0) / (gamma * gamma * (a * a + b * b));
  out.cert.sstar = {{Vec{0.0, 0.0}, Vec{0.0, 0.0}}};
  out.validate_certificate = false;
  return out;
}

DrsProblem nonsmooth_min_problem() {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  PiecewiseGradientOp fa;
  fa.pieces = {{-kInf, -1.0, -1.0, -3.0}, {-1.0, 1.0, 6.0, -3.0}, {1.0, kInf, -1.0, -3.0}};
  fa.breaks = {{-1.0, ScalarSet::of({-2.0, -9.0})}, {1.0, ScalarSet::of({-4.0, 3.0})}};

  PiecewiseGradientOp fb;
  fb.pieces = {{-kInf, -1.0, 4.0, -1.0}, {-1.0, 2.0, 2.0, 3.0}, {2.0, kInf, 2.0, 15.0}};
  fb.breaks = {{-1.0, ScalarSet::closed(-5.0, 1.0)}, {2.0, ScalarSet::closed(7.0, 19.0)}};

  DrsProblem out;
  out.id = "nonsmooth-min";
  out.a = OperatorSpec(std::move(fa));
  out.b = OperatorSpec(std::move(fb));
  out.params_a = SemiParams{-1.2, 0.2};
  out.params_b = SemiParams{1.6, 0.1};
  out.cert = pd_cert_from_semi(*out.params_a, *out.params_b, {{Vec{0.0}, Vec{3.0}}});
  return out;
}

DrsProblem stationary_problem() {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const SemiParams pa{-0.3, -0.1};
  const SemiParams pb{0.4, 0.4};
  const double root = std::sqrt(1.0 - 4.0 * pa.mu * pa.rho);
  const double s1 = (1.0 - root) / (2.0 * pa.rho);  // inner slope
  const double s2 = (1.0 + root) / (2.0 * pa.rho);  // outer slope

  PiecewiseGradientOp fa;
  fa.pieces = {{-kInf, -3.0, s2, -1.0}, {-3.0, 3.0, s1, -1.0}, {3.0, kInf, s2, -1.0}};
  fa.breaks = {{-3.0, ScalarSet::of({s1 * -3.0 - 1.0, s2 * -3.0 - 1.0})},
               {3.0, ScalarSet::of({s1 * 3.0 - 1.0, s2 * 3.0 - 1.0})}};

  PiecewiseGradientOp fb;
  fb.pieces = {{-kInf, -1.0, 0.5, 1.0}, {-1.0, 1.0, 2.0, 1.0}, {1.0, kInf, 0.5, 1.0}};
  fb.breaks = {{-1.0, ScalarSet::of({-1.0, 0.5})}, {1.0, ScalarSet::of({3.0, 1.5})}};

  DrsProblem out;
  out.id = "stationary";
  out.a = OperatorSpec(std::move(fa));
  out.b = OperatorSpec(std::move(fb));
  out.params_a = pa;
  out.params_b = pb;
  out.cert = pd_cert_from_semi(pa, pb, {{Vec{0.0}, Vec{1.0}}});
  return out;
}

DrsProblem drs_problem_by_id(const std::string& id) {
  if (id == "nonsmooth-min") return nonsmooth_min_problem();
  if (id == "stationary") return stationary_problem();
  if (id == "saddle-drs") return saddle_problem(2.0, -1.0, 0.5);
  throw ConfigError("unknown problem id '" + id + "'");
}

}  // namespace semisplit
