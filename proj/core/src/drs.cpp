#include "semisplit/drs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace semisplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

DrsStepResult drs_step(const OperatorSpec& a, const OperatorSpec& b, const Vec& s, double gamma,
                       double lambda, const ResolventSelection& sel, std::mt19937_64& rng,
                       const Vec* bias_u, const Vec* bias_v) {
  DrsStepResult out;
  out.u = resolvent(a, gamma, s, sel, rng, bias_u).choice;
  const Vec refl = linalg::sub(linalg::scale(2.0, out.u), s);
  out.v = resolvent(b, gamma, refl, sel, rng, bias_v).choice;
  out.snext = linalg::axpy(s, lambda, linalg::sub(out.v, out.u));
  return out;
}

GammaInterval gamma_range_minty(double beta_p, double beta_d) {
  if (!(std::min(0.0, beta_d) * std::min(0.0, beta_p) < 0.25))
    throw CertificateInfeasibleError("gamma_range_minty: requires [beta_D]-[beta_P]- < 1/4");
  return positive_quadratic_range(beta_d, 1.0, beta_p);
}

PDCertificate pd_cert_from_semi(const SemiParams& pa, const SemiParams& pb,
                                std::vector<std::pair<Vec, Vec>> sstar) {
  if (!(pa.mu + pb.mu > 0.0) && !(pa.mu == 0.0 && pb.mu == 0.0))
    throw AssumptionViolatedError("pd_cert_from_semi: clause mu_A + mu_B > 0 (or both zero) fails");
  if (!(pa.rho + pb.rho > 0.0) && !(pa.rho == 0.0 && pb.rho == 0.0))
    throw AssumptionViolatedError("pd_cert_from_semi: clause rho_A + rho_B > 0 (or both zero) fails");
  const double beta_d = parallel_sum(pa.mu, pb.mu);
  const double beta_p = parallel_sum(pa.rho, pb.rho);
  if (!(std::min(0.0, beta_d) * std::min(0.0, beta_p) < 0.25))
    throw AssumptionViolatedError(
        "pd_cert_from_semi: clause [mu_A||mu_B]-[rho_A||rho_B]- < 1/4 fails");
  PDCertificate cert;
  cert.beta_p = beta_p;
  cert.beta_d = beta_d;
  cert.sstar = std::move(sstar);
  return cert;
}

GammaInterval gamma_range_semi(const SemiParams& pa, const SemiParams& pb) {
  const PDCertificate cert = pd_cert_from_semi(pa, pb, {});
  return gamma_range_minty(cert.beta_p, cert.beta_d);
}

GammaInterval gamma_range_semi(const SemiParams& pa, const SemiParams& pb, const OperatorSpec& a,
                               const OperatorSpec& b) {
  GammaInterval base = gamma_range_semi(pa, pb);
  // intersect with the full-domain ranges of both resolvents; keep the widest
  // connected component
  std::vector<std::pair<double, double>> comps{{base.lo, base.hi.is_inf ? kInf : base.hi.value}};
  for (const OperatorSpec* op : {&a, &b}) {
    const auto domain = full_domain_gamma_intervals(*op);
    std::vector<std::pair<double, double>> next;
    for (const auto& c : comps)
      for (const auto& d : domain) {
        const double lo = std::max(c.first, d.first);
        const double hi = std::min(c.second, d.second);
        if (lo < hi) next.emplace_back(lo, hi);
      }
    comps = std::move(next);
  }
  if (comps.empty()) return GammaInterval::empty();
  const auto widest = *std::max_element(comps.begin(), comps.end(), [](const auto& x, const auto& y) {
    return (x.second - x.first) < (y.second - y.first);
  });
  GammaInterval out;
  out.lo = widest.first;
  out.hi = std::isfinite(widest.second) ? ExtReal{widest.second, false} : ExtReal::inf();
  return out;
}

double alpha_drs(double gamma, double beta_p, double beta_d) {
  if (!gamma_range_minty(beta_p, beta_d).contains(gamma))
    throw GammaOutOfRangeError("alpha_drs: gamma outside the certified range");
  return 1.0 + beta_p / gamma + gamma * beta_d;
}

DRSTrace run_drs(const OperatorSpec& a, const OperatorSpec& b, const PDCertificate& cert,
                 const Vec& s0, const DRSConfig& cfg) {
  const double alpha = alpha_drs(cfg.gamma, cert.beta_p, cert.beta_d);
  for (const auto& [xs, ys] : cert.sstar) {
    if (member_residual(a, xs, linalg::scale(-1.0, ys)) > 1e-10 ||
        member_residual(b, xs, ys) > 1e-10)
      throw AssumptionViolatedError("run_drs: designated solution is not a primal-dual zero");
  }
  double lambda = cfg.lambda.kind == LambdaRule::Kind::Fixed ? cfg.lambda.value
                                                             : cfg.lambda.value * 2.0 * alpha;
  const bool warn = !(lambda > 0.0 && lambda < 2.0 * alpha);

  DRSTrace trace;
  trace.alpha = alpha;
  trace.any_relax_warning = warn;
  const double g = cfg.gamma;
  std::mt19937_64 rng(cfg.selection.seed);
  Vec s = s0;
  Vec prev_u, prev_v;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Vec* bu = prev_u.empty() ? nullptr : &prev_u;
    const Vec* bv = prev_v.empty() ? nullptr : &prev_v;
    const DrsStepResult st = drs_step(a, b, s, g, lambda, cfg.selection, rng, bu, bv);

    DrsRecord rec;
    rec.k = k;
    rec.s = s;
    rec.u = st.u;
    rec.v = st.v;
    rec.ybar = linalg::scale(1.0 / g, linalg::sub(linalg::sub(linalg::scale(2.0, st.u), s), st.v));
    rec.residual = linalg::norm(linalg::sub(st.u, st.v));
    rec.relax_warning = warn;
    // (s-u)/g in Au and (2u-s-v)/g in Bv certify (u-v)/g in Au + Bv
    const Vec au = linalg::scale(1.0 / g, linalg::sub(s, st.u));
    const Vec bvv = linalg::scale(
        1.0 / g, linalg::sub(linalg::sub(linalg::scale(2.0, st.u), s), st.v));
    rec.inclusion_residual =
        std::max(member_residual(a, st.u, au), member_residual(b, st.v, bvv));
    if (!cert.sstar.empty()) {
      // Fejer gap of the shadow sequence, expressed in s-coordinates:
      // |s-s*|^2/g telescopes with lambda(2a-lambda)|u-v|^2/g
      double gap = kInf;
      const Vec snext = st.snext;
      for (const auto& [xs, ys] : cert.sstar) {
        const Vec sstar = linalg::axpy(xs, -g, ys);
        const double before = linalg::dot(linalg::sub(s, sstar), linalg::sub(s, sstar)) / g;
        const double after =
            linalg::dot(linalg::sub(snext, sstar), linalg::sub(snext, sstar)) / g;
        const double dec = lambda * (2.0 * alpha - lambda) * rec.residual * rec.residual / g;
        gap = std::min(gap, before - dec - after);
      }
      rec.fejer_gap = gap;
    }
    const double residual = rec.residual;
    trace.records.push_back(std::move(rec));

    if (residual == 0.0) {
      trace.status = RunStatus::ZeroFound;
      trace.s_final = st.snext;
      return trace;
    }
    if (residual <= cfg.stop_tol) {
      trace.status = RunStatus::Converged;
      trace.s_final = st.snext;
      return trace;
    }
    prev_u = st.u;
    prev_v = st.v;
    s = st.snext;
    if (linalg::norm(s) > cfg.divergence_norm) {
      trace.status = RunStatus::Diverged;
      trace.s_final = s;
      return trace;
    }
  }
  trace.status = RunStatus::MaxIters;
  trace.s_final = s;
  return trace;
}

double equivalence_check(const OperatorSpec& a, const OperatorSpec& b, const PDCertificate& cert,
                         const Vec& x0, const Vec& y0, const DRSConfig& cfg, int horizon) {
  if (cfg.selection.mode != ResolventSelection::Mode::Deterministic)
    throw ConfigError("equivalence_check: deterministic selection required");
  const double g = cfg.gamma;
  const double alpha = alpha_drs(g, cert.beta_p, cert.beta_d);
  const double lambda = cfg.lambda.kind == LambdaRule::Kind::Fixed ? cfg.lambda.value
                                                                   : cfg.lambda.value * 2.0 * alpha;

  std::mt19937_64 rng_drs(cfg.selection.seed);
  std::mt19937_64 rng_pppa(cfg.selection.seed);

  Vec s = linalg::axpy(x0, -g, y0);
  Vec x = x0, y = y0;
  double deviation = 0;
  for (int k = 0; k < horizon; ++k) {
    const DrsStepResult st = drs_step(a, b, s, g, lambda, cfg.selection, rng_drs);
    const Vec ybar_drs =
        linalg::scale(1.0 / g, linalg::sub(linalg::sub(linalg::scale(2.0, st.u), s), st.v));

    const auto pd = primal_dual_preconditioned_resolvent(a, b, g, x, y, cfg.selection, rng_pppa);

    deviation = std::max(deviation, linalg::norm(linalg::sub(s, linalg::axpy(x, -g, y))));
    deviation = std::max(deviation, linalg::norm(linalg::sub(st.u, pd.xbar)));
    deviation = std::max(deviation, linalg::norm(linalg::sub(ybar_drs, pd.ybar)));

    s = st.snext;
    x = linalg::axpy(x, lambda, linalg::sub(pd.xbar, x));
    y = linalg::axpy(y, lambda, linalg::sub(pd.ybar, y));
  }
  return deviation;
}

double spectral_lambda_bar_toy(double a, double b) {
  if (!(b > 0.0)) throw Error("spectral_lambda_bar_toy: requires b > 0");
  return 2.0 * (1.0 + b / (a * a + b * b));
}

std::optional<double> spectral_lambda_bar_saddle(double a, double b, double gamma) {
  if (a == 0.0 || b == 0.0 || !(gamma > 0.0))
    throw Error("spectral_lambda_bar_saddle: requires a, b != 0 and gamma > 0");
  if (b < 0.0) {
    if (a * a == b * b) return std::nullopt;
    const double lo = std::min(-1.0 / b, -b / (a * a));
    const double hi = std::max(-1.0 / b, -b / (a * a));
    if (!(gamma > lo && gamma < hi)) return std::nullopt;
  }
  const double bar = 2.0 * (a * a * gamma + b) * (1.0 + gamma * b) / (gamma * (a * a + b * b));
  if (!(bar > 0.0)) return std::nullopt;
  return bar;
}

linalg::GeneralMatrix toy_ppa_step_matrix(double a, double b, double lambda) {
  using linalg::GeneralMatrix;
  const GeneralMatrix t(2, {b, a, -a, b});
  const GeneralMatrix j = linalg::inverse(add(GeneralMatrix::identity(2), t));
  return add(GeneralMatrix::identity(2), scale(lambda, sub(j, GeneralMatrix::identity(2))));
}

linalg::GeneralMatrix saddle_drs_step_matrix(double a, double b, double gamma, double lambda) {
  using linalg::GeneralMatrix;
  const GeneralMatrix skew(2, {0.0, a, -a, 0.0});
  const GeneralMatrix hbar =
      linalg::inverse(add(GeneralMatrix::identity(2), scale(gamma, skew)));
  const GeneralMatrix bmat(2, {b, 0.0, 0.0, b});
  const GeneralMatrix jb =
      linalg::inverse(add(GeneralMatrix::identity(2), scale(gamma, bmat)));
  const GeneralMatrix hhat =
      jb.multiply(sub(scale(2.0, hbar), GeneralMatrix::identity(2)));
  return add(GeneralMatrix::identity(2), scale(lambda, sub(hhat, hbar)));
}

std::vector<ScanPoint> spectral_scan(const StepMatrixBuilder& builder,
                                     const std::vector<double>& lambda_grid) {
  std::vector<ScanPoint> out;
  out.reserve(lambda_grid.size());
  for (double lam : lambda_grid)
    out.push_back(ScanPoint{lam, linalg::spectral_radius(builder(lam))});
  return out;
}

double find_unit_radius_crossing(const StepMatrixBuilder& builder, double lo, double hi,
                                 double tol) {
  auto f = [&](double lam) { return linalg::spectral_radius(builder(lam)) - 1.0; };
  double flo = f(lo);
  double fhi = f(hi);
  if (flo * fhi > 0.0)
    throw Error("find_unit_radius_crossing: no sign change on the supplied bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (flo * fm <= 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

NonmonotonicityReport nonmonotonicity_report(double a, double b) {
  if (a == 0.0 || b == 0.0) throw Error("nonmonotonicity_report: requires a, b != 0");
  using linalg::GeneralMatrix;
  const GeneralMatrix tp(2, {b, a, -a, b});
  // dual: A^{-1} + B^{-1} with A the skew part, B = b I
  const GeneralMatrix skew(2, {0.0, a, -a, 0.0});
  const GeneralMatrix td = add(linalg::inverse(skew), scale(1.0 / b, GeneralMatrix::identity(2)));
  GeneralMatrix tpd(4, 4);
  tpd(0, 1) = a;
  tpd(1, 0) = -a;
  tpd(0, 2) = 1.0;
  tpd(1, 3) = 1.0;
  tpd(2, 0) = -1.0;
  tpd(3, 1) = -1.0;
  tpd(2, 2) = 1.0 / b;
  tpd(3, 3) = 1.0 / b;
  return NonmonotonicityReport{tp.trace(), td.trace(), tpd.trace()};
}

}  // namespace semisplit
