#include "semisplit/pppa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semisplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_scaled_identity(const SymMatrix& m, double* sigma) {
  const int n = m.n();
  const double d = m(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double want = (i == j) ? d : 0.0;
      if (std::abs(m(i, j) - want) > 1e-14 * std::max(1.0, std::abs(d))) return false;
    }
  *sigma = d;
  return true;
}

// Detects the Douglas-Rachford block preconditioner and recovers gamma.
bool is_drs_embedding(const SymMatrix& m, double* gamma) {
  const int n2 = m.n();
  if (n2 % 2 != 0) return false;
  const int n = n2 / 2;
  const double ginv = m(0, 0);
  if (!(ginv > 0.0)) return false;
  const double g = 1.0 / ginv;
  const double tol = 1e-12 * std::max(1.0, g + ginv);
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j) {
      double want = 0.0;
      if (i == j) want = (i < n) ? ginv : g;
      if (i + n == j || j + n == i) want = -1.0;
      if (std::abs(m(i, j) - want) > tol) return false;
    }
  *gamma = g;
  return true;
}

}  // namespace

Preconditioner Preconditioner::from_matrix(const SymMatrix& m, double rank_tol) {
  Preconditioner p;
  p.m = m;
  p.z = linalg::range_basis(m, rank_tol);
  const int n = m.n();
  p.pi = SymMatrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0;
      for (int c = 0; c < p.z.cols(); ++c) s += p.z(i, c) * p.z(j, c);
      p.pi.set(i, j, s);
    }
  p.q = linalg::derived_q(m, p.z);
  return p;
}

Preconditioner Preconditioner::identity(int n) { return from_matrix(SymMatrix::identity(n)); }

Preconditioner Preconditioner::scaled_identity(int n, double sigma) {
  return from_matrix(linalg::scale(sigma, SymMatrix::identity(n)));
}

Preconditioner Preconditioner::drs_embedding(int n, double gamma) {
  SymMatrix m(2 * n);
  for (int i = 0; i < n; ++i) {
    m.set(i, i, 1.0 / gamma);
    m.set(n + i, n + i, gamma);
    m.set(i, n + i, -1.0);
  }
  return from_matrix(m);
}

double eta_min(const Preconditioner& p, const SymMatrix& v) {
  const int r = p.z.cols();
  if (r == 0) return 1.0;
  // X = Z'QZ, similarity X^{1/2} Z'VZ X^{1/2}
  SymMatrix x(r);
  SymMatrix zvz(r);
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) {
      double xs = 0, vs = 0;
      for (int a = 0; a < p.n(); ++a)
        for (int b = 0; b < p.n(); ++b) {
          xs += p.z(a, i) * p.q(a, b) * p.z(b, j);
          vs += p.z(a, i) * v(a, b) * p.z(b, j);
        }
      x.set(i, j, xs);
      zvz.set(i, j, vs);
    }
  const SymMatrix xh = linalg::sym_sqrt(x);
  const auto xg = xh.to_general();
  const auto prod = xg.multiply(zvz.to_general()).multiply(xg);
  const auto eig = linalg::sym_eigen(SymMatrix::from_general(prod));
  return 1.0 + eig.values.front();
}

double alpha_k(const Preconditioner& p, const SymMatrix& v, const Vec& x, const Vec& xbar) {
  const Vec d = linalg::sub(x, xbar);
  const Vec md = p.m.apply(d);
  const double den = linalg::dot(d, md);
  if (!(den > 0.0))
    throw ZeroDetectedError("alpha_k: M-seminorm of x - xbar vanishes");
  return 1.0 + v.quad(md) / den;
}

StepResult pppa_step(const OperatorSpec& t, const Preconditioner& p, const SymMatrix& v,
                     const Vec& x, const LambdaRule& rule, const ResolventSelection& sel,
                     std::mt19937_64& rng, double stop_tol, const Vec* bias) {
  StepResult out;

  double sigma = 0, gamma = 0;
  if (is_scaled_identity(p.m, &sigma) && sigma > 0.0) {
    out.xbar = resolvent(t, 1.0 / sigma, x, sel, rng, bias).choice;
  } else if (const auto* pd = t.get_if<PrimalDualOp>(); pd && is_drs_embedding(p.m, &gamma)) {
    const int n = pd->a->dim();
    const Vec xs(x.begin(), x.begin() + n);
    const Vec ys(x.begin() + n, x.end());
    const auto res = primal_dual_preconditioned_resolvent(*pd->a, *pd->b, gamma, xs, ys, sel, rng);
    out.xbar.resize(2 * n);
    std::copy(res.xbar.begin(), res.xbar.end(), out.xbar.begin());
    std::copy(res.ybar.begin(), res.ybar.end(), out.xbar.begin() + n);
  } else if (const auto* lin = t.get_if<LinearOp>()) {
    // (M + T) xbar = M x solved directly for linear T
    const int n = p.n();
    linalg::GeneralMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = p.m(i, j) + lin->m(i, j);
    out.xbar = linalg::solve(a, p.m.apply(x));
  } else {
    throw Error("pppa_step: unsupported preconditioner/operator combination");
  }

  out.vbar = p.m.apply(linalg::sub(x, out.xbar));
  const double seminorm_sq = linalg::dot(linalg::sub(x, out.xbar), out.vbar);
  // A vanishing M-seminorm is the nondegeneracy boundary; declaring a zero
  // additionally requires |vbar| <= stop_tol so that xbar is a zero of T
  // within the stopping tolerance.
  if (seminorm_sq == 0.0 ||
      (seminorm_sq <= stop_tol * stop_tol && linalg::norm(out.vbar) <= stop_tol)) {
    out.zero_found = true;
    out.alpha = eta_min(p, v);
    out.lambda = 0.0;
    out.xnext = out.xbar;
    return out;
  }

  out.alpha = 1.0 + v.quad(out.vbar) / seminorm_sq;
  if (rule.kind == LambdaRule::Kind::Fixed) {
    out.lambda = rule.value;
    out.relax_warning = !(out.lambda < 2.0 * out.alpha);
  } else {
    out.lambda = rule.value * 2.0 * out.alpha;
  }
  out.xnext = linalg::axpy(x, out.lambda, linalg::sub(out.xbar, x));
  return out;
}

namespace {

void validate_certificate(const OperatorSpec& t, const MintyCertificate& cert,
                          std::mt19937_64& rng) {
  for (const Vec& xs : cert.sstar) {
    if (zero_residual(t, xs) > 1e-10)
      throw AssumptionViolatedError("certificate: designated solution is not a zero of T");
  }
  const double radius = 5.0;
  for (int i = 0; i < 1000; ++i) {
    const GraphSample g = sample_graph(t, rng, radius);
    const double qv = cert.v.quad(g.y);
    const double scale = std::max(1.0, linalg::dot(g.y, g.y) + linalg::dot(g.x, g.x));
    for (const Vec& xs : cert.sstar) {
      const double lhs = linalg::dot(g.y, linalg::sub(g.x, xs));
      if (lhs < qv - 1e-9 * scale)
        throw AssumptionViolatedError(
            "certificate: sampled graph point violates the oblique weak Minty inequality");
    }
  }
}

}  // namespace

IterateTrace run_pppa(const OperatorSpec& t, const Preconditioner& p, const MintyCertificate& cert,
                      const Vec& x0, const PPPAConfig& cfg) {
  if (!(eta_min(p, cert.v) > 0.0))
    throw AssumptionViolatedError("run_pppa: eta_min <= 0, the validity gate fails");
  std::mt19937_64 rng(cfg.selection.seed);
  if (cfg.validate_certificate) validate_certificate(t, cert, rng);

  IterateTrace trace;
  Vec x = x0;
  Vec prev_xbar;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Vec* bias = prev_xbar.empty() ? nullptr : &prev_xbar;
    const StepResult st = pppa_step(t, p, cert.v, x, cfg.lambda, cfg.selection, rng,
                                    cfg.stop_tol, bias);

    IterateRecord rec;
    rec.k = k;
    rec.x = x;
    rec.xbar = st.xbar;
    rec.vbar = st.vbar;
    rec.vbar_norm = linalg::norm(st.vbar);
    rec.alpha = st.alpha;
    rec.lambda = st.lambda;
    rec.relax_warning = st.relax_warning;
    trace.any_relax_warning = trace.any_relax_warning || st.relax_warning;
    if (!(st.lambda > 0.0 && st.lambda < 2.0)) trace.lambda_exceeded_two = true;

    if (cfg.diagnostics && !st.zero_found) {
      const Vec w = p.project(x);
      const Vec wbar = p.project(st.xbar);
      const Vec wnext = p.project(st.xnext);
      rec.shadow_res = std::sqrt(std::max(0.0, p.q_norm_sq(linalg::sub(w, wbar))));
      if (!cert.sstar.empty())
        rec.fejer_gap = fejer_gap(p, cert, w, wnext, wbar, st.lambda, st.alpha);
    }

    const double vbar_norm = rec.vbar_norm;
    trace.records.push_back(std::move(rec));

    if (st.zero_found) {
      trace.status = RunStatus::ZeroFound;
      trace.x_final = x;
      trace.xbar_final = st.xbar;
      return trace;
    }
    if (vbar_norm <= cfg.stop_tol) {
      trace.status = RunStatus::Converged;
      trace.x_final = st.xnext;
      trace.xbar_final = st.xbar;
      return trace;
    }
    prev_xbar = st.xbar;
    x = st.xnext;
    if (linalg::norm(x) > cfg.divergence_norm) {
      trace.status = RunStatus::Diverged;
      trace.x_final = x;
      trace.xbar_final = st.xbar;
      return trace;
    }
  }
  trace.status = RunStatus::MaxIters;
  trace.x_final = x;
  trace.xbar_final = trace.records.empty() ? x : trace.records.back().xbar;
  return trace;
}

HalfspaceReport halfspace_diagnostics(const Preconditioner& p, const SymMatrix& v,
                                      const MintyCertificate& cert, const Vec& x, const Vec& xbar,
                                      const Vec& xnext, double lambda) {
  HalfspaceReport rep;
  const Vec w = p.project(x);
  const Vec wbar = p.project(xbar);
  const Vec diff = linalg::sub(w, wbar);
  const Vec qdiff = p.q.apply(diff);
  const double qv = v.quad(qdiff);
  for (const Vec& xs : cert.sstar) {
    const Vec ws = p.project(xs);
    // membership slack of w* in the halfspace {r : <w-wbar, wbar-r>_Q >= q_V}
    rep.sstar_slacks.push_back(linalg::dot(qdiff, linalg::sub(wbar, ws)) - qv);
  }
  const double den = linalg::dot(diff, qdiff);
  const double alpha_half = 1.0 + qv / den;
  rep.alpha_consistency = std::abs(alpha_half - alpha_k(p, v, x, xbar));

  const double ratio = lambda / alpha_half;
  // (1 - l/a) w + (l/a)(w + a(wbar - w)) = w + l(wbar - w)
  Vec proj = linalg::axpy(w, alpha_half, linalg::sub(wbar, w));
  Vec expect = linalg::add(linalg::scale(1.0 - ratio, w), linalg::scale(ratio, proj));
  rep.projection_residual = linalg::norm(linalg::sub(p.project(xnext), expect));
  return rep;
}

double fejer_gap(const Preconditioner& p, const MintyCertificate& cert, const Vec& w_prev,
                 const Vec& w_next, const Vec& wbar, double lambda, double alpha) {
  const double dec = lambda * (2.0 * alpha - lambda) * p.q_norm_sq(linalg::sub(w_prev, wbar));
  double gap = kInf;
  for (const Vec& xs : cert.sstar) {
    const Vec ws = p.project(xs);
    const double before = p.q_norm_sq(linalg::sub(w_prev, ws));
    const double after = p.q_norm_sq(linalg::sub(w_next, ws));
    gap = std::min(gap, before - dec - after);
  }
  return gap;
}

RateCertificate rate_certificate(const IterateTrace& trace, const MintyCertificate& cert,
                                 const Preconditioner& p, std::optional<double> kappa) {
  if (trace.records.empty()) throw InsufficientDataError("rate_certificate: empty trace");
  double realized = kInf;
  double lhs = kInf;
  for (const auto& r : trace.records) {
    lhs = std::min(lhs, r.vbar_norm * r.vbar_norm);
    if (r.lambda > 0.0) realized = std::min(realized, r.lambda * (2.0 * r.alpha - r.lambda));
  }
  if (realized == kInf) realized = 1.0;  // zero found on the first step; bound is trivial
  const double kap = kappa.value_or(realized);
  if (realized < kap - 1e-12)
    throw KappaViolatedError("rate_certificate: trace violates the supplied kappa");
  const auto eig = linalg::sym_eigen(p.m);
  const double mnorm = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  const Vec& x0 = trace.records.front().x;
  double best = kInf;
  for (const Vec& xs : cert.sstar)
    best = std::min(best, p.m.quad(linalg::sub(x0, xs)));
  const double n1 = static_cast<double>(trace.records.size());
  RateCertificate out;
  out.lhs = lhs;
  out.rhs = mnorm * best / (n1 * kap);
  out.kappa = kap;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

RLinearFit rlinear_fit(const std::vector<double>& residuals, double tail_fraction) {
  const size_t n = residuals.size();
  const size_t start = static_cast<size_t>(std::floor(n * (1.0 - tail_fraction)));
  std::vector<std::pair<double, double>> pts;  // (k, log r_k)
  for (size_t k = start; k < n; ++k)
    if (residuals[k] > 0.0) pts.emplace_back(static_cast<double>(k), std::log(residuals[k]));
  if (pts.size() < 20)
    throw InsufficientDataError("rlinear_fit: fewer than 20 positive tail residuals");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double m = static_cast<double>(pts.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double ss_tot = syy - sy * sy / m;
  const double intercept = (sy - slope * sx) / m;
  double ss_res = 0;
  for (const auto& [x, y] : pts) {
    const double e = y - (intercept + slope * x);
    ss_res += e * e;
  }
  RLinearFit out;
  out.q = std::exp(slope);
  out.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  out.points = static_cast<int>(pts.size());
  return out;
}

RLinearFit rlinear_fit(const IterateTrace& trace, double tail_fraction) {
  std::vector<double> res;
  for (const auto& r : trace.records) res.push_back(r.shadow_res);
  return rlinear_fit(res, tail_fraction);
}

}  // namespace semisplit
