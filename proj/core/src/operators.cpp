#include "semisplit/operators.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"

namespace semisplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBreakMatchTol = 1e-13;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

double ScalarSet::distance(double v) const {
  if (interval) return std::max({lo - v, v - hi, 0.0});
  double d = kInf;
  for (double p : points) d = std::min(d, std::abs(v - p));
  return d;
}

ValueSet ValueSet::single(Vec v) {
  ValueSet s;
  s.points.push_back(std::move(v));
  return s;
}

ValueSet ValueSet::from_scalar_set(const ScalarSet& s) {
  ValueSet v;
  if (s.interval) {
    v.interval = true;
    v.lo = s.lo;
    v.hi = s.hi;
  } else {
    for (double p : s.points) v.points.push_back(Vec{p});
  }
  return v;
}

double ValueSet::distance(const Vec& v) const {
  if (interval) {
    assert(v.size() == 1);
    return std::max({lo - v[0], v[0] - hi, 0.0});
  }
  double d = kInf;
  for (const Vec& p : points) d = std::min(d, linalg::norm(linalg::sub(v, p)));
  return d;
}

double ValueSet::min_norm() const {
  if (interval) return std::max({lo, -hi, 0.0});
  double d = kInf;
  for (const Vec& p : points) d = std::min(d, linalg::norm(p));
  return d;
}

RadialProfile RadialProfile::constant_one() {
  return RadialProfile({Piece{0.0, kInf, 0.0, 1.0}});
}

RadialProfile RadialProfile::zero_band() {
  return RadialProfile({
      Piece{0.0, 0.4, 1.0, 0.0},
      Piece{0.4, 0.8, -1.0, 0.8},
      Piece{0.8, 1.0, 0.0, 0.0},
      Piece{1.0, 1.4, 2.5, -2.5},
      Piece{1.4, kInf, 0.0, 1.0},
  });
}

double RadialProfile::operator()(double r) const {
  for (const Piece& p : pieces_)
    if (r >= p.lo && (r < p.hi || p.hi == kInf)) return p.slope * r + p.intercept;
  const Piece& last = pieces_.back();
  return last.slope * r + last.intercept;
}

bool RadialProfile::is_constant_one() const {
  return pieces_.size() == 1 && pieces_[0].slope == 0.0 && pieces_[0].intercept == 1.0;
}

int OperatorSpec::dim() const {
  struct Visitor {
    int operator()(const LinearOp& op) const { return op.m.rows(); }
    int operator()(const ScaledIdentityOp& op) const { return op.n; }
    int operator()(const RotationalOp&) const { return 2; }
    int operator()(const PiecewiseGradientOp&) const { return 1; }
    int operator()(const ShiftedOp&) const { return 1; }
    int operator()(const PrimalDualOp& op) const { return 2 * op.a->dim(); }
  };
  return std::visit(Visitor{}, v_);
}

namespace {

// Flatten the 1-D operators that have a piecewise description so the
// inversion machinery can treat them uniformly.
struct Pieces1D {
  std::vector<PiecewisePiece> pieces;
  std::vector<PiecewiseBreak> breaks;
};

Pieces1D as_pieces(const OperatorSpec& op) {
  if (const auto* pw = op.get_if<PiecewiseGradientOp>()) return {pw->pieces, pw->breaks};
  if (const auto* si = op.get_if<ScaledIdentityOp>()) {
    if (si->n != 1) throw Error("as_pieces: scaled identity is not one-dimensional");
    return {{PiecewisePiece{-kInf, kInf, si->alpha, 0.0}}, {}};
  }
  if (const auto* lin = op.get_if<LinearOp>()) {
    if (lin->m.rows() != 1) throw Error("as_pieces: linear operator is not one-dimensional");
    return {{PiecewisePiece{-kInf, kInf, lin->m(0, 0), 0.0}}, {}};
  }
  throw Error("as_pieces: operator has no one-dimensional piecewise form");
}

bool matches_break(double x, double xb) {
  return std::abs(x - xb) <= kBreakMatchTol * std::max(1.0, std::abs(xb));
}

ScalarSet eval_pieces(const Pieces1D& pw, double x) {
  for (const auto& b : pw.breaks)
    if (matches_break(x, b.x)) return b.values;
  for (const auto& p : pw.pieces)
    if (x > p.lo && x < p.hi) return ScalarSet::single(p.slope * x + p.intercept);
  throw OutOfDomainError("piecewise operator: point not covered by any piece");
}

// All z with target in base(z) + xi*z.
ScalarSet preimage_with_shift(const Pieces1D& pw, double xi, double target) {
  ScalarSet out;
  std::vector<double> vals;
  for (const auto& p : pw.pieces) {
    const double m = p.slope + xi;
    if (m != 0.0) {
      const double z = (target - p.intercept) / m;
      if (z > p.lo && z < p.hi) vals.push_back(z);
    } else if (target == p.intercept) {
      // whole piece solves; keep the finite endpoints as representatives
      if (p.lo != -kInf) vals.push_back(p.lo);
      if (p.hi != kInf) vals.push_back(p.hi);
    }
  }
  for (const auto& b : pw.breaks) {
    ScalarSet shifted = b.values;
    if (shifted.interval) {
      shifted.lo += xi * b.x;
      shifted.hi += xi * b.x;
    } else {
      for (double& v : shifted.points) v += xi * b.x;
    }
    if (shifted.contains(target, kBreakMatchTol * std::max(1.0, std::abs(target))))
      vals.push_back(b.x);
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
             vals.end());
  out.points = std::move(vals);
  return out;
}

ValueSet inverse_values(const OperatorSpec& op, const Vec& y);

double sample_scalar(const ScalarSet& s, std::mt19937_64& rng) {
  if (s.interval) {
    const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return s.lo + t * (s.hi - s.lo);
  }
  if (s.points.empty()) throw OutOfDomainError("sample_scalar: empty set");
  if (s.points.size() == 1) return s.points[0];
  return s.points[rng() % s.points.size()];
}

Vec sample_values(const ValueSet& s, std::mt19937_64& rng) {
  if (s.interval) {
    const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return Vec{s.lo + t * (s.hi - s.lo)};
  }
  if (s.points.empty()) throw OutOfDomainError("sample_values: empty set");
  if (s.points.size() == 1) return s.points[0];
  return s.points[rng() % s.points.size()];
}

}  // namespace

ValueSet evaluate(const OperatorSpec& op, const Vec& x) {
  if (const auto* lin = op.get_if<LinearOp>()) return ValueSet::single(lin->m.apply(x));
  if (const auto* si = op.get_if<ScaledIdentityOp>()) return ValueSet::single(linalg::scale(si->alpha, x));
  if (const auto* rot = op.get_if<RotationalOp>()) {
    const double f = rot->profile(linalg::norm(x));
    return ValueSet::single(Vec{f * (rot->b * x[0] + rot->a * x[1]), f * (-rot->a * x[0] + rot->b * x[1])});
  }
  if (op.get_if<PiecewiseGradientOp>()) {
    return ValueSet::from_scalar_set(eval_pieces(as_pieces(op), x[0]));
  }
  if (const auto* sh = op.get_if<ShiftedOp>()) {
    const ScalarSet w = preimage_with_shift(as_pieces(*sh->base), sh->xi, x[0]);
    if (w.empty()) throw OutOfDomainError("shifted operator: point outside domain");
    ValueSet out;
    for (double z : w.points) out.points.push_back(Vec{z + sh->nu * x[0]});
    return out;
  }
  if (const auto* pd = op.get_if<PrimalDualOp>()) {
    const int n = pd->a->dim();
    const Vec xs(x.begin(), x.begin() + n);
    const Vec ys(x.begin() + n, x.end());
    const ValueSet av = evaluate(*pd->a, xs);
    const ValueSet bv = inverse_values(*pd->b, ys);
    if (av.interval || bv.interval)
      throw Error("evaluate: interval-valued primal-dual image is not representable; "
                  "use member_residual/zero_residual");
    ValueSet out;
    for (const Vec& a : av.points)
      for (const Vec& binv : bv.points) {
        Vec v(2 * n);
        for (int i = 0; i < n; ++i) v[i] = a[i] + ys[i];
        for (int i = 0; i < n; ++i) v[n + i] = binv[i] - xs[i];
        out.points.push_back(std::move(v));
      }
    return out;
  }
  throw Error("evaluate: unsupported operator variant");
}

namespace {

ValueSet inverse_values(const OperatorSpec& op, const Vec& y) {
  if (const auto* lin = op.get_if<LinearOp>()) {
    try {
      return ValueSet::single(linalg::solve(lin->m, y));
    } catch (const SingularMatrixError&) {
      return ValueSet{};
    }
  }
  if (const auto* si = op.get_if<ScaledIdentityOp>()) {
    if (si->alpha != 0.0) return ValueSet::single(linalg::scale(1.0 / si->alpha, y));
    if (linalg::norm(y) == 0.0) {
      ValueSet all_line;
      all_line.interval = true;
      all_line.lo = -1e300;
      all_line.hi = 1e300;
      return all_line;
    }
    return ValueSet{};
  }
  if (op.get_if<PiecewiseGradientOp>() || op.get_if<ShiftedOp>()) {
    return ValueSet::from_scalar_set(preimage_1d(op, y[0]));
  }
  throw Error("inverse_values: unsupported operator variant");
}

}  // namespace

double member_residual(const OperatorSpec& op, const Vec& x, const Vec& y) {
  if (const auto* pd = op.get_if<PrimalDualOp>()) {
    const int n = pd->a->dim();
    const Vec xs(x.begin(), x.begin() + n);
    const Vec ys(x.begin() + n, x.end());
    const Vec v1(y.begin(), y.begin() + n);
    const Vec v2(y.begin() + n, y.end());
    const double r1 = member_residual(*pd->a, xs, linalg::sub(v1, ys));
    const double r2 = inverse_values(*pd->b, ys).distance(linalg::add(v2, xs));
    return std::hypot(r1, r2);
  }
  return evaluate(op, x).distance(y);
}

double zero_residual(const OperatorSpec& op, const Vec& x) {
  if (const auto* pd = op.get_if<PrimalDualOp>()) {
    const int n = pd->a->dim();
    const Vec xs(x.begin(), x.begin() + n);
    const Vec ys(x.begin() + n, x.end());
    const double r1 = evaluate(*pd->a, xs).distance(linalg::scale(-1.0, ys));
    const double r2 = inverse_values(*pd->b, ys).distance(xs);
    return std::hypot(r1, r2);
  }
  return evaluate(op, x).min_norm();
}

ScalarSet preimage_1d(const OperatorSpec& op, double y) {
  if (op.get_if<PiecewiseGradientOp>() || op.get_if<ScaledIdentityOp>() || op.get_if<LinearOp>()) {
    const Pieces1D pw = as_pieces(op);
    ScalarSet out;
    std::vector<double> vals;
    for (const auto& p : pw.pieces) {
      if (p.slope != 0.0) {
        const double x = (y - p.intercept) / p.slope;
        if (x > p.lo && x < p.hi) vals.push_back(x);
      } else if (y == p.intercept) {
        if (p.lo == -kInf && p.hi == kInf) return ScalarSet::closed(-1e300, 1e300);
        return ScalarSet::closed(p.lo, p.hi);
      }
    }
    for (const auto& b : pw.breaks)
      if (b.values.contains(y, kBreakMatchTol * std::max(1.0, std::abs(y)))) vals.push_back(b.x);
    std::sort(vals.begin(), vals.end());
    out.points = std::move(vals);
    return out;
  }
  if (const auto* sh = op.get_if<ShiftedOp>()) {
    // x in T^{-1}(y) iff x in (base + xi id)(y - nu x)
    const Pieces1D pw = as_pieces(*sh->base);
    std::vector<double> vals;
    for (const auto& p : pw.pieces) {
      const double m = p.slope + sh->xi;
      const double den = 1.0 + sh->nu * m;
      if (den != 0.0) {
        const double x = (m * y + p.intercept) / den;
        const double w = y - sh->nu * x;
        if (w > p.lo && w < p.hi) vals.push_back(x);
      }
    }
    for (const auto& b : pw.breaks) {
      if (sh->nu != 0.0) {
        const double x = (y - b.x) / sh->nu;
        ScalarSet shifted = b.values;
        if (shifted.interval) {
          shifted.lo += sh->xi * b.x;
          shifted.hi += sh->xi * b.x;
        } else {
          for (double& v : shifted.points) v += sh->xi * b.x;
        }
        if (shifted.contains(x, kBreakMatchTol * std::max(1.0, std::abs(x)))) vals.push_back(x);
      } else if (y == b.x) {
        ScalarSet shifted = b.values;
        if (shifted.interval) return ScalarSet::closed(shifted.lo + sh->xi * b.x, shifted.hi + sh->xi * b.x);
        for (double v : shifted.points) vals.push_back(v + sh->xi * b.x);
      }
    }
    std::sort(vals.begin(), vals.end());
    ScalarSet out;
    out.points = std::move(vals);
    return out;
  }
  throw Error("preimage_1d: unsupported operator variant");
}

std::vector<double> rotational_resolvent_radius(double a, double b, const RadialProfile& profile,
                                                double gamma, double snorm) {
  if (snorm < 0) throw Error("rotational_resolvent_radius: snorm must be nonnegative");
  if (snorm == 0.0) return {0.0};

  const auto factor = [&](double f) {
    return std::hypot(1.0 + gamma * f * b, gamma * f * a);
  };
  // smallest stretch factor over the profile's value range bounds the largest
  // admissible radius
  double hmin = kInf;
  for (const auto& p : profile.pieces()) {
    for (double r : {p.lo, std::isfinite(p.hi) ? p.hi : p.lo + 1.0})
      hmin = std::min(hmin, factor(p.slope * r + p.intercept));
    if (p.slope != 0.0 && a * a + b * b > 0.0) {
      const double fstar = -b / (gamma * (a * a + b * b));
      const double rstar = (fstar - p.intercept) / p.slope;
      if (rstar > p.lo && rstar < p.hi) hmin = std::min(hmin, factor(fstar));
    }
  }
  const double rcap = snorm / std::max(hmin, 1e-8) + 1.0;

  const auto g = [&](double r) { return r * factor(profile(r)) - snorm; };

  std::vector<double> roots;
  const int samples = 256;
  for (const auto& p : profile.pieces()) {
    const double lo = p.lo;
    const double hi = std::min(std::isfinite(p.hi) ? p.hi : rcap, rcap);
    if (hi <= lo) continue;
    double prev_r = lo;
    double prev_g = g(lo);
    for (int i = 1; i <= samples; ++i) {
      const double r = lo + (hi - lo) * i / samples;
      const double cur_g = g(r);
      if (std::abs(prev_g) <= 1e-13 * std::max(1.0, snorm)) roots.push_back(prev_r);
      if (prev_g * cur_g < 0.0) {
        double ra = prev_r, rb = r, ga = prev_g;
        for (int it = 0; it < 200 && rb - ra > 1e-13; ++it) {
          const double mid = 0.5 * (ra + rb);
          const double gm = g(mid);
          if (ga * gm <= 0.0) {
            rb = mid;
          } else {
            ra = mid;
            ga = gm;
          }
        }
        roots.push_back(0.5 * (ra + rb));
      }
      prev_r = r;
      prev_g = cur_g;
    }
    if (std::abs(prev_g) <= 1e-13 * std::max(1.0, snorm)) roots.push_back(prev_r);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) { return std::abs(x - y) <= 1e-9; }),
              roots.end());
  if (roots.empty())
    throw RootSolveError("rotational_resolvent_radius: no admissible radius found");
  return roots;
}

namespace {

std::vector<Vec> resolvent_candidates(const OperatorSpec& op, double gamma, const Vec& s) {
  if (const auto* lin = op.get_if<LinearOp>()) {
    const int n = lin->m.rows();
    linalg::GeneralMatrix a = linalg::GeneralMatrix::identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) += gamma * lin->m(i, j);
    try {
      return {linalg::solve(a, s)};
    } catch (const SingularMatrixError&) {
      throw EmptyResolventError("resolvent: id + gamma*linear is singular");
    }
  }
  if (const auto* si = op.get_if<ScaledIdentityOp>()) {
    const double den = 1.0 + gamma * si->alpha;
    if (den == 0.0) {
      if (linalg::norm(s) == 0.0) return {Vec(si->n, 0.0)};
      throw EmptyResolventError("resolvent: 1 + gamma*alpha = 0");
    }
    return {linalg::scale(1.0 / den, s)};
  }
  if (const auto* rot = op.get_if<RotationalOp>()) {
    const double snorm = linalg::norm(s);
    const auto radii = rotational_resolvent_radius(rot->a, rot->b, rot->profile, gamma, snorm);
    std::vector<Vec> cands;
    for (double r : radii) {
      const double f = rot->profile(r);
      const double c = 1.0 + gamma * f * rot->b;
      const double d = gamma * f * rot->a;
      const double den = c * c + d * d;
      if (den == 0.0) continue;
      Vec x{(c * s[0] - d * s[1]) / den, (d * s[0] + c * s[1]) / den};
      // keep only candidates that really satisfy the inclusion
      const Vec tv = evaluate(op, x).points[0];
      if (linalg::norm(linalg::sub(s, linalg::axpy(x, gamma, tv))) <=
          1e-8 * std::max(1.0, snorm))
        cands.push_back(std::move(x));
    }
    if (cands.empty()) throw EmptyResolventError("resolvent: rotational candidates all rejected");
    return cands;
  }
  if (op.get_if<PiecewiseGradientOp>()) {
    const Pieces1D pw = as_pieces(op);
    std::vector<double> xs;
    for (const auto& p : pw.pieces) {
      const double den = 1.0 + gamma * p.slope;
      if (den != 0.0) {
        const double x = (s[0] - gamma * p.intercept) / den;
        if (x > p.lo && x < p.hi) xs.push_back(x);
      } else if (s[0] == gamma * p.intercept) {
        if (p.lo != -kInf) xs.push_back(p.lo);
        if (p.hi != kInf) xs.push_back(p.hi);
      }
    }
    for (const auto& b : pw.breaks) {
      const double want = (s[0] - b.x) / gamma;
      if (b.values.contains(want, kBreakMatchTol * std::max(1.0, std::abs(want))))
        xs.push_back(b.x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-13; }),
             xs.end());
    if (xs.empty()) throw EmptyResolventError("resolvent: no piecewise candidate (gamma outside full-domain range?)");
    std::vector<Vec> cands;
    for (double x : xs) cands.push_back(Vec{x});
    return cands;
  }
  if (const auto* sh = op.get_if<ShiftedOp>()) {
    // s in x + gamma T(x) with T = (base + xi id)^{-1} + nu id reduces, piece
    // by piece of the base, to a linear equation in the inner variable w.
    const Pieces1D pw = as_pieces(*sh->base);
    const double denx = 1.0 + gamma * sh->nu;
    std::vector<double> xs;
    if (std::abs(denx) < 1e-14) {
      const double w = s[0] / gamma;
      const ScalarSet vals = eval_pieces(pw, w);
      if (vals.interval) {
        xs.push_back(vals.lo + sh->xi * w);
        xs.push_back(vals.hi + sh->xi * w);
      } else {
        for (double v : vals.points) xs.push_back(v + sh->xi * w);
      }
    } else {
      for (const auto& p : pw.pieces) {
        const double m = p.slope + sh->xi;
        const double den = denx * m + gamma;
        if (den == 0.0) continue;
        const double w = (s[0] - denx * p.intercept) / den;
        if (w > p.lo && w < p.hi) xs.push_back((s[0] - gamma * w) / denx);
      }
      for (const auto& b : pw.breaks) {
        const double x = (s[0] - gamma * b.x) / denx;
        ScalarSet shifted = b.values;
        if (shifted.interval) {
          shifted.lo += sh->xi * b.x;
          shifted.hi += sh->xi * b.x;
        } else {
          for (double& v : shifted.points) v += sh->xi * b.x;
        }
        if (shifted.contains(x, kBreakMatchTol * std::max(1.0, std::abs(x)))) xs.push_back(x);
      }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-13; }),
             xs.end());
    if (xs.empty()) throw EmptyResolventError("resolvent: no candidate for shifted operator");
    std::vector<Vec> cands;
    for (double x : xs) cands.push_back(Vec{x});
    return cands;
  }
  throw Error("resolvent: unsupported operator variant (primal-dual goes through the preconditioned step)");
}

}  // namespace

ResolventResult resolvent(const OperatorSpec& op, double gamma, const Vec& s,
                          const ResolventSelection& sel, std::mt19937_64& rng, const Vec* bias) {
  if (!(gamma > 0.0)) throw Error("resolvent: gamma must be positive");
  std::vector<Vec> cands = resolvent_candidates(op, gamma, s);
  ResolventResult out;
  if (cands.size() == 1 || sel.mode == ResolventSelection::Mode::Deterministic) {
    const Vec& ref = bias ? *bias : s;
    size_t best = 0;
    double best_d = kInf;
    for (size_t i = 0; i < cands.size(); ++i) {
      const double d = linalg::norm(linalg::sub(cands[i], ref));
      if (d < best_d - 1e-12) {
        best = i;
        best_d = d;
      }
    }
    out.choice = cands[best];
  } else {
    out.choice = cands[rng() % cands.size()];
  }
  out.all = std::move(cands);
  return out;
}

PdResolventResult primal_dual_preconditioned_resolvent(const OperatorSpec& a, const OperatorSpec& b,
                                                       double gamma, const Vec& x, const Vec& y,
                                                       const ResolventSelection& sel,
                                                       std::mt19937_64& rng, const Vec* bias_u,
                                                       const Vec* bias_v) {
  const Vec s = linalg::axpy(x, -gamma, y);
  const Vec u = resolvent(a, gamma, s, sel, rng, bias_u).choice;
  const Vec refl = linalg::sub(linalg::scale(2.0, u), s);
  const Vec v = resolvent(b, gamma, refl, sel, rng, bias_v).choice;
  PdResolventResult out;
  out.u = u;
  out.v = v;
  out.xbar = u;
  out.ybar = linalg::scale(1.0 / gamma, linalg::sub(refl, v));
  return out;
}

namespace {

// value = u + v * gamma
struct AffineExpr {
  double u, v;
  double at(double g) const { return u + v * g; }
};

struct CoverInterval {
  double lo, hi;  // closed; +-inf allowed
};

bool covers_line(std::vector<CoverInterval> iv, double tol) {
  bool has_lo = false;
  for (const auto& c : iv) has_lo = has_lo || (c.lo == -kInf);
  if (!has_lo) return false;
  std::sort(iv.begin(), iv.end(), [](const CoverInterval& a, const CoverInterval& b) {
    return a.lo < b.lo;
  });
  double reach = -kInf;
  for (const auto& c : iv) {
    if (reach == -kInf) {
      if (c.lo != -kInf) return false;
      reach = c.hi;
      continue;
    }
    if (c.lo > reach + tol) return false;
    reach = std::max(reach, c.hi);
    if (reach == kInf) return true;
  }
  return reach == kInf;
}

bool piecewise_covered_at(const Pieces1D& pw, double g) {
  std::vector<CoverInterval> iv;
  double scale = 1.0;
  for (const auto& p : pw.pieces) {
    const double c = 1.0 + g * p.slope;
    const auto val = [&](double x) { return x + g * (p.slope * x + p.intercept); };
    if (p.lo == -kInf && p.hi == kInf) {
      if (c != 0.0)
        iv.push_back({-kInf, kInf});
      else
        iv.push_back({g * p.intercept, g * p.intercept});
      continue;
    }
    if (p.lo == -kInf) {
      const double e = val(p.hi);
      scale = std::max(scale, std::abs(e));
      if (c > 0.0)
        iv.push_back({-kInf, e});
      else if (c < 0.0)
        iv.push_back({e, kInf});
      else
        iv.push_back({e, e});
      continue;
    }
    if (p.hi == kInf) {
      const double e = val(p.lo);
      scale = std::max(scale, std::abs(e));
      if (c > 0.0)
        iv.push_back({e, kInf});
      else if (c < 0.0)
        iv.push_back({-kInf, e});
      else
        iv.push_back({e, e});
      continue;
    }
    const double e1 = val(p.lo);
    const double e2 = val(p.hi);
    scale = std::max({scale, std::abs(e1), std::abs(e2)});
    iv.push_back({std::min(e1, e2), std::max(e1, e2)});
  }
  for (const auto& b : pw.breaks) {
    if (b.values.interval) {
      const double e1 = b.x + g * b.values.lo;
      const double e2 = b.x + g * b.values.hi;
      scale = std::max({scale, std::abs(e1), std::abs(e2)});
      iv.push_back({std::min(e1, e2), std::max(e1, e2)});
    } else {
      for (double y : b.values.points) {
        const double e = b.x + g * y;
        scale = std::max(scale, std::abs(e));
        iv.push_back({e, e});
      }
    }
  }
  return covers_line(std::move(iv), 1e-9 * scale);
}

std::vector<std::pair<double, double>> piecewise_full_domain(const Pieces1D& pw) {
  // Candidate critical stepsizes: slope sign flips and pairwise alignment of
  // the affine endpoint expressions.
  std::vector<AffineExpr> exprs;
  for (const auto& p : pw.pieces) {
    if (p.lo != -kInf) exprs.push_back({p.lo, p.slope * p.lo + p.intercept});
    if (p.hi != kInf) exprs.push_back({p.hi, p.slope * p.hi + p.intercept});
  }
  for (const auto& b : pw.breaks) {
    if (b.values.interval) {
      exprs.push_back({b.x, b.values.lo});
      exprs.push_back({b.x, b.values.hi});
    } else {
      for (double y : b.values.points) exprs.push_back({b.x, y});
    }
  }
  std::vector<double> cand;
  for (const auto& p : pw.pieces)
    if (p.slope < 0.0) cand.push_back(-1.0 / p.slope);
  for (size_t i = 0; i < exprs.size(); ++i)
    for (size_t j = i + 1; j < exprs.size(); ++j) {
      const double dv = exprs[i].v - exprs[j].v;
      if (dv == 0.0) continue;
      const double g = (exprs[j].u - exprs[i].u) / dv;
      if (g > 0.0 && std::isfinite(g)) cand.push_back(g);
    }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, a); }),
             cand.end());

  // test every segment between consecutive candidates, plus the tail
  std::vector<std::pair<double, double>> out;
  double seg_lo = 0.0;
  bool open = false;
  double open_lo = 0.0;
  for (size_t i = 0; i <= cand.size(); ++i) {
    const double seg_hi = (i < cand.size()) ? cand[i] : kInf;
    const double probe = std::isfinite(seg_hi) ? 0.5 * (seg_lo + seg_hi)
                                               : (cand.empty() ? 1.0 : cand.back() * 2.0 + 1.0);
    const bool covered = piecewise_covered_at(pw, probe);
    const bool covered_at_boundary =
        (i < cand.size()) ? piecewise_covered_at(pw, cand[i]) : false;
    if (covered && !open) {
      open = true;
      open_lo = seg_lo;
    }
    if (open && (!covered || i == cand.size())) {
      if (!covered) {
        out.emplace_back(open_lo, seg_lo);
        open = false;
      } else {
        out.emplace_back(open_lo, kInf);
        open = false;
      }
    }
    if (open && covered && i < cand.size() && !covered_at_boundary) {
      // isolated excluded stepsize splits the interval
      out.emplace_back(open_lo, cand[i]);
      open_lo = cand[i];
    }
    seg_lo = seg_hi;
  }
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> full_domain_gamma_intervals(const OperatorSpec& op) {
  if (const auto* si = op.get_if<ScaledIdentityOp>()) {
    if (si->alpha >= 0.0) return {{0.0, kInf}};
    const double split = -1.0 / si->alpha;
    return {{0.0, split}, {split, kInf}};
  }
  if (const auto* lin = op.get_if<LinearOp>()) {
    if (lin->m.rows() == 1) return piecewise_full_domain(as_pieces(op));
    std::set<double> splits;
    for (const auto& lam : linalg::eigenvalues(lin->m))
      if (std::abs(lam.imag()) <= 1e-12 * std::max(1.0, std::abs(lam.real())) && lam.real() < 0.0)
        splits.insert(-1.0 / lam.real());
    std::vector<std::pair<double, double>> out;
    double lo = 0.0;
    for (double s : splits) {
      out.emplace_back(lo, s);
      lo = s;
    }
    out.emplace_back(lo, kInf);
    return out;
  }
  if (const auto* rot = op.get_if<RotationalOp>()) {
    if (rot->b >= 0.0) return {{0.0, kInf}};
    throw Error("full_domain_gamma_intervals: rotational field with b < 0 not supported");
  }
  if (op.get_if<PiecewiseGradientOp>()) return piecewise_full_domain(as_pieces(op));
  throw Error("full_domain_gamma_intervals: unsupported operator variant");
}

GraphSample sample_graph(const OperatorSpec& op, std::mt19937_64& rng, double radius) {
  const auto uniform = [&](double r) {
    const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return -r + 2.0 * r * t;
  };
  if (const auto* sh = op.get_if<ShiftedOp>()) {
    // parameterize the graph by the inner variable: x = b + xi z, y = z + nu x
    const Pieces1D pw = as_pieces(*sh->base);
    const double z = uniform(radius);
    const double bval = sample_scalar(eval_pieces(pw, z), rng);
    const double x = bval + sh->xi * z;
    return GraphSample{Vec{x}, Vec{z + sh->nu * x}};
  }
  if (const auto* pd = op.get_if<PrimalDualOp>()) {
    const int n = pd->a->dim();
    for (int attempt = 0; attempt < 256; ++attempt) {
      Vec xs(n), ys(n);
      for (int i = 0; i < n; ++i) xs[i] = uniform(radius);
      for (int i = 0; i < n; ++i) ys[i] = uniform(radius);
      const ValueSet bv = inverse_values(*pd->b, ys);
      if (bv.empty()) continue;
      const Vec a = sample_values(evaluate(*pd->a, xs), rng);
      const Vec binv = sample_values(bv, rng);
      Vec z(2 * n), v(2 * n);
      for (int i = 0; i < n; ++i) z[i] = xs[i];
      for (int i = 0; i < n; ++i) z[n + i] = ys[i];
      for (int i = 0; i < n; ++i) v[i] = a[i] + ys[i];
      for (int i = 0; i < n; ++i) v[n + i] = binv[i] - xs[i];
      return GraphSample{std::move(z), std::move(v)};
    }
    throw OutOfDomainError("sample_graph: could not hit the domain of the primal-dual operator");
  }
  if (op.get_if<PiecewiseGradientOp>()) {
    const Pieces1D pw = as_pieces(op);
    if (!pw.breaks.empty() && rng() % 10 < 3) {
      const auto& b = pw.breaks[rng() % pw.breaks.size()];
      return GraphSample{Vec{b.x}, Vec{sample_scalar(b.values, rng)}};
    }
    const double x = uniform(radius);
    return GraphSample{Vec{x}, Vec{sample_scalar(eval_pieces(pw, x), rng)}};
  }
  const int n = op.dim();
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = uniform(radius);
  return GraphSample{x, sample_values(evaluate(op, x), rng)};
}

// --- JSON serialization -----------------------------------------------------

namespace {

using nlohmann::json;

json scalar_set_to_json(const ScalarSet& s) {
  json j;
  if (s.interval) {
    j["interval"] = {s.lo, s.hi};
  } else {
    j["values"] = s.points;
  }
  return j;
}

ScalarSet scalar_set_from_json(const json& j) {
  if (j.contains("interval")) {
    return ScalarSet::closed(j["interval"][0].get<double>(), j["interval"][1].get<double>());
  }
  return ScalarSet::of(j["values"].get<std::vector<double>>());
}

json op_to_json(const OperatorSpec& op) {
  json j;
  if (const auto* lin = op.get_if<LinearOp>()) {
    j["type"] = "linear";
    j["n"] = lin->m.rows();
    std::vector<double> entries;
    for (int i = 0; i < lin->m.rows(); ++i)
      for (int k = 0; k < lin->m.cols(); ++k) entries.push_back(lin->m(i, k));
    j["entries"] = entries;
    return j;
  }
  if (const auto* si = op.get_if<ScaledIdentityOp>()) {
    j["type"] = "scaled_identity";
    j["n"] = si->n;
    j["alpha"] = si->alpha;
    return j;
  }
  if (const auto* rot = op.get_if<RotationalOp>()) {
    j["type"] = "rotational";
    j["a"] = rot->a;
    j["b"] = rot->b;
    if (rot->profile.is_constant_one()) {
      j["profile"] = "one";
    } else {
      json pieces = json::array();
      for (const auto& p : rot->profile.pieces())
        pieces.push_back({{"lo", p.lo},
                          {"hi", std::isfinite(p.hi) ? json(p.hi) : json("inf")},
                          {"slope", p.slope},
                          {"intercept", p.intercept}});
      j["profile"] = pieces;
    }
    return j;
  }
  if (const auto* pw = op.get_if<PiecewiseGradientOp>()) {
    j["type"] = "piecewise_gradient";
    json pieces = json::array();
    for (const auto& p : pw->pieces)
      pieces.push_back({{"lo", std::isfinite(p.lo) ? json(p.lo) : json("-inf")},
                        {"hi", std::isfinite(p.hi) ? json(p.hi) : json("inf")},
                        {"slope", p.slope},
                        {"intercept", p.intercept}});
    j["pieces"] = pieces;
    json breaks = json::array();
    for (const auto& b : pw->breaks) {
      json jb = scalar_set_to_json(b.values);
      jb["x"] = b.x;
      breaks.push_back(jb);
    }
    j["breakpoints"] = breaks;
    return j;
  }
  if (const auto* sh = op.get_if<ShiftedOp>()) {
    j["type"] = "shifted";
    j["base"] = op_to_json(*sh->base);
    j["xi"] = sh->xi;
    j["nu"] = sh->nu;
    return j;
  }
  if (const auto* pd = op.get_if<PrimalDualOp>()) {
    j["type"] = "primal_dual";
    j["A"] = op_to_json(*pd->a);
    j["B"] = op_to_json(*pd->b);
    return j;
  }
  throw Error("operator_to_json: unsupported variant");
}

double edge_from_json(const json& j, double inf_sign) {
  if (j.is_string()) return inf_sign * kInf;
  return j.get<double>();
}

OperatorSpec op_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "linear") {
    const int n = j.at("n").get<int>();
    const auto entries = j.at("entries").get<std::vector<double>>();
    if (static_cast<int>(entries.size()) != n * n)
      throw ConfigError("operator_from_json: linear entries size mismatch");
    linalg::GeneralMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) m(i, k) = entries[static_cast<size_t>(i) * n + k];
    return OperatorSpec(LinearOp{std::move(m)});
  }
  if (type == "scaled_identity")
    return OperatorSpec(ScaledIdentityOp{j.at("n").get<int>(), j.at("alpha").get<double>()});
  if (type == "rotational") {
    RadialProfile profile = RadialProfile::constant_one();
    const auto& jp = j.at("profile");
    if (jp.is_string()) {
      const std::string name = jp.get<std::string>();
      if (name == "one")
        profile = RadialProfile::constant_one();
      else if (name == "zero_band")
        profile = RadialProfile::zero_band();
      else
        throw ConfigError("operator_from_json: unknown profile name '" + name + "'");
    } else {
      std::vector<RadialProfile::Piece> pieces;
      for (const auto& p : jp)
        pieces.push_back({p.at("lo").get<double>(), edge_from_json(p.at("hi"), 1.0),
                          p.at("slope").get<double>(), p.at("intercept").get<double>()});
      profile = RadialProfile(std::move(pieces));
    }
    return OperatorSpec(RotationalOp{j.at("a").get<double>(), j.at("b").get<double>(), profile});
  }
  if (type == "piecewise_gradient") {
    PiecewiseGradientOp pw;
    for (const auto& p : j.at("pieces"))
      pw.pieces.push_back({edge_from_json(p.at("lo"), -1.0), edge_from_json(p.at("hi"), 1.0),
                           p.at("slope").get<double>(), p.at("intercept").get<double>()});
    for (const auto& b : j.at("breakpoints")) {
      PiecewiseBreak br;
      br.x = b.at("x").get<double>();
      br.values = scalar_set_from_json(b);
      pw.breaks.push_back(br);
    }
    return OperatorSpec(std::move(pw));
  }
  if (type == "shifted") {
    auto base = std::make_shared<OperatorSpec>(op_from_json(j.at("base")));
    return OperatorSpec(ShiftedOp{base, j.at("xi").get<double>(), j.at("nu").get<double>()});
  }
  if (type == "primal_dual") {
    auto a = std::make_shared<OperatorSpec>(op_from_json(j.at("A")));
    auto b = std::make_shared<OperatorSpec>(op_from_json(j.at("B")));
    return OperatorSpec(PrimalDualOp{a, b});
  }
  throw ConfigError("operator_from_json: unknown type '" + type + "'");
}

}  // namespace

std::string operator_to_json(const OperatorSpec& op) { return op_to_json(op).dump(2); }

OperatorSpec operator_from_json(const std::string& text) {
  return op_from_json(nlohmann::json::parse(text));
}

}  // namespace semisplit
