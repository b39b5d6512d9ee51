#pragma once

// Closed-universe catalog of set-valued operators with exact graph membership
// and analytic (possibly multi-valued) resolvents. Covers linear maps, scaled
// identities, planar rotational fields with a radial profile, one-dimensional
// piecewise-linear subdifferentials with explicit breakpoint value sets,
// operators generated from a monotone base through the (base + xi id)^{-1} +
// nu id embedding, and the primal-dual stacking of an operator pair.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "semisplit/errors.hpp"
#include "semisplit/linalg.hpp"

namespace semisplit {

using linalg::Vec;

// Set of scalars: finitely many points or a closed interval.
struct ScalarSet {
  std::vector<double> points;
  bool interval = false;
  double lo = 0.0;
  double hi = 0.0;

  static ScalarSet single(double v) { return ScalarSet{{v}, false, 0.0, 0.0}; }
  static ScalarSet of(std::vector<double> vs) { return ScalarSet{std::move(vs), false, 0.0, 0.0}; }
  static ScalarSet closed(double lo, double hi) { return ScalarSet{{}, true, lo, hi}; }

  bool empty() const { return !interval && points.empty(); }
  double distance(double v) const;
  bool contains(double v, double tol) const { return distance(v) <= tol; }
};

// Image of a set-valued operator at a point: finitely many vectors or, in one
// dimension, a closed interval.
struct ValueSet {
  std::vector<Vec> points;
  bool interval = false;
  double lo = 0.0;
  double hi = 0.0;

  static ValueSet single(Vec v);
  static ValueSet from_scalar_set(const ScalarSet& s);
  bool empty() const { return !interval && points.empty(); }
  double distance(const Vec& v) const;
  double min_norm() const;
};

// Piecewise-linear profile r >= 0 -> f(r); pieces cover [0, inf) contiguously.
class RadialProfile {
 public:
  struct Piece {
    double lo, hi, slope, intercept;  // f(r) = slope*r + intercept on [lo, hi)
  };

  RadialProfile() = default;
  explicit RadialProfile(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {}
  static RadialProfile constant_one();
  // The zero-band profile used by the planar example: r on [0,2/5], 4/5 - r on
  // (2/5,4/5), 0 on [4/5,1], (5/2)(r-1) on (1,7/5), 1 beyond.
  static RadialProfile zero_band();

  double operator()(double r) const;
  const std::vector<Piece>& pieces() const { return pieces_; }
  bool is_constant_one() const;

 private:
  std::vector<Piece> pieces_;
};

struct LinearOp {
  linalg::GeneralMatrix m;
};

struct ScaledIdentityOp {
  int n = 1;
  double alpha = 0.0;
};

// x -> f(|x|) [[b, a], [-a, b]] x on the plane.
struct RotationalOp {
  double a = 0.0;
  double b = 0.0;
  RadialProfile profile;
};

struct PiecewisePiece {
  double lo, hi;  // open interval (lo, hi)
  double slope, intercept;
};

struct PiecewiseBreak {
  double x;
  ScalarSet values;
};

// 1-D operator: open linear pieces partitioning the line, explicit value sets
// at the breakpoints between them.
struct PiecewiseGradientOp {
  std::vector<PiecewisePiece> pieces;  // ascending
  std::vector<PiecewiseBreak> breaks;  // ascending
};

class OperatorSpec;

// (base + xi id)^{-1} + nu id; base must be one-dimensional.
struct ShiftedOp {
  std::shared_ptr<const OperatorSpec> base;
  double xi = 0.0;
  double nu = 0.0;
};

// z = (x, y) -> (A x + y) x (B^{-1} y - x).
struct PrimalDualOp {
  std::shared_ptr<const OperatorSpec> a;
  std::shared_ptr<const OperatorSpec> b;
};

class OperatorSpec {
 public:
  using Variant =
      std::variant<LinearOp, ScaledIdentityOp, RotationalOp, PiecewiseGradientOp, ShiftedOp, PrimalDualOp>;

  OperatorSpec() = default;
  OperatorSpec(LinearOp op) : v_(std::move(op)) {}
  OperatorSpec(ScaledIdentityOp op) : v_(std::move(op)) {}
  OperatorSpec(RotationalOp op) : v_(std::move(op)) {}
  OperatorSpec(PiecewiseGradientOp op) : v_(std::move(op)) {}
  OperatorSpec(ShiftedOp op) : v_(std::move(op)) {}
  OperatorSpec(PrimalDualOp op) : v_(std::move(op)) {}

  int dim() const;
  const Variant& variant() const { return v_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

 private:
  Variant v_;
};

struct ResolventSelection {
  enum class Mode { Deterministic, UniformRandom };
  Mode mode = Mode::Deterministic;
  std::uint64_t seed = 0;
};

struct ResolventResult {
  Vec choice;
  std::vector<Vec> all;
};

// Exact image set T(x).
ValueSet evaluate(const OperatorSpec& op, const Vec& x);

// Distance of y to T(x); for the primal-dual operator this is computed
// componentwise so interval-valued blocks are handled exactly.
double member_residual(const OperatorSpec& op, const Vec& x, const Vec& y);

// min { |y| : y in T(x) }.
double zero_residual(const OperatorSpec& op, const Vec& x);

// All x with y in T(x), for one-dimensional operators (the inverse image).
ScalarSet preimage_1d(const OperatorSpec& op, double y);

// Resolvent J_{gamma T}(s). `bias` steers the deterministic selection toward
// the closest candidate (defaults to s itself); UniformRandom draws from the
// candidate list with the supplied engine. Throws EmptyResolventError when no
// candidate exists.
ResolventResult resolvent(const OperatorSpec& op, double gamma, const Vec& s,
                          const ResolventSelection& sel, std::mt19937_64& rng,
                          const Vec* bias = nullptr);

// All radii r >= 0 with |s| = r * sqrt((1 + g f(r) b)^2 + (g f(r) a)^2),
// found by scanning the profile pieces and bisecting.
std::vector<double> rotational_resolvent_radius(double a, double b, const RadialProfile& profile,
                                                double gamma, double snorm);

struct PdResolventResult {
  Vec xbar, ybar;
  Vec u, v;  // the two plain resolvent outputs behind the step
};

// One application of (M + T_pd)^{-1} M for the Douglas-Rachford preconditioner
// with stepsize gamma: xbar in J_{gA}(x - g y), ybar = (2 xbar - x + g y - v)/g
// with v in J_{gB}(2 xbar - x + g y).
PdResolventResult primal_dual_preconditioned_resolvent(const OperatorSpec& a, const OperatorSpec& b,
                                                       double gamma, const Vec& x, const Vec& y,
                                                       const ResolventSelection& sel,
                                                       std::mt19937_64& rng,
                                                       const Vec* bias_u = nullptr,
                                                       const Vec* bias_v = nullptr);

// Maximal open intervals of gamma > 0 on which range(id + gamma T) covers the
// whole line, i.e. the resolvent has full domain. Endpoints are computed from
// closed-form crossing equations, not sampling.
std::vector<std::pair<double, double>> full_domain_gamma_intervals(const OperatorSpec& op);

struct GraphSample {
  Vec x, y;
};

// A random point of graph(T), drawn from a box of the given radius.
GraphSample sample_graph(const OperatorSpec& op, std::mt19937_64& rng, double radius);

// JSON document (variant tag + numeric fields); schema documented in the README.
std::string operator_to_json(const OperatorSpec& op);
OperatorSpec operator_from_json(const std::string& text);

}  // namespace semisplit
