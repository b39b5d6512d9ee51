#pragma once

// Shared test machinery: random maximal monotone scalar bases, generation of
// operators that are exactly (mu, rho)-semimonotone through the monotone
// embedding, and the sampled star-inequality check the calculus suites and
// the acceptance criteria both use.

#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "semisplit/operators.hpp"
#include "semisplit/semiparams.hpp"

namespace semisplit::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + t * (hi - lo);
}

// A random maximal monotone operator on the line: continuous nondecreasing
// piecewise linear graph with optional upward jumps (interval values).
inline OperatorSpec random_monotone_base(std::mt19937_64& rng) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int kind = static_cast<int>(rng() % 3);
  if (kind == 0) {  // plain linear, slope >= 0
    const double m = uniform(rng, 0.0, 3.0);
    PiecewiseGradientOp op;
    op.pieces = {{-kInf, kInf, m, uniform(rng, -1.0, 1.0)}};
    return OperatorSpec(std::move(op));
  }
  const double x0 = uniform(rng, -1.0, 1.0);
  const double m1 = uniform(rng, 0.0, 3.0);
  const double m2 = uniform(rng, 0.0, 3.0);
  const double q1 = uniform(rng, -1.0, 1.0);
  const double left = m1 * x0 + q1;
  PiecewiseGradientOp op;
  if (kind == 1) {  // continuous kink
    const double q2 = left - m2 * x0;
    op.pieces = {{-kInf, x0, m1, q1}, {x0, kInf, m2, q2}};
    op.breaks = {{x0, ScalarSet::single(left)}};
  } else {  // upward jump: interval value at the breakpoint
    const double jump = uniform(rng, 0.1, 2.0);
    const double q2 = left + jump - m2 * x0;
    op.pieces = {{-kInf, x0, m1, q1}, {x0, kInf, m2, q2}};
    op.breaks = {{x0, ScalarSet::closed(left, left + jump)}};
  }
  return OperatorSpec(std::move(op));
}

// Exactly (mu, rho)-semimonotone (and maximal) by construction:
// T = (base + xi id)^{-1} + nu id with (xi, nu) from the monotone embedding.
inline OperatorSpec make_certified(const SemiParams& p, std::mt19937_64& rng) {
  const MonotoneEmbedding e = monotone_embedding(p);
  auto base = std::make_shared<OperatorSpec>(random_monotone_base(rng));
  return OperatorSpec(ShiftedOp{base, e.xi, e.nu});
}

inline SemiParams random_feasible_params(std::mt19937_64& rng) {
  for (;;) {
    const SemiParams p{uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8)};
    if (p.mu * p.rho < 0.2) return p;
  }
}

// <dx, dy> >= mu |dx|^2 + rho |dy|^2 up to slack -1e-9 * squared norms.
inline bool pair_inequality_holds(const GraphSample& g1, const GraphSample& g2,
                                  const SemiParams& p, double* worst_slack = nullptr) {
  const Vec dx = linalg::sub(g1.x, g2.x);
  const Vec dy = linalg::sub(g1.y, g2.y);
  const double lhs = linalg::dot(dx, dy);
  const double rhs = p.mu * linalg::dot(dx, dx) + p.rho * linalg::dot(dy, dy);
  const double scale = std::max(1.0, linalg::dot(dx, dx) + linalg::dot(dy, dy));
  const double slack = (lhs - rhs) / scale;
  if (worst_slack) *worst_slack = std::min(*worst_slack, slack);
  return slack >= -1e-9;
}

// Draws `count` graph-pair samples of the operator and checks the inequality.
inline bool check_semimonotone_samples(const OperatorSpec& op, const SemiParams& p, int count,
                                       std::mt19937_64& rng, double radius = 4.0) {
  for (int i = 0; i < count; ++i) {
    GraphSample g1, g2;
    try {
      g1 = sample_graph(op, rng, radius);
      g2 = sample_graph(op, rng, radius);
    } catch (const OutOfDomainError&) {
      continue;
    }
    if (!pair_inequality_holds(g1, g2, p)) return false;
  }
  return true;
}

// Graph samples of the sum T1 + T2 at shared points (retries until the point
// lies in both domains).
inline std::optional<GraphSample> sample_sum_graph(const OperatorSpec& t1, const OperatorSpec& t2,
                                                   std::mt19937_64& rng, double radius) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double x = uniform(rng, -radius, radius);
    try {
      const ValueSet v1 = evaluate(t1, Vec{x});
      const ValueSet v2 = evaluate(t2, Vec{x});
      auto pick = [&](const ValueSet& s) {
        if (s.interval) return uniform(rng, s.lo, s.hi);
        return s.points[rng() % s.points.size()][0];
      };
      return GraphSample{Vec{x}, Vec{pick(v1) + pick(v2)}};
    } catch (const OutOfDomainError&) {
    }
  }
  return std::nullopt;
}

// Graph samples of the parallel sum T1 [] T2 at shared values.
inline std::optional<GraphSample> sample_parallel_graph(const OperatorSpec& t1,
                                                        const OperatorSpec& t2,
                                                        std::mt19937_64& rng, double radius) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double y = uniform(rng, -radius, radius);
    const ScalarSet s1 = preimage_1d(t1, y);
    const ScalarSet s2 = preimage_1d(t2, y);
    if (s1.empty() || s2.empty()) continue;
    auto pick = [&](const ScalarSet& s) {
      if (s.interval) return uniform(rng, s.lo, s.hi);
      return s.points[rng() % s.points.size()];
    };
    return GraphSample{Vec{pick(s1) + pick(s2)}, Vec{y}};
  }
  return std::nullopt;
}

}  // namespace semisplit::testing
