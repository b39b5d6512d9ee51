#include <cmath>
#include <random>

#include "doctest.h"
#include "semisplit/catalog.hpp"
#include "semisplit/drs.hpp"
#include "semisplit/pppa.hpp"

using namespace semisplit;

namespace {

SymMatrix blkdiag_2x2(double beta_p, double beta_d) {
  SymMatrix v(4);
  v.set(0, 0, beta_p);
  v.set(1, 1, beta_p);
  v.set(2, 2, beta_d);
  v.set(3, 3, beta_d);
  return v;
}

}  // namespace

TEST_CASE("preconditioner invariants") {
  for (double gamma : {0.25, 1.0, 2.0}) {
    const Preconditioner p = Preconditioner::drs_embedding(2, gamma);
    const int n = p.n();
    const auto mg = p.m.to_general();
    const auto qpi = p.q.to_general().multiply(p.pi.to_general());
    const auto piqpi = p.pi.to_general().multiply(qpi);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        CHECK(std::abs(mg(i, j) - qpi(i, j)) <= 1e-10 * std::max(1.0, p.m.max_abs()));
        CHECK(std::abs(mg(i, j) - piqpi(i, j)) <= 1e-10 * std::max(1.0, p.m.max_abs()));
      }
    const auto eig = linalg::sym_eigen(p.q);
    CHECK(eig.values.front() > 0.0);
  }
}

TEST_CASE("eta_min") {
  const Preconditioner id2 = Preconditioner::identity(2);
  CHECK(eta_min(id2, SymMatrix(2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eta_min(id2, linalg::scale(0.3, SymMatrix::identity(2))) ==
        doctest::Approx(1.3).epsilon(1e-12));
  CHECK(eta_min(id2, linalg::scale(-0.4, SymMatrix::identity(2))) ==
        doctest::Approx(0.6).epsilon(1e-12));

  // Douglas-Rachford preconditioner with V = blkdiag(bP I, bD I):
  // eta_min = 1 + bP/g + g bD
  for (double gamma : {0.13, 0.5, 11.0 / 60.0}) {
    for (auto [bp, bd] : {std::pair{1.0 / 15.0, -4.8}, std::pair{-2.0 / 15.0, -1.2},
                          std::pair{0.0, 0.0}}) {
      const Preconditioner p = Preconditioner::drs_embedding(2, gamma);
      const double want = 1.0 + bp / gamma + gamma * bd;
      CHECK(eta_min(p, blkdiag_2x2(bp, bd)) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("eta_min equals alpha_drs over random feasible triples") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  while (done < 1000) {
    const double bp = u(rng), bd = u(rng);
    if (!(std::min(0.0, bp) * std::min(0.0, bd) < 0.249)) continue;
    const auto range = gamma_range_minty(bp, bd);
    if (range.is_empty()) continue;
    const double hi = range.hi.is_inf ? range.lo + 5.0 : range.hi.value;
    std::uniform_real_distribution<double> ug(0.0, 1.0);
    const double gamma = range.lo + (0.05 + 0.9 * ug(rng)) * (hi - range.lo);
    const Preconditioner p = Preconditioner::drs_embedding(2, gamma);
    const double a = alpha_drs(gamma, bp, bd);
    CHECK(eta_min(p, blkdiag_2x2(bp, bd)) == doctest::Approx(a).epsilon(1e-12));
    ++done;
  }
}

TEST_CASE("alpha_k") {
  const Preconditioner id2 = Preconditioner::identity(2);
  const Vec x{1.0, 2.0}, xbar{0.5, 1.0};
  CHECK(alpha_k(id2, SymMatrix(2), x, xbar) == doctest::Approx(1.0));
  CHECK(alpha_k(id2, linalg::scale(0.2, SymMatrix::identity(2)), x, xbar) ==
        doctest::Approx(1.2).epsilon(1e-12));
  CHECK_THROWS_AS(alpha_k(id2, SymMatrix(2), x, x), ZeroDetectedError);
}

TEST_CASE("pppa_step finds zeros of the zero operator immediately") {
  std::mt19937_64 rng(3);
  const OperatorSpec zero(ScaledIdentityOp{2, 0.0});
  const Preconditioner p = Preconditioner::identity(2);
  const auto st = pppa_step(zero, p, SymMatrix(2), Vec{0.3, -0.7}, LambdaRule::fixed(1.0),
                            ResolventSelection{}, rng, 1e-9);
  CHECK(st.zero_found);
  CHECK(st.xbar[0] == doctest::Approx(0.3));
}

TEST_CASE("pppa step on the constant-profile field matches the step matrix") {
  std::mt19937_64 rng(5);
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, false);
  const Preconditioner p = Preconditioner::identity(2);
  const double lambda = 1.7;
  const auto h = toy_ppa_step_matrix(2.0, 1.0, lambda);
  const Vec x{0.8, -0.4};
  const auto st = pppa_step(toy.t, p, toy.cert.v, x, LambdaRule::fixed(lambda),
                            ResolventSelection{}, rng, 1e-12);
  const Vec hx = h.apply(x);
  CHECK(st.xnext[0] == doctest::Approx(hx[0]).epsilon(1e-10));
  CHECK(st.xnext[1] == doctest::Approx(hx[1]).epsilon(1e-10));
  // alpha = 1 + rho_weak for the scaled-identity certificate
  CHECK(st.alpha == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("run_pppa on the constant-profile field") {
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, false);
  const Preconditioner p = Preconditioner::identity(2);

  PPPAConfig cfg;
  cfg.lambda = LambdaRule::fixed(2.3);
  cfg.max_iters = 2000;
  cfg.stop_tol = 1e-10;
  const IterateTrace trace = run_pppa(toy.t, p, toy.cert, Vec{1.5, -0.7}, cfg);
  CHECK((trace.status == RunStatus::Converged || trace.status == RunStatus::ZeroFound));
  CHECK(linalg::norm(trace.xbar_final) <= 1e-6);
  CHECK_FALSE(trace.any_relax_warning);  // 2.3 < 2 alpha = 2.4 throughout

  // per-iteration invariants
  for (const auto& r : trace.records) {
    if (r.lambda == 0.0) break;
    CHECK(r.alpha >= eta_min(p, toy.cert.v) - 1e-9);
    CHECK(member_residual(toy.t, r.xbar, r.vbar) <= 1e-10);
    CHECK(r.fejer_gap >= -1e-9);
  }

  // shadow update identity Pi x+ = Pi x + lambda (Pi xbar - Pi x)
  for (size_t k = 0; k + 1 < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    const Vec want = linalg::axpy(p.project(r.x), r.lambda,
                                  linalg::sub(p.project(r.xbar), p.project(r.x)));
    CHECK(linalg::norm(linalg::sub(p.project(trace.records[k + 1].x), want)) <= 1e-12);
  }

  PPPAConfig bad = cfg;
  bad.lambda = LambdaRule::fixed(2.5);
  bad.divergence_norm = 1e3;
  bad.max_iters = 10000;
  const IterateTrace diverged = run_pppa(toy.t, p, toy.cert, Vec{1.5, -0.7}, bad);
  CHECK(diverged.status == RunStatus::Diverged);
  CHECK(diverged.any_relax_warning);
}

TEST_CASE("finite termination lands in zer T within the stop tolerance") {
  // inits in the basin of the zero band terminate with an exact zero
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, true);
  const Preconditioner p = Preconditioner::identity(2);
  PPPAConfig cfg;
  cfg.lambda = LambdaRule::fixed(2.3);
  cfg.max_iters = 10000;
  cfg.stop_tol = 1e-8;
  const IterateTrace trace = run_pppa(toy.t, p, toy.cert, Vec{1.2, 0.3}, cfg);
  if (trace.status == RunStatus::ZeroFound)
    CHECK(zero_residual(toy.t, trace.xbar_final) <= cfg.stop_tol);
  CHECK(zero_residual(toy.t, trace.xbar_final) <= 1e-6);
}

TEST_CASE("run_pppa on the primal-dual embedding") {
  const DrsProblem ns = nonsmooth_min_problem();
  const double gamma = 0.13;
  const OperatorSpec tpd(PrimalDualOp{std::make_shared<OperatorSpec>(ns.a),
                                      std::make_shared<OperatorSpec>(ns.b)});
  const Preconditioner p = Preconditioner::drs_embedding(1, gamma);
  SymMatrix v(2);
  v.set(0, 0, ns.cert.beta_p);
  v.set(1, 1, ns.cert.beta_d);
  const MintyCertificate cert{v, {Vec{0.0, 3.0}}};
  PPPAConfig cfg;
  cfg.lambda = LambdaRule::fraction(0.45);
  cfg.max_iters = 4000;
  cfg.stop_tol = 1e-9;
  const IterateTrace trace = run_pppa(tpd, p, cert, Vec{2.0, -1.0}, cfg);
  CHECK((trace.status == RunStatus::Converged || trace.status == RunStatus::ZeroFound));
  CHECK(zero_residual(tpd, trace.xbar_final) <= 1e-8);
  for (const auto& r : trace.records) {
    if (r.lambda == 0.0) break;
    CHECK(member_residual(tpd, r.xbar, r.vbar) <= 1e-10);
    CHECK(r.fejer_gap >= -1e-9);
    // alpha_k of the embedding is the constant 1 + bP/g + g bD
    CHECK(r.alpha == doctest::Approx(1.0 + ns.cert.beta_p / gamma + gamma * ns.cert.beta_d)
                         .epsilon(1e-10));
  }
}

TEST_CASE("run_pppa boundedness of the shadow sequence") {
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, true);
  const Preconditioner p = Preconditioner::identity(2);
  PPPAConfig cfg;
  cfg.lambda = LambdaRule::fixed(2.3);
  cfg.max_iters = 10000;
  cfg.stop_tol = 1e-7;
  const IterateTrace trace = run_pppa(toy.t, p, toy.cert, Vec{1.8, 1.3}, cfg);
  double max_norm = 0;
  for (const auto& r : trace.records)
    max_norm = std::max(max_norm, std::sqrt(p.q_norm_sq(p.project(r.x))));
  const Vec w0 = p.project(trace.records.front().x);
  for (const Vec& xs : toy.cert.sstar) {
    const Vec ws = p.project(xs);
    const double bound = std::sqrt(p.q_norm_sq(linalg::sub(w0, ws))) +
                         std::sqrt(p.q_norm_sq(ws)) + 1e-6;
    CHECK(max_norm <= bound);
  }
}

TEST_CASE("certificate validation rejects a wrong certificate") {
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, false);
  const Preconditioner p = Preconditioner::identity(2);
  PPPAConfig cfg;
  // claiming a much larger weak Minty modulus than b/(a^2+b^2) must fail
  MintyCertificate bad = toy.cert;
  bad.v = linalg::scale(3.0, SymMatrix::identity(2));
  CHECK_THROWS_AS(run_pppa(toy.t, p, bad, Vec{1.0, 1.0}, cfg), AssumptionViolatedError);
  // and a non-zero designated solution must fail as well
  MintyCertificate off = toy.cert;
  off.sstar = {Vec{0.3, 0.0}};
  CHECK_THROWS_AS(run_pppa(toy.t, p, off, Vec{1.0, 1.0}, cfg), AssumptionViolatedError);
}

TEST_CASE("halfspace diagnostics") {
  std::mt19937_64 rng(7);
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, false);
  const Preconditioner p = Preconditioner::identity(2);

  SUBCASE("V = 0: the halfspace passes through wbar and lambda = 1 projects onto it") {
    const OperatorSpec lin(LinearOp{linalg::GeneralMatrix(2, {1.0, 0.0, 0.0, 2.0})});
    const MintyCertificate cert{SymMatrix(2), {Vec{0.0, 0.0}}};
    const Vec x{1.0, 1.0};
    const auto st = pppa_step(lin, p, cert.v, x, LambdaRule::fixed(1.0), ResolventSelection{},
                              rng, 1e-12);
    const auto rep = halfspace_diagnostics(p, cert.v, cert, x, st.xbar, st.xnext, st.lambda);
    for (double s : rep.sstar_slacks) CHECK(s >= -1e-9);
    CHECK(rep.alpha_consistency <= 1e-12);
    CHECK(rep.projection_residual <= 1e-10);
    CHECK(linalg::norm(linalg::sub(p.project(st.xnext), p.project(st.xbar))) <= 1e-12);
  }

  SUBCASE("one toy step from (1,1)") {
    const Vec x{1.0, 1.0};
    const auto st = pppa_step(toy.t, p, toy.cert.v, x, LambdaRule::fixed(1.5),
                              ResolventSelection{}, rng, 1e-12);
    const auto rep = halfspace_diagnostics(p, toy.cert.v, toy.cert, x, st.xbar, st.xnext, st.lambda);
    for (double s : rep.sstar_slacks) CHECK(s >= -1e-9);
    CHECK(rep.alpha_consistency <= 1e-12);
    CHECK(rep.projection_residual <= 1e-10);
  }

  SUBCASE("one Douglas-Rachford embedded step") {
    const DrsProblem ns = nonsmooth_min_problem();
    const double gamma = 0.13;
    const Preconditioner pd = Preconditioner::drs_embedding(1, gamma);
    const SymMatrix v = [&] {
      SymMatrix m(2);
      m.set(0, 0, ns.cert.beta_p);
      m.set(1, 1, ns.cert.beta_d);
      return m;
    }();
    const OperatorSpec tpd(PrimalDualOp{std::make_shared<OperatorSpec>(ns.a),
                                        std::make_shared<OperatorSpec>(ns.b)});
    MintyCertificate cert{v, {Vec{0.0, 3.0}}};
    const Vec z{2.0, 1.0};
    const auto st = pppa_step(tpd, pd, v, z, LambdaRule::fixed(0.5), ResolventSelection{}, rng,
                              1e-12);
    const auto rep = halfspace_diagnostics(pd, v, cert, z, st.xbar, st.xnext, st.lambda);
    for (double s : rep.sstar_slacks) CHECK(s >= -1e-9);
    CHECK(rep.alpha_consistency <= 1e-12);
    CHECK(rep.projection_residual <= 1e-10);
  }
}

TEST_CASE("fejer gap of the zero operator is exactly zero") {
  const Preconditioner p = Preconditioner::identity(2);
  const MintyCertificate cert{SymMatrix(2), {Vec{0.0, 0.0}}};
  // T = 0: xbar = x, the shadow does not move
  const Vec w{1.0, -2.0};
  CHECK(fejer_gap(p, cert, w, w, w, 1.0, 1.0) == 0.0);
}

TEST_CASE("rate certificate") {
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, false);
  const Preconditioner p = Preconditioner::identity(2);

  SUBCASE("x0 at the solution") {
    PPPAConfig cfg;
    cfg.lambda = LambdaRule::fixed(1.0);
    cfg.stop_tol = 1e-12;
    const IterateTrace trace = run_pppa(toy.t, p, toy.cert, Vec{0.0, 0.0}, cfg);
    CHECK(trace.status == RunStatus::ZeroFound);
    const auto rc = rate_certificate(trace, toy.cert, p);
    CHECK(rc.holds);
    CHECK(rc.lhs <= 1e-20);
  }

  SUBCASE("100 iterations at lambda = 1") {
    PPPAConfig cfg;
    cfg.lambda = LambdaRule::fixed(1.0);
    cfg.max_iters = 100;
    cfg.stop_tol = 0.0;
    const IterateTrace trace = run_pppa(toy.t, p, toy.cert, Vec{1.0, 0.5}, cfg);
    const auto rc = rate_certificate(trace, toy.cert, p);
    CHECK(rc.holds);
    CHECK_THROWS_AS(rate_certificate(trace, toy.cert, p, rc.kappa * 2.0), KappaViolatedError);
  }
}

TEST_CASE("rlinear_fit") {
  SUBCASE("exact geometric sequence") {
    std::vector<double> r;
    for (int k = 0; k < 60; ++k) r.push_back(std::pow(2.0, -k));
    const auto fit = rlinear_fit(r, 0.6);
    CHECK(fit.q == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("constant-profile field at lambda = 1 matches the spectral radius") {
    const ToyProblem toy = toy_ppa_problem(2.0, 1.0, false);
    const Preconditioner p = Preconditioner::identity(2);
    PPPAConfig cfg;
    cfg.lambda = LambdaRule::fixed(1.0);
    cfg.max_iters = 60;
    cfg.stop_tol = 0.0;
    const IterateTrace trace = run_pppa(toy.t, p, toy.cert, Vec{1.0, 0.4}, cfg);
    const auto fit = rlinear_fit(trace, 0.8);
    const double rho = linalg::spectral_radius(toy_ppa_step_matrix(2.0, 1.0, 1.0));
    CHECK(std::abs(fit.q - rho) <= 0.02);
    CHECK(fit.r2 > 0.95);
  }

  SUBCASE("too little data") {
    CHECK_THROWS_AS(rlinear_fit(std::vector<double>(10, 1.0), 1.0), InsufficientDataError);
  }
}

TEST_CASE("fraction-of-two-alpha rule keeps the relaxation admissible") {
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, false);
  const Preconditioner p = Preconditioner::identity(2);
  PPPAConfig cfg;
  cfg.lambda = LambdaRule::fraction(0.45);
  cfg.max_iters = 400;
  cfg.stop_tol = 1e-11;
  const IterateTrace trace = run_pppa(toy.t, p, toy.cert, Vec{1.0, -1.0}, cfg);
  CHECK((trace.status == RunStatus::Converged || trace.status == RunStatus::ZeroFound));
  for (const auto& r : trace.records) {
    if (r.lambda == 0.0) break;
    CHECK(r.lambda == doctest::Approx(0.45 * 2.0 * r.alpha).epsilon(1e-12));
    CHECK(r.lambda < 2.0 * r.alpha);
  }
}
