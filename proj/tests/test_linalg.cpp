#include <cmath>
#include <random>

#include "doctest.h"
#include "semisplit/linalg.hpp"

using namespace semisplit;
using namespace semisplit::linalg;

namespace {

SymMatrix random_psd(int n, std::mt19937_64& rng) {
  GeneralMatrix b(n, n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = u(rng);
  return SymMatrix::from_general(b.transpose().multiply(b));
}

double reconstruction_error(const SymMatrix& a, const EigenDecomposition& e) {
  double worst = 0;
  const int n = a.n();
  for (int k = 0; k < n; ++k) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = e.vectors(i, k);
    const Vec av = a.apply(v);
    worst = std::max(worst, norm(sub(av, scale(e.values[k], v))));
  }
  return worst;
}

}  // namespace

TEST_CASE("sym_eigen on stock matrices") {
  auto e = sym_eigen(SymMatrix::identity(2));
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-12));

  e = sym_eigen(SymMatrix(2, {3, 0, 0, 0}));
  CHECK(e.values[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-12));

  // characteristic polynomial l^2 - 4l + 3 = 0
  e = sym_eigen(SymMatrix(2, {2, 1, 1, 2}));
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("sym_eigen accuracy and orthonormality on random matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const SymMatrix a = random_psd(n, rng);
    const auto e = sym_eigen(a);
    CHECK(reconstruction_error(a, e) <= 1e-10 * std::max(1.0, a.max_abs()));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double d = 0;
        for (int r = 0; r < n; ++r) d += e.vectors(r, i) * e.vectors(r, j);
        CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) <= 1e-10);
      }
    for (int i = 0; i + 1 < n; ++i) CHECK(e.values[i] <= e.values[i + 1]);
  }
}

TEST_CASE("range_basis") {
  const auto z_id = range_basis(SymMatrix::identity(2));
  CHECK(z_id.cols() == 2);

  const auto z_rank1 = range_basis(SymMatrix(2, {1, 0, 0, 0}));
  REQUIRE(z_rank1.cols() == 1);
  CHECK(std::abs(std::abs(z_rank1(0, 0)) - 1.0) <= 1e-12);
  CHECK(std::abs(z_rank1(1, 0)) <= 1e-12);

  // Douglas-Rachford preconditioner with gamma = 1 and n = 1
  const SymMatrix m(2, {1, -1, -1, 1});
  const auto z = range_basis(m);
  REQUIRE(z.cols() == 1);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(z(0, 0)) - s) <= 1e-12);
  CHECK(z(0, 0) * z(1, 0) < 0);  // (1, -1) direction up to sign

  CHECK_THROWS_AS(range_basis(SymMatrix(2, {1, 0, 0, -1})), NotPsdError);
}

TEST_CASE("range projector identities M = M Pi = Pi M = Q Pi") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    SymMatrix m = random_psd(n, rng);
    if (trial % 2 == 0) {
      // force rank deficiency: project out one direction
      const auto e = sym_eigen(m);
      SymMatrix md(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double s = 0;
          for (int k = 1; k < n; ++k) s += e.values[k] * e.vectors(i, k) * e.vectors(j, k);
          md.set(i, j, s);
        }
      m = md;
    }
    const auto z = range_basis(m);
    const auto q = derived_q(m, z);
    GeneralMatrix pi(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int c = 0; c < z.cols(); ++c) s += z(i, c) * z(j, c);
        pi(i, j) = s;
      }
    const auto mg = m.to_general();
    const auto mpi = mg.multiply(pi);
    const auto pim = pi.multiply(mg);
    const auto qpi = q.to_general().multiply(pi);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        CHECK(std::abs(mg(i, j) - mpi(i, j)) <= 1e-10 * std::max(1.0, m.max_abs()));
        CHECK(std::abs(mg(i, j) - pim(i, j)) <= 1e-10 * std::max(1.0, m.max_abs()));
        CHECK(std::abs(mg(i, j) - qpi(i, j)) <= 1e-10 * std::max(1.0, m.max_abs()));
      }
    // Q positive definite on random vectors
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int s = 0; s < 1000 / 30; ++s) {
      Vec x(n);
      for (auto& xi : x) xi = u(rng);
      if (norm(x) < 1e-8) continue;
      CHECK(q.quad(x) > 0.0);
    }
  }
}

TEST_CASE("derived_q on stock matrices") {
  const auto q_id = derived_q(SymMatrix::identity(2), range_basis(SymMatrix::identity(2)));
  CHECK(std::abs(q_id(0, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(q_id(0, 1)) <= 1e-12);

  const SymMatrix m(2, {1, 0, 0, 0});
  const auto q = derived_q(m, range_basis(m));
  CHECK(std::abs(q(0, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(q(1, 1) - 1.0) <= 1e-12);

  // Douglas-Rachford preconditioner with gamma = 2: Q = M + (1/5)[[4,2],[2,1]]
  const SymMatrix m2(2, {0.5, -1, -1, 2});
  const auto q2 = derived_q(m2, range_basis(m2));
  CHECK(q2(0, 0) == doctest::Approx(0.5 + 0.8).epsilon(1e-12));
  CHECK(q2(0, 1) == doctest::Approx(-1 + 0.4).epsilon(1e-12));
  CHECK(q2(1, 1) == doctest::Approx(2 + 0.2).epsilon(1e-12));
  const auto e = sym_eigen(q2);
  CHECK(e.values.front() > 0.0);
}

TEST_CASE("sym_sqrt") {
  const auto r = sym_sqrt(SymMatrix(2, {4, 0, 0, 9}));
  CHECK(r(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r(1, 1) == doctest::Approx(3.0).epsilon(1e-12));

  const auto ri = sym_sqrt(SymMatrix::identity(3));
  CHECK(ri(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  const SymMatrix a(2, {2, 1, 1, 2});
  const auto s = sym_sqrt(a);
  const auto sq = SymMatrix::from_general(s.to_general().multiply(s.to_general()));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(sq(i, j) - a(i, j)) <= 1e-10 * a.max_abs());

  CHECK_THROWS_AS(sym_sqrt(SymMatrix(2, {-1, 0, 0, 1})), NotPsdError);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const SymMatrix m = random_psd(n, rng);
    const auto h = sym_sqrt(m);
    const auto hh = SymMatrix::from_general(h.to_general().multiply(h.to_general()));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(hh(i, j) - m(i, j)) <= 1e-10 * std::max(1.0, m.max_abs()));
  }
}

TEST_CASE("spectral_radius closed forms") {
  CHECK(spectral_radius(GeneralMatrix(2, {0.5, 0, 0, 0.5})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(spectral_radius(GeneralMatrix(2, {0, 1, -1, 0})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_radius(GeneralMatrix(2, {0.9, 0.5, 0, 0.9})) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("spectral_radius matches quadratic-formula roots on random 2x2") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    const double tr = a + d, det = a * d - b * c;
    const double disc = tr * tr - 4 * det;
    double want;
    if (disc >= 0) {
      want = std::max(std::abs(0.5 * (tr + std::sqrt(disc))), std::abs(0.5 * (tr - std::sqrt(disc))));
    } else {
      want = std::sqrt(det);
    }
    CHECK(spectral_radius(GeneralMatrix(2, {a, b, c, d})) == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("spectral_radius beyond 2x2") {
  // upper triangular: eigenvalues on the diagonal
  GeneralMatrix t(4, 4);
  const double diag[4] = {0.3, -1.7, 0.9, 1.2};
  for (int i = 0; i < 4; ++i) {
    t(i, i) = diag[i];
    for (int j = i + 1; j < 4; ++j) t(i, j) = 0.5;
  }
  CHECK(spectral_radius(t) == doctest::Approx(1.7).epsilon(1e-8));

  // block with a complex pair of modulus sqrt(2) plus a real eigenvalue 0.4
  GeneralMatrix m(3, 3);
  m(0, 0) = 1;
  m(0, 1) = 1;
  m(1, 0) = -1;
  m(1, 1) = 1;
  m(2, 2) = 0.4;
  m(0, 2) = 0.3;
  CHECK(spectral_radius(m) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("solve and inverse") {
  const GeneralMatrix a(2, {2, 1, 1, 3});
  const Vec x = solve(a, Vec{5, 10});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-12));
  const auto inv = inverse(a);
  const auto prod = a.multiply(inv);
  CHECK(prod(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(prod(0, 1)) <= 1e-12);
  CHECK_THROWS_AS(solve(GeneralMatrix(2, {1, 2, 2, 4}), Vec{1, 1}), SingularMatrixError);
}
