#include "semisplit/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <numeric>

namespace semisplit::linalg {

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec add(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scale(double s, const Vec& a) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

Vec axpy(const Vec& a, double s, const Vec& b) {
  assert(a.size() == b.size());
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
  return r;
}

GeneralMatrix::GeneralMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

GeneralMatrix::GeneralMatrix(int n, std::initializer_list<double> row_major)
    : GeneralMatrix(n, n) {
  assert(static_cast<int>(row_major.size()) == n * n);
  std::copy(row_major.begin(), row_major.end(), a_.begin());
}

GeneralMatrix GeneralMatrix::identity(int n) {
  GeneralMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec GeneralMatrix::apply(const Vec& x) const {
  assert(static_cast<int>(x.size()) == cols_);
  Vec r(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0;
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

Vec GeneralMatrix::apply_transpose(const Vec& x) const {
  assert(static_cast<int>(x.size()) == rows_);
  Vec r(cols_, 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r[j] += (*this)(i, j) * x[i];
  return r;
}

GeneralMatrix GeneralMatrix::transpose() const {
  GeneralMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

GeneralMatrix GeneralMatrix::multiply(const GeneralMatrix& rhs) const {
  assert(cols_ == rhs.rows_);
  GeneralMatrix r(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < rhs.cols_; ++j) r(i, j) += aik * rhs(k, j);
    }
  return r;
}

double GeneralMatrix::trace() const {
  double t = 0;
  for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double GeneralMatrix::max_abs() const {
  double m = 0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

GeneralMatrix add(const GeneralMatrix& a, const GeneralMatrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  GeneralMatrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

GeneralMatrix sub(const GeneralMatrix& a, const GeneralMatrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  GeneralMatrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

GeneralMatrix scale(double s, const GeneralMatrix& a) {
  GeneralMatrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  return r;
}

SymMatrix::SymMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) { assert(n >= 1); }

SymMatrix::SymMatrix(int n, std::initializer_list<double> row_major) : SymMatrix(n) {
  assert(static_cast<int>(row_major.size()) == n * n);
  std::copy(row_major.begin(), row_major.end(), a_.begin());
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      const double v = 0.5 * (a_[static_cast<size_t>(i) * n_ + j] + a_[static_cast<size_t>(j) * n_ + i]);
      a_[static_cast<size_t>(i) * n_ + j] = v;
      a_[static_cast<size_t>(j) * n_ + i] = v;
    }
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::from_general(const GeneralMatrix& a) {
  assert(a.rows() == a.cols());
  SymMatrix m(a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i; j < a.cols(); ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return m;
}

void SymMatrix::set(int i, int j, double v) {
  a_[static_cast<size_t>(i) * n_ + j] = v;
  a_[static_cast<size_t>(j) * n_ + i] = v;
}

Vec SymMatrix::apply(const Vec& x) const {
  assert(static_cast<int>(x.size()) == n_);
  Vec r(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    double s = 0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

double SymMatrix::quad(const Vec& x, const Vec& y) const { return dot(x, apply(y)); }

GeneralMatrix SymMatrix::to_general() const {
  GeneralMatrix g(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g(i, j) = (*this)(i, j);
  return g;
}

double SymMatrix::max_abs() const {
  double m = 0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

SymMatrix add(const SymMatrix& a, const SymMatrix& b) {
  assert(a.n() == b.n());
  SymMatrix r(a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = i; j < a.n(); ++j) r.set(i, j, a(i, j) + b(i, j));
  return r;
}

SymMatrix sub(const SymMatrix& a, const SymMatrix& b) {
  assert(a.n() == b.n());
  SymMatrix r(a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = i; j < a.n(); ++j) r.set(i, j, a(i, j) - b(i, j));
  return r;
}

SymMatrix scale(double s, const SymMatrix& a) {
  SymMatrix r(a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = i; j < a.n(); ++j) r.set(i, j, s * a(i, j));
  return r;
}

EigenDecomposition sym_eigen(const SymMatrix& a) {
  const int n = a.n();
  GeneralMatrix d = a.to_general();
  GeneralMatrix v = GeneralMatrix::identity(n);

  auto off_norm = [&]() {
    double s = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += d(i, j) * d(i, j);
    return s;
  };

  const double scale0 = std::max(1.0, a.max_abs());
  const double tol = 1e-30 * scale0 * scale0;
  for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = d(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (d(q, q) - d(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double dpp = d(p, p), dqq = d(q, q);
        d(p, p) = dpp - t * apq;
        d(q, q) = dqq + t * apq;
        d(p, q) = 0.0;
        d(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double drp = d(r, p), drq = d(r, q);
            d(r, p) = drp - s * (drq + tau * drp);
            d(p, r) = d(r, p);
            d(r, q) = drq + s * (drp - tau * drq);
            d(q, r) = d(r, q);
          }
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return d(i, i) < d(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = GeneralMatrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = d(order[k], order[k]);
    for (int r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

GeneralMatrix range_basis(const SymMatrix& m, double rank_tol) {
  const auto eig = sym_eigen(m);
  const int n = m.n();
  const double lmax = eig.values.empty() ? 0.0 : eig.values.back();
  const double lmin = eig.values.empty() ? 0.0 : eig.values.front();
  if (lmin < -rank_tol * std::max(1.0, lmax))
    throw NotPsdError("range_basis: matrix is not positive semidefinite (lambda_min = " +
                      std::to_string(lmin) + ")");
  const double cut = rank_tol * std::max(lmax, 0.0);
  std::vector<int> keep;
  for (int k = 0; k < n; ++k)
    if (eig.values[k] > cut) keep.push_back(k);
  GeneralMatrix z(n, static_cast<int>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c)
    for (int r = 0; r < n; ++r) z(r, static_cast<int>(c)) = eig.vectors(r, keep[c]);
  return z;
}

SymMatrix derived_q(const SymMatrix& m, const GeneralMatrix& z) {
  const int n = m.n();
  SymMatrix q(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double pij = 0;
      for (int c = 0; c < z.cols(); ++c) pij += z(i, c) * z(j, c);
      const double id = (i == j) ? 1.0 : 0.0;
      q.set(i, j, m(i, j) + id - pij);
    }
  return q;
}

SymMatrix sym_sqrt(const SymMatrix& a) {
  const auto eig = sym_eigen(a);
  const int n = a.n();
  const double lmax = eig.values.back();
  const double tol = 1e-10 * std::max(1.0, lmax);
  SymMatrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < n; ++k) {
        double lam = eig.values[k];
        if (lam < -tol) throw NotPsdError("sym_sqrt: matrix is not positive semidefinite");
        lam = std::max(lam, 0.0);
        s += std::sqrt(lam) * eig.vectors(i, k) * eig.vectors(j, k);
      }
      r.set(i, j, s);
    }
  return r;
}

namespace {

std::pair<std::complex<double>, std::complex<double>> eigen_2x2(double a, double b, double c,
                                                                double d) {
  const double tr = a + d;
  const double det = a * d - b * c;
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0) {
    const double s = std::sqrt(disc);
    return {std::complex<double>(0.5 * (tr + s), 0.0), std::complex<double>(0.5 * (tr - s), 0.0)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
}

// Householder reduction to upper Hessenberg form (in place).
void hessenberg(GeneralMatrix& h) {
  const int n = h.rows();
  for (int k = 0; k < n - 2; ++k) {
    double scale = 0;
    for (int i = k + 1; i < n; ++i) scale += std::abs(h(i, k));
    if (scale == 0.0) continue;
    Vec v(n, 0.0);
    double sigma = 0;
    for (int i = k + 1; i < n; ++i) {
      v[i] = h(i, k) / scale;
      sigma += v[i] * v[i];
    }
    double alpha = std::sqrt(sigma);
    if (v[k + 1] > 0) alpha = -alpha;
    v[k + 1] -= alpha;
    const double beta = -alpha * v[k + 1];
    if (beta == 0.0) continue;
    // H <- P H P with P = I - v v'/beta
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int i = k + 1; i < n; ++i) s += v[i] * h(i, j);
      s /= beta;
      for (int i = k + 1; i < n; ++i) h(i, j) -= s * v[i];
    }
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      s /= beta;
      for (int j = k + 1; j < n; ++j) h(i, j) -= s * v[j];
    }
    h(k + 1, k) = alpha * scale;
    for (int i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const GeneralMatrix& h0) {
  const int n = h0.rows();
  if (n != h0.cols()) throw Error("eigenvalues: matrix must be square");
  if (n == 1) return {std::complex<double>(h0(0, 0), 0.0)};
  if (n == 2) {
    const auto [l1, l2] = eigen_2x2(h0(0, 0), h0(0, 1), h0(1, 0), h0(1, 1));
    return {l1, l2};
  }

  GeneralMatrix h = h0;
  hessenberg(h);
  const double eps = 1e-14 * std::max(1.0, h.max_abs());

  std::vector<std::complex<double>> out;
  int hi = n - 1;
  int iters = 0;
  const int max_iters = 10000;
  while (hi >= 0) {
    if (++iters > max_iters)
      throw NoConvergenceError("eigenvalues: QR iteration did not converge");
    // deflate trivial subdiagonals
    int lo = hi;
    while (lo > 0 && std::abs(h(lo, lo - 1)) > eps * (std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1))))
      --lo;
    if (lo == hi) {
      out.emplace_back(h(hi, hi), 0.0);
      --hi;
      continue;
    }
    if (lo == hi - 1) {
      const auto [l1, l2] = eigen_2x2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
      out.push_back(l1);
      out.push_back(l2);
      hi -= 2;
      continue;
    }
    // single shifted QR step on the active block, via Givens rotations
    double shift = h(hi, hi);
    if (iters % 17 == 0) shift += std::abs(h(hi, hi - 1));  // exceptional shift
    for (int i = lo; i <= hi; ++i) h(i, i) -= shift;
    std::vector<std::pair<double, double>> rot(hi - lo);
    for (int k = lo; k < hi; ++k) {
      const double x = h(k, k), y = h(k + 1, k);
      const double r = std::hypot(x, y);
      const double c = (r == 0) ? 1.0 : x / r;
      const double s = (r == 0) ? 0.0 : y / r;
      rot[k - lo] = {c, s};
      for (int j = k; j <= hi; ++j) {
        const double t1 = h(k, j), t2 = h(k + 1, j);
        h(k, j) = c * t1 + s * t2;
        h(k + 1, j) = -s * t1 + c * t2;
      }
    }
    for (int k = lo; k < hi; ++k) {
      const auto [c, s] = rot[k - lo];
      for (int i = lo; i <= std::min(k + 2, hi); ++i) {
        const double t1 = h(i, k), t2 = h(i, k + 1);
        h(i, k) = c * t1 + s * t2;
        h(i, k + 1) = -s * t1 + c * t2;
      }
    }
    for (int i = lo; i <= hi; ++i) h(i, i) += shift;
  }
  return out;
}

double spectral_radius(const GeneralMatrix& h) {
  double radius = 0;
  for (const auto& lam : eigenvalues(h)) radius = std::max(radius, std::abs(lam));
  return radius;
}

Vec solve(GeneralMatrix a, Vec b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n)
    throw Error("solve: dimension mismatch");
  std::vector<int> piv(n);
  std::iota(piv.begin(), piv.end(), 0);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (std::abs(a(p, k)) < 1e-300) throw SingularMatrixError("solve: singular matrix");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      a(i, k) = 0;
      for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

GeneralMatrix inverse(const GeneralMatrix& a) {
  const int n = a.rows();
  GeneralMatrix inv(n, n);
  for (int c = 0; c < n; ++c) {
    Vec e(n, 0.0);
    e[c] = 1.0;
    const Vec col = solve(a, e);
    for (int r = 0; r < n; ++r) inv(r, c) = col[r];
  }
  return inv;
}

}  // namespace semisplit::linalg
