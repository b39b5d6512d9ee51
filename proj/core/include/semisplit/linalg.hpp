#pragma once

// Dense kit for the small symmetric matrices this project works with
// (preconditioners, Minty certificate matrices, 2x2..4x4 step operators).
// Everything is value-semantic and allocation-light; dimensions stay <= ~16.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "semisplit/errors.hpp"

namespace semisplit::linalg {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(double s, const Vec& a);
// a + s*b
Vec axpy(const Vec& a, double s, const Vec& b);

class GeneralMatrix {
 public:
  GeneralMatrix() = default;
  GeneralMatrix(int rows, int cols);
  GeneralMatrix(int n, std::initializer_list<double> row_major);
  static GeneralMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  Vec apply(const Vec& x) const;
  Vec apply_transpose(const Vec& x) const;
  GeneralMatrix transpose() const;
  GeneralMatrix multiply(const GeneralMatrix& rhs) const;
  double trace() const;
  double max_abs() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

GeneralMatrix add(const GeneralMatrix& a, const GeneralMatrix& b);
GeneralMatrix sub(const GeneralMatrix& a, const GeneralMatrix& b);
GeneralMatrix scale(double s, const GeneralMatrix& a);

// Symmetric by construction: off-diagonal pairs are averaged on input.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);
  SymMatrix(int n, std::initializer_list<double> row_major);
  static SymMatrix identity(int n);
  static SymMatrix from_general(const GeneralMatrix& a);

  int n() const { return n_; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
  void set(int i, int j, double v);

  Vec apply(const Vec& x) const;
  // x' * (*this) * y
  double quad(const Vec& x, const Vec& y) const;
  double quad(const Vec& x) const { return quad(x, x); }
  GeneralMatrix to_general() const;
  double max_abs() const;

 private:
  int n_ = 0;
  std::vector<double> a_;
};

SymMatrix add(const SymMatrix& a, const SymMatrix& b);
SymMatrix sub(const SymMatrix& a, const SymMatrix& b);
SymMatrix scale(double s, const SymMatrix& a);

struct EigenDecomposition {
  Vec values;             // ascending
  GeneralMatrix vectors;  // orthonormal columns, A v_i = values[i] v_i
};

// Cyclic Jacobi; exact enough for the n <= 16 sizes used here.
EigenDecomposition sym_eigen(const SymMatrix& a);

// Orthonormal columns spanning range(M) (eigenvectors with eigenvalue above
// rank_tol * lambda_max). Throws NotPsdError when M has a clearly negative
// eigenvalue. The result may have zero columns (M = 0).
GeneralMatrix range_basis(const SymMatrix& m, double rank_tol = 1e-10);

// Q = M + (I - Z Z'), positive definite whenever Z spans range(M).
SymMatrix derived_q(const SymMatrix& m, const GeneralMatrix& z);

SymMatrix sym_sqrt(const SymMatrix& a);

// All eigenvalues. 1x1 and 2x2 use the closed-form characteristic polynomial
// (complex pairs included); larger matrices go through a Hessenberg QR
// iteration. Throws NoConvergenceError when the iteration stalls.
std::vector<std::complex<double>> eigenvalues(const GeneralMatrix& h);

// Largest eigenvalue modulus.
double spectral_radius(const GeneralMatrix& h);

// Gaussian elimination with partial pivoting.
Vec solve(GeneralMatrix a, Vec b);
GeneralMatrix inverse(const GeneralMatrix& a);

}  // namespace semisplit::linalg
