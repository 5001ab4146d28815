#pragma once

// Dense real linear algebra for small matrices (n <= 16): products, LU
// solves, eigenvalues, definiteness tests, rank and spectral norms.
// Everything is value-typed and immutable after construction; all entries
// are validated finite on construction.

#include <complex>
#include <initializer_list>
#include <vector>

#include "dissiped/errors.hpp"

namespace dissiped {

inline constexpr int kMaxDim = 16;

using ComplexScalar = std::complex<double>;

struct ColVec {
  std::vector<double> v;

  ColVec() = default;
  explicit ColVec(int dim, double fill = 0.0);
  ColVec(std::initializer_list<double> entries);
  static ColVec from(std::vector<double> entries);

  int dim() const { return static_cast<int>(v.size()); }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }
  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
};

struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major

  Mat() = default;
  Mat(int r, int c, double fill = 0.0);
  Mat(std::initializer_list<std::initializer_list<double>> rws);
  static Mat identity(int n);
  static Mat from(int r, int c, std::vector<double> entries);
  static Mat diag(const ColVec& d);

  double operator()(int i, int j) const {
    return a[static_cast<size_t>(i) * cols + j];
  }
  double& operator()(int i, int j) {
    return a[static_cast<size_t>(i) * cols + j];
  }
  bool square() const { return rows == cols; }
};

// ---- arithmetic -----------------------------------------------------------

Mat operator+(const Mat& x, const Mat& y);
Mat operator-(const Mat& x, const Mat& y);
Mat operator*(const Mat& x, const Mat& y);
Mat operator*(double s, const Mat& x);
ColVec operator*(const Mat& x, const ColVec& y);
ColVec operator+(const ColVec& x, const ColVec& y);
ColVec operator-(const ColVec& x, const ColVec& y);
ColVec operator*(double s, const ColVec& x);

Mat transpose(const Mat& x);
double dot(const ColVec& x, const ColVec& y);
double norm2(const ColVec& x);
double norm_inf(const ColVec& x);
double norm_inf(const Mat& x);       // max absolute row sum
double norm_max_abs(const Mat& x);   // max |entry|

// ---- factorizations and solvers -------------------------------------------

/// Solves Ax = b by LU with partial pivoting.
/// Throws SingularMatrix when a pivot magnitude is <= 1e-13 * ||A||_inf.
ColVec solve_linear(const Mat& A, const ColVec& b);

/// A^{-1} column by column through the LU solve.
Mat inverse(const Mat& A);

/// det(A) via partially pivoted LU with exact power-of-two row equilibration
/// (keeps relative accuracy when row scales differ by many orders).
/// Returns 0 when a pivot vanishes; never throws on singular input.
double determinant(const Mat& A);

/// All n eigenvalues (with multiplicity) of a real square matrix, n <= 16.
/// Hessenberg reduction followed by complex Wilkinson-shifted QR iteration;
/// backward error <= 1e-9*||A|| for the sizes in scope. Throws NoConvergence
/// when the iteration exceeds max_iter_per_n * n QR steps.
std::vector<ComplexScalar> eigenvalues(const Mat& A, int max_iter_per_n = 100);

/// Eigenvalues of (S+S')/2 by cyclic Jacobi rotations, ascending order.
/// Requires ||S - S'||_inf <= 1e-9 * ||S||_inf (symmetrized internally).
std::vector<double> symmetric_eigenvalues(const Mat& S);

double max_eig_symmetric(const Mat& S);
double min_eig_symmetric(const Mat& S);

/// True iff the Cholesky factorization succeeds with every pivot
/// > 1e-12 * trace(S) / n.
bool is_positive_definite(const Mat& S);

/// Numerical rank: column-pivoted QR, counting diagonal magnitudes
/// > tol * largest.
int rank(const Mat& A, double tol = 1e-9);

/// rank() after exact power-of-two row equilibration. Row scaling leaves the
/// rank unchanged and keeps the relative tolerance meaningful for stacks
/// whose row norms span many orders of magnitude (e.g. [C; CA; ...]).
int rank_row_equilibrated(const Mat& A, double tol = 1e-9);

/// Largest singular value, sqrt(max eig of A'A).
double spectral_norm(const Mat& A);

}  // namespace dissiped
