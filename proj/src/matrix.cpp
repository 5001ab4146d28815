#include "dissiped/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dissiped {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

void check_finite(const std::vector<double>& xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw std::invalid_argument(what);
  }
}

}  // namespace

ColVec::ColVec(int dim, double fill) : v(static_cast<size_t>(dim), fill) {
  if (dim < 0) throw std::invalid_argument("ColVec: negative dim");
  check_finite(v, "ColVec: non-finite entry");
}

ColVec::ColVec(std::initializer_list<double> entries) : v(entries) {
  check_finite(v, "ColVec: non-finite entry");
}

ColVec ColVec::from(std::vector<double> entries) {
  ColVec out;
  out.v = std::move(entries);
  check_finite(out.v, "ColVec: non-finite entry");
  return out;
}

Mat::Mat(int r, int c, double fill)
    : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {
  if (r < 0 || c < 0) throw std::invalid_argument("Mat: negative size");
  check_finite(a, "Mat: non-finite entry");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rws) {
  rows = static_cast<int>(rws.size());
  cols = rows ? static_cast<int>(rws.begin()->size()) : 0;
  a.reserve(static_cast<size_t>(rows) * cols);
  for (const auto& r : rws) {
    if (static_cast<int>(r.size()) != cols)
      throw std::invalid_argument("Mat: ragged rows");
    a.insert(a.end(), r.begin(), r.end());
  }
  check_finite(a, "Mat: non-finite entry");
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::from(int r, int c, std::vector<double> entries) {
  if (static_cast<size_t>(r) * c != entries.size())
    throw std::invalid_argument("Mat: entry count != rows*cols");
  Mat m;
  m.rows = r;
  m.cols = c;
  m.a = std::move(entries);
  check_finite(m.a, "Mat: non-finite entry");
  return m;
}

Mat Mat::diag(const ColVec& d) {
  Mat m(d.dim(), d.dim());
  for (int i = 0; i < d.dim(); ++i) m(i, i) = d[i];
  return m;
}

Mat operator+(const Mat& x, const Mat& y) {
  require(x.rows == y.rows && x.cols == y.cols, "Mat+: size mismatch");
  Mat z = x;
  for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
  return z;
}

Mat operator-(const Mat& x, const Mat& y) {
  require(x.rows == y.rows && x.cols == y.cols, "Mat-: size mismatch");
  Mat z = x;
  for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
  return z;
}

Mat operator*(const Mat& x, const Mat& y) {
  require(x.cols == y.rows, "Mat*: inner dim mismatch");
  Mat z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int k = 0; k < x.cols; ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
    }
  }
  return z;
}

Mat operator*(double s, const Mat& x) {
  Mat z = x;
  for (double& e : z.a) e *= s;
  return z;
}

ColVec operator*(const Mat& x, const ColVec& y) {
  require(x.cols == y.dim(), "Mat*vec: dim mismatch");
  ColVec z(x.rows);
  for (int i = 0; i < x.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < x.cols; ++j) s += x(i, j) * y[j];
    z[i] = s;
  }
  return z;
}

ColVec operator+(const ColVec& x, const ColVec& y) {
  require(x.dim() == y.dim(), "vec+: dim mismatch");
  ColVec z = x;
  for (int i = 0; i < z.dim(); ++i) z[i] += y[i];
  return z;
}

ColVec operator-(const ColVec& x, const ColVec& y) {
  require(x.dim() == y.dim(), "vec-: dim mismatch");
  ColVec z = x;
  for (int i = 0; i < z.dim(); ++i) z[i] -= y[i];
  return z;
}

ColVec operator*(double s, const ColVec& x) {
  ColVec z = x;
  for (double& e : z.v) e *= s;
  return z;
}

Mat transpose(const Mat& x) {
  Mat z(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) z(j, i) = x(i, j);
  return z;
}

double dot(const ColVec& x, const ColVec& y) {
  require(x.dim() == y.dim(), "dot: dim mismatch");
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(const ColVec& x) { return std::sqrt(dot(x, x)); }

double norm_inf(const ColVec& x) {
  double m = 0.0;
  for (double e : x.v) m = std::max(m, std::fabs(e));
  return m;
}

double norm_inf(const Mat& x) {
  double m = 0.0;
  for (int i = 0; i < x.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < x.cols; ++j) s += std::fabs(x(i, j));
    m = std::max(m, s);
  }
  return m;
}

double norm_max_abs(const Mat& x) {
  double m = 0.0;
  for (double e : x.a) m = std::max(m, std::fabs(e));
  return m;
}

// ---- LU -------------------------------------------------------------------

namespace {

struct Lu {
  Mat lu;                 // combined factors, row-permuted
  std::vector<int> perm;  // row permutation
  int sign = 1;
  bool singular = false;  // exact zero pivot hit (determinant use)
};

Lu lu_factor(const Mat& A) {
  Lu f;
  f.lu = A;
  const int n = A.rows;
  f.perm.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) f.perm[static_cast<size_t>(i)] = i;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(f.lu(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double m = std::fabs(f.lu(i, k));
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[static_cast<size_t>(k)], f.perm[static_cast<size_t>(piv)]);
      f.sign = -f.sign;
    }
    const double pivot = f.lu(k, k);
    if (pivot == 0.0) {
      f.singular = true;
      continue;
    }
    for (int i = k + 1; i < n; ++i) {
      const double l = f.lu(i, k) / pivot;
      f.lu(i, k) = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n; ++j) f.lu(i, j) -= l * f.lu(k, j);
    }
  }
  return f;
}

}  // namespace

ColVec solve_linear(const Mat& A, const ColVec& b) {
  require(A.square(), "solve_linear: A not square");
  require(A.rows == b.dim(), "solve_linear: rhs dim mismatch");
  const int n = A.rows;
  const double scale = norm_inf(A);
  const Lu f = lu_factor(A);
  for (int k = 0; k < n; ++k) {
    if (std::fabs(f.lu(k, k)) <= 1e-13 * scale)
      throw SingularMatrix("solve_linear: pivot below 1e-13*||A||_inf");
  }
  ColVec x(n);
  // forward substitution on permuted b
  for (int i = 0; i < n; ++i) {
    double s = b[f.perm[static_cast<size_t>(i)]];
    for (int j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

Mat inverse(const Mat& A) {
  require(A.square(), "inverse: A not square");
  const int n = A.rows;
  Mat inv(n, n);
  for (int j = 0; j < n; ++j) {
    ColVec e(n);
    e[j] = 1.0;
    const ColVec col = solve_linear(A, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

double determinant(const Mat& A) {
  require(A.square(), "determinant: A not square");
  const int n = A.rows;
  if (n == 0) return 1.0;
  // Exact power-of-two row equilibration: scaling by 2^k is lossless and
  // keeps the pivots near unit magnitude when row scales differ widely.
  Mat B = A;
  long exp_sum = 0;
  for (int i = 0; i < n; ++i) {
    double rmax = 0.0;
    for (int j = 0; j < n; ++j) rmax = std::max(rmax, std::fabs(B(i, j)));
    if (rmax == 0.0) return 0.0;
    int e = 0;
    (void)std::frexp(rmax, &e);  // rmax = f * 2^e, f in [0.5, 1)
    exp_sum += e;
    for (int j = 0; j < n; ++j) B(i, j) = std::ldexp(B(i, j), -e);
  }
  const Lu f = lu_factor(B);
  if (f.singular) return 0.0;
  double prod = static_cast<double>(f.sign);
  long prod_exp = 0;
  for (int k = 0; k < n; ++k) {
    prod *= f.lu(k, k);
    int e = 0;
    prod = std::frexp(prod, &e);
    prod_exp += e;
  }
  return std::ldexp(prod, static_cast<int>(prod_exp + exp_sum));
}

// ---- eigenvalues: Hessenberg + complex shifted QR ---------------------------

namespace {

using CMat = std::vector<std::vector<ComplexScalar>>;

// Householder reduction to upper Hessenberg form (real arithmetic).
Mat hessenberg(Mat H) {
  const int n = H.rows;
  for (int k = 0; k < n - 2; ++k) {
    double xnorm = 0.0;
    for (int i = k + 1; i < n; ++i) xnorm += H(i, k) * H(i, k);
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    double alpha = H(k + 1, k) >= 0 ? -xnorm : xnorm;
    std::vector<double> w(static_cast<size_t>(n), 0.0);
    w[static_cast<size_t>(k + 1)] = H(k + 1, k) - alpha;
    for (int i = k + 2; i < n; ++i) w[static_cast<size_t>(i)] = H(i, k);
    double wnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i)
      wnorm2 += w[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
    if (wnorm2 == 0.0) continue;
    // H <- (I - 2ww'/w'w) H (I - 2ww'/w'w)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = k + 1; i < n; ++i) s += w[static_cast<size_t>(i)] * H(i, j);
      s = 2.0 * s / wnorm2;
      for (int i = k + 1; i < n; ++i) H(i, j) -= s * w[static_cast<size_t>(i)];
    }
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = k + 1; j < n; ++j) s += H(i, j) * w[static_cast<size_t>(j)];
      s = 2.0 * s / wnorm2;
      for (int j = k + 1; j < n; ++j) H(i, j) -= s * w[static_cast<size_t>(j)];
    }
    for (int i = k + 2; i < n; ++i) H(i, k) = 0.0;
  }
  return H;
}

std::pair<ComplexScalar, ComplexScalar> eig2x2(ComplexScalar a, ComplexScalar b,
                                               ComplexScalar c, ComplexScalar d) {
  const ComplexScalar tr = a + d;
  const ComplexScalar det = a * d - b * c;
  const ComplexScalar disc = std::sqrt(tr * tr - 4.0 * det);
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

}  // namespace

std::vector<ComplexScalar> eigenvalues(const Mat& A, int max_iter_per_n) {
  require(A.square(), "eigenvalues: A not square");
  const int n = A.rows;
  require(n <= kMaxDim, "eigenvalues: n > 16");
  std::vector<ComplexScalar> out;
  if (n == 0) return out;
  if (n == 1) return {ComplexScalar(A(0, 0), 0.0)};

  const Mat Hr = hessenberg(A);
  CMat H(static_cast<size_t>(n), std::vector<ComplexScalar>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H[static_cast<size_t>(i)][static_cast<size_t>(j)] = Hr(i, j);

  const double anorm = std::max(norm_max_abs(A), std::numeric_limits<double>::min());
  const double eps = std::numeric_limits<double>::epsilon();
  const long max_iter = static_cast<long>(max_iter_per_n) * n;
  long iter = 0;
  int stagnation = 0;

  auto subdiag_small = [&](int i) {
    const double s = std::abs(H[static_cast<size_t>(i - 1)][static_cast<size_t>(i - 1)]) +
                     std::abs(H[static_cast<size_t>(i)][static_cast<size_t>(i)]);
    return std::abs(H[static_cast<size_t>(i)][static_cast<size_t>(i - 1)]) <=
           eps * std::max(s, 0.5 * anorm);
  };

  int m = n - 1;  // active trailing index
  while (m >= 0) {
    if (m == 0) {
      out.push_back(H[0][0]);
      break;
    }
    if (subdiag_small(m)) {
      out.push_back(H[static_cast<size_t>(m)][static_cast<size_t>(m)]);
      --m;
      stagnation = 0;
      continue;
    }
    // find the start of the active block
    int l = m - 1;
    while (l > 0 && !subdiag_small(l)) --l;
    if (m - l == 1) {
      const auto [e1, e2] = eig2x2(H[static_cast<size_t>(l)][static_cast<size_t>(l)],
                                   H[static_cast<size_t>(l)][static_cast<size_t>(m)],
                                   H[static_cast<size_t>(m)][static_cast<size_t>(l)],
                                   H[static_cast<size_t>(m)][static_cast<size_t>(m)]);
      out.push_back(e1);
      out.push_back(e2);
      m -= 2;
      stagnation = 0;
      continue;
    }
    if (iter++ >= max_iter)
      throw NoConvergence("eigenvalues: QR iteration cap exceeded");

    // Wilkinson shift from the trailing 2x2 of the active block.
    const auto [s1, s2] = eig2x2(
        H[static_cast<size_t>(m - 1)][static_cast<size_t>(m - 1)],
        H[static_cast<size_t>(m - 1)][static_cast<size_t>(m)],
        H[static_cast<size_t>(m)][static_cast<size_t>(m - 1)],
        H[static_cast<size_t>(m)][static_cast<size_t>(m)]);
    const ComplexScalar hmm = H[static_cast<size_t>(m)][static_cast<size_t>(m)];
    ComplexScalar shift = (std::abs(s1 - hmm) < std::abs(s2 - hmm)) ? s1 : s2;
    if (++stagnation % 20 == 0) {
      // exceptional shift to break symmetric stalls
      shift = hmm + ComplexScalar(
                        0.75 * std::abs(H[static_cast<size_t>(m)][static_cast<size_t>(m - 1)]),
                        0.0);
    }

    // Explicit shifted QR step on the active block via Givens rotations:
    // H - sI = QR, H <- RQ + sI, all restricted to [l, m].
    for (int i = l; i <= m; ++i) H[static_cast<size_t>(i)][static_cast<size_t>(i)] -= shift;
    std::vector<ComplexScalar> cs(static_cast<size_t>(m), 0.0), sn(static_cast<size_t>(m), 0.0);
    for (int k = l; k < m; ++k) {
      ComplexScalar x = H[static_cast<size_t>(k)][static_cast<size_t>(k)];
      ComplexScalar y = H[static_cast<size_t>(k + 1)][static_cast<size_t>(k)];
      const double r = std::hypot(std::abs(x), std::abs(y));
      ComplexScalar c(1.0, 0.0), s(0.0, 0.0);
      if (r > 0.0) {
        c = std::conj(x) / r;
        s = std::conj(y) / r;
      }
      cs[static_cast<size_t>(k)] = c;
      sn[static_cast<size_t>(k)] = s;
      for (int j = k; j <= m; ++j) {
        const ComplexScalar hk = H[static_cast<size_t>(k)][static_cast<size_t>(j)];
        const ComplexScalar hk1 = H[static_cast<size_t>(k + 1)][static_cast<size_t>(j)];
        H[static_cast<size_t>(k)][static_cast<size_t>(j)] = c * hk + s * hk1;
        H[static_cast<size_t>(k + 1)][static_cast<size_t>(j)] =
            -std::conj(s) * hk + std::conj(c) * hk1;
      }
    }
    for (int k = l; k < m; ++k) {
      const ComplexScalar c = cs[static_cast<size_t>(k)];
      const ComplexScalar s = sn[static_cast<size_t>(k)];
      for (int i = l; i <= k + 1; ++i) {
        const ComplexScalar hik = H[static_cast<size_t>(i)][static_cast<size_t>(k)];
        const ComplexScalar hik1 = H[static_cast<size_t>(i)][static_cast<size_t>(k + 1)];
        H[static_cast<size_t>(i)][static_cast<size_t>(k)] = hik * std::conj(c) + hik1 * std::conj(s);
        H[static_cast<size_t>(i)][static_cast<size_t>(k + 1)] = -hik * s + hik1 * c;
      }
    }
    for (int i = l; i <= m; ++i) H[static_cast<size_t>(i)][static_cast<size_t>(i)] += shift;
  }

  std::sort(out.begin(), out.end(), [](const ComplexScalar& x, const ComplexScalar& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

// ---- symmetric eigenvalues: cyclic Jacobi ----------------------------------

std::vector<double> symmetric_eigenvalues(const Mat& S0) {
  require(S0.square(), "symmetric_eigenvalues: not square");
  const int n = S0.rows;
  const double scale = norm_inf(S0);
  {
    const Mat D = S0 - transpose(S0);
    if (norm_inf(D) > 1e-9 * std::max(scale, std::numeric_limits<double>::min()) &&
        norm_inf(D) > 0.0)
      throw std::invalid_argument("symmetric_eigenvalues: matrix is not symmetric");
  }
  Mat S = 0.5 * (S0 + transpose(S0));
  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += S(i, j) * S(i, j);
    return std::sqrt(2.0 * s);
  };
  double fro = 0.0;
  for (double e : S.a) fro += e * e;
  fro = std::sqrt(fro);
  const double tol = 1e-15 * std::max(fro, std::numeric_limits<double>::min());

  for (int sweep = 0; sweep < 60 && off_norm() > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = S(p, q);
        if (apq == 0.0) continue;
        const double app = S(p, p);
        const double aqq = S(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double skp = S(k, p);
          const double skq = S(k, q);
          S(k, p) = c * skp - s * skq;
          S(k, q) = s * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          const double spk = S(p, k);
          const double sqk = S(q, k);
          S(p, k) = c * spk - s * sqk;
          S(q, k) = s * spk + c * sqk;
        }
        S(p, q) = 0.0;
        S(q, p) = 0.0;
      }
    }
  }
  std::vector<double> eigs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) eigs[static_cast<size_t>(i)] = S(i, i);
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

double max_eig_symmetric(const Mat& S) { return symmetric_eigenvalues(S).back(); }

double min_eig_symmetric(const Mat& S) { return symmetric_eigenvalues(S).front(); }

bool is_positive_definite(const Mat& S0) {
  require(S0.square(), "is_positive_definite: not square");
  const int n = S0.rows;
  if (n == 0) return true;
  Mat S = 0.5 * (S0 + transpose(S0));
  double tr = 0.0;
  for (int i = 0; i < n; ++i) tr += S(i, i);
  const double floor = 1e-12 * tr / n;
  // in-place lower Cholesky
  for (int k = 0; k < n; ++k) {
    double pivot = S(k, k);
    for (int j = 0; j < k; ++j) pivot -= S(k, j) * S(k, j);
    if (!(pivot > floor)) return false;
    const double lkk = std::sqrt(pivot);
    S(k, k) = lkk;
    for (int i = k + 1; i < n; ++i) {
      double s = S(i, k);
      for (int j = 0; j < k; ++j) s -= S(i, j) * S(k, j);
      S(i, k) = s / lkk;
    }
  }
  return true;
}

int rank(const Mat& A, double tol) {
  if (A.rows == 0 || A.cols == 0) return 0;
  // column-pivoted Householder QR; column norms recomputed each step
  // (n <= 16 makes the extra work irrelevant and avoids norm-update drift).
  Mat R = A;
  const int m = R.rows;
  const int n = R.cols;
  const int kmax = std::min(m, n);
  std::vector<double> diag;
  for (int k = 0; k < kmax; ++k) {
    int best = k;
    double best_norm = -1.0;
    for (int j = k; j < n; ++j) {
      double s = 0.0;
      for (int i = k; i < m; ++i) s += R(i, j) * R(i, j);
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    if (best != k)
      for (int i = 0; i < m; ++i) std::swap(R(i, k), R(i, best));
    double xnorm = std::sqrt(std::max(best_norm, 0.0));
    if (xnorm == 0.0) {
      diag.push_back(0.0);
      continue;
    }
    const double alpha = R(k, k) >= 0 ? -xnorm : xnorm;
    std::vector<double> w(static_cast<size_t>(m), 0.0);
    w[static_cast<size_t>(k)] = R(k, k) - alpha;
    for (int i = k + 1; i < m; ++i) w[static_cast<size_t>(i)] = R(i, k);
    double wnorm2 = 0.0;
    for (int i = k; i < m; ++i) wnorm2 += w[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
    if (wnorm2 > 0.0) {
      for (int j = k; j < n; ++j) {
        double s = 0.0;
        for (int i = k; i < m; ++i) s += w[static_cast<size_t>(i)] * R(i, j);
        s = 2.0 * s / wnorm2;
        for (int i = k; i < m; ++i) R(i, j) -= s * w[static_cast<size_t>(i)];
      }
    }
    R(k, k) = alpha;
    diag.push_back(std::fabs(alpha));
  }
  const double dmax = *std::max_element(diag.begin(), diag.end());
  if (dmax == 0.0) return 0;
  int r = 0;
  for (double d : diag)
    if (d > tol * dmax) ++r;
  return r;
}

int rank_row_equilibrated(const Mat& A, double tol) {
  Mat B = A;
  for (int i = 0; i < B.rows; ++i) {
    double rmax = 0.0;
    for (int j = 0; j < B.cols; ++j) rmax = std::max(rmax, std::fabs(B(i, j)));
    if (rmax == 0.0) continue;
    int e = 0;
    (void)std::frexp(rmax, &e);
    for (int j = 0; j < B.cols; ++j) B(i, j) = std::ldexp(B(i, j), -e);
  }
  return rank(B, tol);
}

double spectral_norm(const Mat& A) {
  if (A.rows == 0 || A.cols == 0) return 0.0;
  const Mat AtA = transpose(A) * A;
  return std::sqrt(std::max(0.0, max_eig_symmetric(AtA)));
}

}  // namespace dissiped
