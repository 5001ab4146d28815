#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dissiped/matrix.hpp"

using namespace dissiped;

namespace {

// ---- independent oracles ----------------------------------------------------

// Characteristic polynomial coefficients by the Faddeev-LeVerrier recursion:
// p(z) = z^n + c[1] z^{n-1} + ... + c[n].
std::vector<double> char_poly(const Mat& A) {
  const int n = A.rows;
  std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  Mat M = Mat::identity(n);
  for (int k = 1; k <= n; ++k) {
    M = A * M;
    double tr = 0.0;
    for (int i = 0; i < n; ++i) tr += M(i, i);
    c[static_cast<size_t>(k)] = -tr / k;
    for (int i = 0; i < n; ++i) M(i, i) += c[static_cast<size_t>(k)];
  }
  return c;
}

// Durand-Kerner simultaneous root iteration; independent of the QR path.
std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<std::complex<double>> z(static_cast<size_t>(n));
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> p(1.0, 0.0);
  for (int i = 0; i < n; ++i) {
    p *= seed;
    z[static_cast<size_t>(i)] = p;
  }
  auto eval = [&](std::complex<double> x) {
    std::complex<double> s(0.0, 0.0);
    for (double ck : c) s = s * x + ck;
    return s;
  };
  for (int it = 0; it < 800; ++it) {
    double move = 0.0;
    for (int i = 0; i < n; ++i) {
      std::complex<double> denom(1.0, 0.0);
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= z[static_cast<size_t>(i)] - z[static_cast<size_t>(j)];
      const std::complex<double> dz = eval(z[static_cast<size_t>(i)]) / denom;
      z[static_cast<size_t>(i)] -= dz;
      move = std::max(move, std::abs(dz));
    }
    if (move < 1e-14) break;
  }
  return z;
}

// Smallest singular value of the real embedding of A - lambda*I; this bounds
// the backward error of an eigenvalue estimate. Uses the augmented symmetric
// matrix [[0, M'],[M, 0]] (eigenvalues +/- sigma_i) so tiny singular values
// are resolved to eps*||M|| instead of sqrt(eps)*||M||.
double eig_backward_residual(const Mat& A, ComplexScalar lambda) {
  const int n = A.rows;
  Mat M(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      M(i, j) = A(i, j);
      M(n + i, n + j) = A(i, j);
    }
    M(i, i) -= lambda.real();
    M(n + i, n + i) -= lambda.real();
    M(i, n + i) = lambda.imag();
    M(n + i, i) = -lambda.imag();
  }
  const int d = 2 * n;
  Mat aug(2 * d, 2 * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      aug(i, d + j) = M(j, i);
      aug(d + i, j) = M(i, j);
    }
  double smin = 1e300;
  for (double e : symmetric_eigenvalues(aug)) smin = std::min(smin, std::fabs(e));
  return smin;
}

Mat random_mat(std::mt19937_64& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Mat m(r, c);
  for (double& e : m.a) e = d(rng);
  return m;
}

// Well-conditioned random square matrix: Q1 * diag * Q2 with condition < 1e6.
Mat random_well_conditioned(std::mt19937_64& rng, int n) {
  auto orthogonalize = [&](Mat m) {
    // Gram-Schmidt columns
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < j; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += m(i, j) * m(i, k);
        for (int i = 0; i < n; ++i) m(i, j) -= s * m(i, k);
      }
      double nn = 0.0;
      for (int i = 0; i < n; ++i) nn += m(i, j) * m(i, j);
      nn = std::sqrt(nn);
      for (int i = 0; i < n; ++i) m(i, j) /= nn;
    }
    return m;
  };
  const Mat q1 = orthogonalize(random_mat(rng, n, n));
  const Mat q2 = orthogonalize(random_mat(rng, n, n));
  std::uniform_real_distribution<double> logs(-2.5, 2.5);  // cond <= 1e5
  Mat d(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = std::pow(10.0, logs(rng));
  return q1 * d * q2;
}

}  // namespace

TEST_CASE("solve_linear identity and diagonal cases") {
  const Mat i2 = Mat::identity(2);
  const ColVec b{3.0, -1.0};
  const ColVec x = solve_linear(i2, b);
  CHECK(x[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(-1.0).epsilon(1e-14));

  const Mat d{{2.0, 0.0}, {0.0, 4.0}};
  const ColVec y = solve_linear(d, ColVec{2.0, 8.0});
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("solve_linear rejects singular systems") {
  const Mat s{{1.0, 2.0}, {2.0, 4.0}};
  CHECK_THROWS_AS(solve_linear(s, ColVec{1.0, 1.0}), SingularMatrix);
  const Mat z(3, 3);
  CHECK_THROWS_AS(solve_linear(z, ColVec{1.0, 1.0, 1.0}), SingularMatrix);
}

TEST_CASE("solve_linear residual property on random well-conditioned systems") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const Mat A = random_well_conditioned(rng, n);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ColVec b(n);
    for (int i = 0; i < n; ++i) b[i] = d(rng);
    const ColVec x = solve_linear(A, b);
    const ColVec r = A * x - b;
    CHECK(norm_inf(r) <= 1e-10 * (1.0 + norm_inf(A) * norm_inf(x)));
  }
}

TEST_CASE("heat exchanger A(0) solve has small residual") {
  // 6x6 system from the built-in heat-exchanger parameters, rhs (Eu*,0,0,0,0,G)'
  const double k = 1.20e-2, g1 = 5.06e-1, g2 = 1.00e-2, E = 360.0, G = 300.0;
  const double ustar = 0.025;
  Mat A(6, 6);
  const double J[3][3] = {{-1, 0, 0}, {1, -1, 0}, {0, 1, -1}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      A(i, j) = -k * (i == j ? 1.0 : 0.0) + g1 * ustar * J[i][j];
      A(3 + i, 3 + j) = -k * (i == j ? 1.0 : 0.0) + g2 * J[j][i];
    }
    A(i, 3 + i) = k;
    A(3 + i, i) = k;
  }
  ColVec rhs(6);
  rhs[0] = E * ustar;
  rhs[5] = G;
  const ColVec x = solve_linear(A, rhs);
  const ColVec r = A * x - rhs;
  CHECK(norm_inf(r) <= 1e-9 * (1.0 + norm_inf(A) * norm_inf(x)));
}

TEST_CASE("eigenvalues of simple matrices") {
  const auto rot = eigenvalues(Mat{{0.0, -1.0}, {1.0, 0.0}});
  REQUIRE(rot.size() == 2);
  CHECK(rot[0].real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rot[0].imag() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(rot[1].imag() == doctest::Approx(1.0).epsilon(1e-12));

  const auto ident = eigenvalues(Mat::identity(3));
  REQUIRE(ident.size() == 3);
  for (const auto& e : ident) {
    CHECK(e.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(e.imag()) <= 1e-12);
  }
}

TEST_CASE("eigenvalues back-checked by smallest singular value") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const Mat A = random_mat(rng, n, n, -2.0, 2.0);
    double anorm = spectral_norm(A);
    for (const auto& lam : eigenvalues(A)) {
      CHECK(eig_backward_residual(A, lam) <= 1e-9 * std::max(anorm, 1e-3));
    }
  }
}

TEST_CASE("Cuk A(0) eigenvalues: negative real parts, char-poly oracle agrees") {
  const double L1 = 10.9e-3, C2 = 22.0e-6, L3 = 10.9e-3, C4 = 22.9e-6;
  const double R = 22.36, E = 12.0, Vd = 25.0;
  const double us = Vd / (Vd + E);
  const Mat P = Mat::diag(ColVec{1.0 / L1, 1.0 / C2, 1.0 / L3, 1.0 / C4});
  const Mat M{{0.0, -(1.0 - us), 0.0, 0.0},
              {1.0 - us, 0.0, us, 0.0},
              {0.0, -us, 0.0, -1.0},
              {0.0, 0.0, 1.0, -1.0 / R}};
  const Mat A0 = M * P;
  const auto eigs = eigenvalues(A0);
  REQUIRE(eigs.size() == 4);
  for (const auto& e : eigs) CHECK(e.real() < 0.0);

  const auto roots = poly_roots(char_poly(A0));
  // greedy matching between QR eigenvalues and polynomial roots
  std::vector<bool> used(roots.size(), false);
  for (const auto& e : eigs) {
    double best = 1e300;
    size_t bi = 0;
    for (size_t i = 0; i < roots.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(roots[i] - std::complex<double>(e.real(), e.imag()));
      if (d < best) {
        best = d;
        bi = i;
      }
    }
    used[bi] = true;
    CHECK(best <= 1e-6 * std::abs(roots[bi]));
  }
}

TEST_CASE("eigenvalues NoConvergence honors the iteration cap") {
  std::mt19937_64 rng(5);
  const Mat A = random_mat(rng, 8, 8);
  CHECK_THROWS_AS(eigenvalues(A, 0), NoConvergence);
}

TEST_CASE("max_eig_symmetric basics") {
  CHECK(max_eig_symmetric(Mat{{-1.0, 0.0}, {0.0, -2.0}}) == doctest::Approx(-1.0));
  CHECK(max_eig_symmetric(Mat(3, 3)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(max_eig_symmetric(Mat{{0.0, 1.0}, {0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("max_eig_symmetric dominates Rayleigh quotients") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    Mat B = random_mat(rng, n, n);
    const Mat S = 0.5 * (B + transpose(B));
    const double lmax = max_eig_symmetric(S);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int s = 0; s < 100; ++s) {
      ColVec v(n);
      for (int i = 0; i < n; ++i) v[i] = d(rng);
      const double vv = dot(v, v);
      if (vv == 0.0) continue;
      CHECK(lmax >= dot(v, S * v) / vv - 1e-10 * std::max(1.0, std::fabs(lmax)));
    }
  }
}

TEST_CASE("sym(P*A_cuk(0)) is negative semidefinite (Rayleigh sampling oracle)") {
  const double L1 = 10.9e-3, C2 = 22.0e-6, L3 = 10.9e-3, C4 = 22.9e-6;
  const double R = 22.36, E = 12.0, Vd = 25.0;
  const double us = Vd / (Vd + E);
  const Mat P = Mat::diag(ColVec{1.0 / L1, 1.0 / C2, 1.0 / L3, 1.0 / C4});
  const Mat M{{0.0, -(1.0 - us), 0.0, 0.0},
              {1.0 - us, 0.0, us, 0.0},
              {0.0, -us, 0.0, -1.0},
              {0.0, 0.0, 1.0, -1.0 / R}};
  const Mat A0 = M * P;
  const Mat S = P * A0 + transpose(A0) * P;
  const double scale = norm_max_abs(S);
  const double lmax = max_eig_symmetric(0.5 * (S + transpose(S)));
  CHECK(lmax <= 1e-12 * scale);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int s = 0; s < 1000; ++s) {
    ColVec v(4);
    for (int i = 0; i < 4; ++i) v[i] = d(rng);
    CHECK(dot(v, S * v) <= 1e-12 * scale * dot(v, v));
  }
}

TEST_CASE("is_positive_definite") {
  CHECK(is_positive_definite(Mat::identity(4)));
  CHECK_FALSE(is_positive_definite(Mat{{1.0, 0.0}, {0.0, 0.0}}));
  const Mat P = Mat::diag(ColVec{1.0 / 10.9e-3, 1.0 / 22.0e-6, 1.0 / 10.9e-3, 1.0 / 22.9e-6});
  CHECK(is_positive_definite(P));
  CHECK_FALSE(is_positive_definite(Mat{{1.0, 2.0}, {2.0, 1.0}}));
}

TEST_CASE("rank basics") {
  CHECK(rank(Mat{{0.0, 1.0}, {1.0, 0.0}}, 1e-9) == 2);
  CHECK(rank(Mat(2, 2), 1e-9) == 0);
  CHECK(rank(Mat{{1.0, 2.0}, {2.0, 4.0}}, 1e-9) == 1);
}

TEST_CASE("rank equals rank of transpose with injected deficiency") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = 2 + static_cast<int>(rng() % 5);
    const int c = 2 + static_cast<int>(rng() % 5);
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::min(r, c)));
    const Mat A = random_mat(rng, r, k) * random_mat(rng, k, c);
    const int ra = rank(A, 1e-9);
    CHECK(ra == rank(transpose(A), 1e-9));
    CHECK(ra <= k);
  }
}

TEST_CASE("eigenvalues of A'A are nonnegative (property)") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const Mat A = random_mat(rng, n, n);
    for (double e : symmetric_eigenvalues(transpose(A) * A)) CHECK(e >= -1e-12);
  }
}

TEST_CASE("spectral_norm") {
  CHECK(spectral_norm(Mat::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_norm(Mat{{2.0, 0.0}, {0.0, -5.0}}) == doctest::Approx(5.0).epsilon(1e-12));
  Mat c(1, 4);
  c(0, 1) = 1.0;
  CHECK(spectral_norm(c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("determinant tracks LU and scaling") {
  CHECK(determinant(Mat::identity(5)) == doctest::Approx(1.0));
  CHECK(determinant(Mat{{0.0, 1.0}, {1.0, 0.0}}) == doctest::Approx(-1.0));
  CHECK(determinant(Mat{{1.0, 2.0}, {2.0, 4.0}}) == doctest::Approx(0.0));
  // scale disparity: det(diag(1e-8, 1e8)) == 1
  CHECK(determinant(Mat{{1e-8, 0.0}, {0.0, 1e8}}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("construction rejects non-finite entries") {
  CHECK_THROWS_AS(ColVec{std::numeric_limits<double>::quiet_NaN()}, std::invalid_argument);
  CHECK_THROWS_AS((Mat{{1.0, std::numeric_limits<double>::infinity()}, {0.0, 1.0}}),
                  std::invalid_argument);
}
