#include "dissiped/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace dissiped {

namespace {

Mat sym_dissipation(const InputAffineSystem& sys, const ColVec& u) {
  const Mat A = eval_A(sys, u);
  const Mat S = sys.P * A + transpose(A) * sys.P;
  return 0.5 * (S + transpose(S));
}

}  // namespace

CompactBox CompactBox::cube(int n, double half_width) {
  CompactBox b;
  b.iv.assign(static_cast<size_t>(n), Interval{-half_width, half_width});
  return b;
}

std::vector<ColVec> CompactBox::vertices() const {
  const int n = dim();
  std::vector<ColVec> out;
  out.reserve(static_cast<size_t>(1) << n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    ColVec v(n);
    for (int i = 0; i < n; ++i)
      v[i] = (mask >> i) & 1u ? iv[static_cast<size_t>(i)].hi : iv[static_cast<size_t>(i)].lo;
    out.push_back(std::move(v));
  }
  return out;
}

DissipativityResult check_dissipativity(const InputAffineSystem& sys, int u_samples,
                                        double tol) {
  if (u_samples < 2) throw std::invalid_argument("check_dissipativity: u_samples >= 2");
  if (tol < 0.0) throw std::invalid_argument("check_dissipativity: tol >= 0");
  DissipativityResult res;
  res.worst_eig = -std::numeric_limits<double>::infinity();
  res.vertex_worst_eig = -std::numeric_limits<double>::infinity();

  auto visit = [&](const ColVec& u, bool vertex) {
    const double lmax = max_eig_symmetric(sym_dissipation(sys, u));
    if (lmax > res.worst_eig) {
      res.worst_eig = lmax;
      res.worst_input = u;
    }
    if (vertex) res.vertex_worst_eig = std::max(res.vertex_worst_eig, lmax);
  };

  // tensor grid including both endpoints per channel
  const int m = sys.m;
  std::vector<int> idx(static_cast<size_t>(m), 0);
  while (true) {
    ColVec u(m);
    bool vertex = true;
    for (int k = 0; k < m; ++k) {
      const Interval& away = sys.input_box[static_cast<size_t>(k)];
      const int i = idx[static_cast<size_t>(k)];
      u[k] = away.lo + (away.hi - away.lo) * i / (u_samples - 1);
      if (i != 0 && i != u_samples - 1) vertex = false;
    }
    visit(u, vertex);
    int k = 0;
    while (k < m && ++idx[static_cast<size_t>(k)] == u_samples) {
      idx[static_cast<size_t>(k)] = 0;
      ++k;
    }
    if (k == m) break;
  }
  res.pass = res.worst_eig <= tol;
  return res;
}

DetectabilityResult check_detectability(const Mat& C, const Mat& A0, double tol) {
  if (C.cols != A0.rows || !A0.square())
    throw DimensionMismatch("check_detectability: dims inconsistent");
  const int n = A0.rows;
  const int p = C.rows;
  DetectabilityResult res;
  res.pass = true;
  const double imag_tol = 1e-12 * std::max(norm_max_abs(A0), 1.0);

  for (const ComplexScalar& lam : eigenvalues(A0)) {
    if (lam.real() < -tol) continue;
    int rk = 0;
    int full = 0;
    if (std::fabs(lam.imag()) <= imag_tol) {
      Mat S(n + p, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S(i, j) = A0(i, j) - (i == j ? lam.real() : 0.0);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < n; ++j) S(n + i, j) = C(i, j);
      rk = rank_row_equilibrated(S, 1e-9);
      full = n;
    } else {
      // real embedding of the complex stack [A0 - lambda I; C]
      Mat S(2 * n + 2 * p, 2 * n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          S(i, j) = A0(i, j);
          S(n + i, n + j) = A0(i, j);
        }
        S(i, i) -= lam.real();
        S(n + i, n + i) -= lam.real();
        S(i, n + i) = lam.imag();
        S(n + i, i) = -lam.imag();
      }
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < n; ++j) {
          S(2 * n + i, j) = C(i, j);
          S(2 * n + p + i, n + j) = C(i, j);
        }
      rk = rank_row_equilibrated(S, 1e-9);
      full = 2 * n;
    }
    if (rk != full) {
      res.pass = false;
      res.offending_eigenvalue = lam;
      break;
    }
  }
  return res;
}

Mat observability_matrix(const Mat& C, const Mat& A) {
  if (C.cols != A.rows || !A.square())
    throw DimensionMismatch("observability_matrix: dims inconsistent");
  const int n = A.rows;
  const int p = C.rows;
  Mat O(n * p, n);
  Mat block = C;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < n; ++j) O(k * p + i, j) = block(i, j);
    if (k + 1 < n) block = block * A;
  }
  return O;
}

namespace {

double scan_value(const InputAffineSystem& sys, double u, bool square) {
  ColVec uv(1);
  uv[0] = u;
  const Mat O = observability_matrix(sys.C, eval_A(sys, uv));
  if (square) return determinant(O);
  const Mat OtO = transpose(O) * O;
  return std::sqrt(std::max(0.0, min_eig_symmetric(OtO)));
}

}  // namespace

SingularScanResult scan_singular_inputs(const InputAffineSystem& sys, int grid) {
  if (sys.m != 1)
    throw DimensionMismatch("scan_singular_inputs: scalar-input systems only");
  if (grid < 10) throw std::invalid_argument("scan_singular_inputs: grid >= 10");
  const Interval box = sys.input_box[0];
  SingularScanResult res;
  res.used_determinant = (sys.p * sys.n == sys.n);

  std::vector<double> us(static_cast<size_t>(grid));
  for (int i = 0; i < grid; ++i)
    us[static_cast<size_t>(i)] = box.lo + (box.hi - box.lo) * i / (grid - 1);

  double vmax = 0.0;
  for (double u : us) {
    SingularScanPoint pt;
    pt.u = ColVec(1);
    pt.u[0] = u;
    pt.value = scan_value(sys, u, res.used_determinant);
    vmax = std::max(vmax, std::fabs(pt.value));
    res.points.push_back(std::move(pt));
  }
  if (vmax == 0.0) return res;  // identically singular; nothing to refine

  const double thresh = 1e-9 * vmax;
  auto value_at = [&](double u) { return scan_value(sys, u, res.used_determinant); };
  std::vector<double> located_list;
  auto add_candidate = [&](double u) {
    const double spacing = (box.hi - box.lo) / (grid - 1);
    for (double prev : located_list)
      if (std::fabs(prev - u) <= spacing) return;
    located_list.push_back(u);
  };
  auto bisect = [&](double a, double b, double fa, double fb) {
    while (b - a > 1e-12) {
      const double mid = 0.5 * (a + b);
      const double fm = value_at(mid);
      if (fm == 0.0) return mid;
      if ((fa < 0.0) != (fm < 0.0)) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
    }
    (void)fb;
    return 0.5 * (a + b);
  };

  // For a root of multiplicity q >= 2 the indicator is O(d^q) flat, so the
  // bisection result is limited to the q-th root of the evaluation noise.
  // The indicator keeps ~1e-6 relative accuracy away from the root, so one
  // secant step on sign(f)*|f|^{1/q} from points a grid-spacing away
  // recovers the root to that relative accuracy times the spacing.
  auto polish_flat_root = [&](double r0) {
    const double d =
        std::min({(box.hi - box.lo) / (grid - 1), r0 - box.lo, box.hi - r0});
    if (!(d > 0.0)) return r0;
    const double f1 = std::fabs(value_at(r0 - d));
    const double f2 = std::fabs(value_at(r0 - 0.5 * d));
    if (f1 == 0.0 || f2 == 0.0) return r0;
    const int q =
        std::clamp(static_cast<int>(std::lround(std::log(f1 / f2) / std::log(2.0))), 1, 9);
    if (q < 2) return r0;
    auto groot = [&](double u) {
      const double f = value_at(u);
      return std::copysign(std::pow(std::fabs(f), 1.0 / q), f);
    };
    const double ga = groot(r0 - d);
    const double gb = groot(r0 + d);
    if (ga == gb) return r0;
    const double sec = (r0 - d) - ga * (2.0 * d) / (gb - ga);
    return std::clamp(sec, r0 - d, r0 + d);
  };

  // group consecutive near-zero grid points into clusters, refine each
  int i = 0;
  while (i < grid) {
    if (std::fabs(res.points[static_cast<size_t>(i)].value) >= thresh) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < grid && std::fabs(res.points[static_cast<size_t>(j + 1)].value) < thresh)
      ++j;
    double a = us[static_cast<size_t>(std::max(0, i - 1))];
    double b = us[static_cast<size_t>(std::min(grid - 1, j + 1))];
    const double fa = value_at(a);
    const double fb = value_at(b);
    double located;
    if (fa == 0.0) {
      located = a;
    } else if (fb == 0.0) {
      located = b;
    } else if ((fa < 0.0) != (fb < 0.0)) {
      located = polish_flat_root(bisect(a, b, fa, fb));
    } else {
      // even-order root: golden-section minimization of |value|
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = b - gr * (b - a);
      double x2 = a + gr * (b - a);
      double f1 = std::fabs(value_at(x1));
      double f2 = std::fabs(value_at(x2));
      while (b - a > 1e-12) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = std::fabs(value_at(x1));
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = std::fabs(value_at(x2));
        }
      }
      located = 0.5 * (a + b);
    }
    add_candidate(std::clamp(located, box.lo, box.hi));
    i = j + 1;
  }

  // sign changes between adjacent grid points flag odd-order roots whose
  // magnitude never dips under the near-zero threshold on the grid
  for (int k = 0; k + 1 < grid; ++k) {
    const double va = res.points[static_cast<size_t>(k)].value;
    const double vb = res.points[static_cast<size_t>(k + 1)].value;
    if (va == 0.0 || vb == 0.0) continue;  // handled by the cluster path
    if ((va < 0.0) == (vb < 0.0)) continue;
    add_candidate(polish_flat_root(
        bisect(us[static_cast<size_t>(k)], us[static_cast<size_t>(k + 1)], va, vb)));
  }

  std::sort(located_list.begin(), located_list.end());
  for (double u : located_list) {
    ColVec c(1);
    c[0] = u;
    res.candidates.push_back(std::move(c));
  }
  return res;
}

Alpha0Breakdown estimate_alpha0(const InputAffineSystem& shifted, const FeedbackLaw& law,
                                const LyapunovSpec& W, const CompactBox& K1,
                                const CompactBox& K2, int samples, std::uint64_t seed) {
  if (K1.dim() != shifted.n || K2.dim() != shifted.n)
    throw DimensionMismatch("estimate_alpha0: box dims must equal n");
  W.validate();
  const int n = shifted.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Alpha0Breakdown out;

  // R = mu_max(P) * sup_{K2} e'Pe; the quadratic is convex, so vertices are
  // exact, random interior samples are kept as a cross-check.
  const double mu_max = max_eig_symmetric(shifted.P);
  double supV = 0.0;
  for (const ColVec& v : K2.vertices()) supV = std::max(supV, dot(v, shifted.P * v));
  for (int s = 0; s < samples; ++s) {
    ColVec v(n);
    for (int i = 0; i < n; ++i) {
      const Interval& iv = K2.iv[static_cast<size_t>(i)];
      v[i] = iv.lo + (iv.hi - iv.lo) * unit(rng);
    }
    supV = std::max(supV, dot(v, shifted.P * v));
  }
  out.R = mu_max * supV;

  // rho: smallest sublevel of W containing K1 (vertex max of the convex W),
  // inflated by 5%.
  double supW = 0.0;
  for (const ColVec& v : K1.vertices()) supW = std::max(supW, W.value(v));
  out.rho = 1.05 * supW;
  if (!(out.rho > 0.0))
    throw NotStrictLyapunov("estimate_alpha0: K1 has empty interior (rho = 0)");

  // Sample the level set {W = rho}: axis directions first (deterministic),
  // then seeded random directions scaled onto the level set.
  auto on_level_set = [&](ColVec dir) {
    const double q = W.value(dir);
    const double t = std::sqrt(out.rho / q);
    return t * dir;
  };
  std::vector<ColVec> pts;
  for (int i = 0; i < n; ++i) {
    ColVec e(n);
    e[i] = 1.0;
    pts.push_back(on_level_set(e));
    e[i] = -1.0;
    pts.push_back(on_level_set(e));
  }
  for (int s = 0; s < samples; ++s) {
    ColVec d(n);
    double nn = 0.0;
    for (int i = 0; i < n; ++i) {
      d[i] = gauss(rng);
      nn += d[i] * d[i];
    }
    if (nn == 0.0) continue;
    pts.push_back(on_level_set(d));
  }

  double M1 = -std::numeric_limits<double>::infinity();
  double sup_grad = 0.0;
  for (const ColVec& x : pts) {
    const ColVec u = eval_feedback(law, x);
    const ColVec f = eval_A(shifted, u) * x + eval_B(shifted, u);
    const ColVec g = W.gradient(x);
    M1 = std::max(M1, dot(g, f));
    sup_grad = std::max(sup_grad, norm2(g));
  }
  out.M1 = M1;
  out.M2 = 1.0 + sup_grad;
  if (M1 >= -1e-12)
    throw NotStrictLyapunov(
        "estimate_alpha0: sampled sup L_f W >= -1e-12; W is not strict on the level set");

  out.alpha0 = -M1 / (out.R * out.M2 * spectral_norm(inverse(shifted.P)) *
                      spectral_norm(shifted.C) * spectral_norm(shifted.C));
  return out;
}

double adaptive_gain(const LyapunovSpec& W, const ColVec& xhat, const ColVec& y_err,
                     const Mat& C, const Mat& P) {
  if (C.rows != y_err.dim() || C.cols != xhat.dim())
    throw DimensionMismatch("adaptive_gain: dims inconsistent");
  const ColVec cty = transpose(C) * y_err;
  const ColVec pinv_cty = solve_linear(P, cty);
  const double wv = std::max(W.value(xhat), 1.0);
  const double g = norm2(W.gradient(xhat));
  return wv / (2.0 * (1.0 + g) * (1.0 + norm2(pinv_cty)));
}

}  // namespace dissiped
