#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dissiped/analysis.hpp"
#include "dissiped/scenarios.hpp"

using namespace dissiped;

namespace {

InputAffineSystem scalar_decay() {
  InputAffineSystem s;
  s.n = 1;
  s.m = 1;
  s.p = 1;
  s.A0 = Mat{{-1.0}};
  s.A_coeff = {Mat{{0.0}}};
  s.B0 = ColVec(1);
  s.B_coeff = {ColVec{0.0}};
  s.C = Mat{{1.0}};
  s.P = Mat{{1.0}};
  s.input_box = {Interval{-1.0, 1.0}};
  return s;
}

}  // namespace

TEST_CASE("check_dissipativity pass and fail cases") {
  const ScenarioBundle ho = build_harmonic_oscillator();
  const DissipativityResult ok = check_dissipativity(ho.shifted, 17, 1e-9);
  CHECK(ok.pass);
  CHECK(ok.worst_eig == doctest::Approx(0.0));

  const ScenarioBundle he = build_heat_exchanger();
  const DissipativityResult heok = check_dissipativity(he.shifted, 17, 1e-9);
  CHECK(heok.pass);
  CHECK(heok.worst_eig < 0.0);

  // antistable: A(u) = I with P = diag(1, 2) -> worst eig = 2 max_eig(P)
  InputAffineSystem bad = scalar_decay();
  bad.n = 2;
  bad.A0 = Mat::identity(2);
  bad.A_coeff = {Mat(2, 2)};
  bad.B0 = ColVec(2);
  bad.B_coeff = {ColVec(2)};
  bad.C = Mat(1, 2);
  bad.C(0, 0) = 1.0;
  bad.P = Mat{{1.0, 0.0}, {0.0, 2.0}};
  const DissipativityResult fail = check_dissipativity(bad, 5, 1e-9);
  CHECK_FALSE(fail.pass);
  CHECK(fail.worst_eig == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("check_dissipativity spans multi-channel boxes") {
  // scalar state, two input channels: sym part 2(-1 + 0.8 u1 + 0.5 u2)
  InputAffineSystem s;
  s.n = 1;
  s.m = 2;
  s.p = 1;
  s.A0 = Mat{{-1.0}};
  s.A_coeff = {Mat{{0.8}}, Mat{{0.5}}};
  s.B0 = ColVec(1);
  s.B_coeff = {ColVec{0.0}, ColVec{0.0}};
  s.C = Mat{{1.0}};
  s.P = Mat{{1.0}};
  s.input_box = {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}};
  const DissipativityResult r = check_dissipativity(s, 5, 1e-9);
  CHECK_FALSE(r.pass);
  CHECK(r.worst_eig == doctest::Approx(2.0 * (-1.0 + 0.8 + 0.5)).epsilon(1e-12));
  CHECK(r.worst_input[0] == doctest::Approx(1.0));
  CHECK(r.worst_input[1] == doctest::Approx(1.0));
  CHECK(r.vertex_worst_eig == doctest::Approx(r.worst_eig));
}

TEST_CASE("check_detectability basic cases") {
  const ScenarioBundle ho = build_harmonic_oscillator();
  CHECK(check_detectability(ho.shifted.C, ho.shifted.A0).pass);

  // C = I is trivially detectable for any A0
  const Mat A{{3.0, 1.0}, {0.0, -2.0}};
  CHECK(check_detectability(Mat::identity(2), A).pass);

  // unstable unobservable mode -> fail with the offending eigenvalue
  const Mat A2{{1.0, 0.0}, {0.0, -1.0}};
  Mat C2(1, 2);
  C2(0, 1) = 1.0;
  const DetectabilityResult bad = check_detectability(C2, A2);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.offending_eigenvalue.has_value());
  CHECK(bad.offending_eigenvalue->real() == doctest::Approx(1.0));

  // marginally stable complex pair invisible from a zero output map
  const Mat rot{{0.0, -1.0}, {1.0, 0.0}};
  const DetectabilityResult badc = check_detectability(Mat(1, 2), rot);
  CHECK_FALSE(badc.pass);
  REQUIRE(badc.offending_eigenvalue.has_value());
  CHECK(std::fabs(badc.offending_eigenvalue->imag()) == doctest::Approx(1.0));
}

TEST_CASE("detectability is similarity invariant") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng() % 4);
    Mat A(n, n);
    for (double& e : A.a) e = d(rng);
    Mat C(1, n);
    for (double& e : C.a) e = d(rng);
    // well-conditioned T: identity plus a small random perturbation
    Mat T = Mat::identity(n);
    for (double& e : T.a) e += 0.2 * d(rng);
    const Mat Tinv = inverse(T);
    const bool base = check_detectability(C, A).pass;
    const bool sim = check_detectability(C * Tinv, T * A * Tinv).pass;
    CHECK(base == sim);
  }
}

TEST_CASE("observability_matrix layouts") {
  const ScenarioBundle ho = build_harmonic_oscillator();
  const Mat O = observability_matrix(ho.shifted.C, eval_A(ho.shifted, ColVec{0.0}));
  CHECK(O.rows == 2);
  CHECK(O(0, 0) == 0.0);
  CHECK(O(0, 1) == 1.0);
  CHECK(O(1, 0) == 1.0);
  CHECK(O(1, 1) == 0.0);
  CHECK(rank(O, 1e-9) == 2);

  // C = I stacks I, A, ..., A^{n-1}
  const Mat A{{1.0, 2.0}, {3.0, 4.0}};
  const Mat OI = observability_matrix(Mat::identity(2), A);
  CHECK(OI.rows == 4);
  CHECK(OI(2, 0) == 1.0);
  CHECK(OI(3, 1) == 4.0);

  // Cuk at physical u = 1 is rank deficient
  const ScenarioBundle cuk = build_cuk();
  const Mat O1 = observability_matrix(cuk.physical.C, eval_A(cuk.physical, ColVec{1.0}));
  CHECK(rank_row_equilibrated(O1, 1e-9) < 4);
}

TEST_CASE("scan_singular_inputs on the three scenarios") {
  // harmonic oscillator: det of the 2x2 stack is -(1+u), no zero in the box
  const ScenarioBundle ho = build_harmonic_oscillator();
  const SingularScanResult hs = scan_singular_inputs(ho.shifted, 50);
  CHECK(hs.used_determinant);
  CHECK(hs.candidates.empty());
  for (const SingularScanPoint& pt : hs.points)
    CHECK(pt.value == doctest::Approx(-(1.0 + pt.u[0])).epsilon(1e-12));

  // heat exchanger: interior root of the cubic factor
  const HeatExchangerParams hp;
  const ScenarioBundle he = build_heat_exchanger(hp);
  const SingularScanResult ss = scan_singular_inputs(he.shifted, 200);
  const double expected = hp.k * hp.k / (hp.gamma1 * hp.gamma2) - hp.u_star;
  REQUIRE_FALSE(ss.candidates.empty());
  double best = 1e300;
  for (const ColVec& c : ss.candidates) best = std::min(best, std::fabs(c[0] - expected));
  CHECK(best <= 1e-9);

  // Cuk: both box endpoints (physical u = 0 and u = 1)
  const ScenarioBundle cuk = build_cuk();
  const double us = cuk.equilibrium.u_star[0];
  const SingularScanResult cs = scan_singular_inputs(cuk.shifted, 200);
  REQUIRE(cs.candidates.size() >= 2);
  double b0 = 1e300, b1 = 1e300;
  for (const ColVec& c : cs.candidates) {
    b0 = std::min(b0, std::fabs(c[0] - (-us)));
    b1 = std::min(b1, std::fabs(c[0] - (1.0 - us)));
  }
  CHECK(b0 <= 1e-3);
  CHECK(b1 <= 1e-3);
}

TEST_CASE("estimate_alpha0 closed form on the scalar system") {
  const InputAffineSystem s = scalar_decay();
  const FeedbackLaw law = FeedbackLaw::constant(ColVec(1));
  const LyapunovSpec W{Mat{{1.0}}, 1.0};
  const CompactBox K1 = CompactBox::cube(1, 1.0);
  const CompactBox K2 = CompactBox::cube(1, 1.0);
  const Alpha0Breakdown a = estimate_alpha0(s, law, W, K1, K2, 500, 0);
  const double rho = 1.05;
  CHECK(a.rho == doctest::Approx(rho).epsilon(1e-12));
  CHECK(a.M1 == doctest::Approx(-2.0 * rho).epsilon(1e-12));
  CHECK(a.M2 == doctest::Approx(1.0 + 2.0 * std::sqrt(rho)).epsilon(1e-12));
  CHECK(a.R == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.alpha0 ==
        doctest::Approx(2.0 * rho / (1.0 + 2.0 * std::sqrt(rho))).epsilon(1e-12));

  // doubling K2 quarters R, so alpha0 at least halves
  const Alpha0Breakdown a2 = estimate_alpha0(s, law, W, K1, CompactBox::cube(1, 2.0), 500, 0);
  CHECK(a2.alpha0 <= 0.5 * a.alpha0);
}

TEST_CASE("estimate_alpha0 flags non-strict Lyapunov candidates") {
  // harmonic oscillator with W = |x|^2: L_f W = -2 x1^2 vanishes on the level
  // set at the axis point x1 = 0, which the sampler always includes
  const ScenarioBundle ho = build_harmonic_oscillator();
  const CompactBox K = CompactBox::cube(2, 1.0);
  CHECK_THROWS_AS(
      estimate_alpha0(ho.shifted, ho.law, LyapunovSpec{Mat::identity(2), 1.0}, K, K, 200, 0),
      NotStrictLyapunov);
}

TEST_CASE("adaptive_gain formula and bounds") {
  const ScenarioBundle ho = build_harmonic_oscillator();
  const LyapunovSpec W{Mat::identity(2), 1.0};
  // at the origin: max{0,1} / (2 * 1 * 1) = 1/2
  CHECK(adaptive_gain(W, ColVec(2), ColVec(1), ho.shifted.C, ho.shifted.P) ==
        doctest::Approx(0.5).epsilon(1e-15));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  const Mat Pinv = inverse(ho.shifted.P);
  for (int t = 0; t < 1000; ++t) {
    ColVec xhat{d(rng), d(rng)};
    ColVec y{d(rng)};
    const double a = adaptive_gain(W, xhat, y, ho.shifted.C, ho.shifted.P);
    CHECK(a > 0.0);
    // correction magnitude bound
    const ColVec corr = a * (Pinv * (transpose(ho.shifted.C) * y));
    const double bound = std::max(W.value(xhat), 1.0) / (2.0 * (1.0 + norm2(W.gradient(xhat))));
    CHECK(norm2(corr) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("adaptive_gain is continuous under small perturbations") {
  const ScenarioBundle ho = build_harmonic_oscillator();
  const LyapunovSpec W{Mat::identity(2), 1.0};
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    ColVec xhat{d(rng), d(rng)};
    ColVec y{d(rng)};
    const double a0 = adaptive_gain(W, xhat, y, ho.shifted.C, ho.shifted.P);
    for (double h : {1e-6, 1e-8}) {
      ColVec xp = xhat;
      xp[0] += h;
      ColVec yp = y;
      yp[0] += h;
      const double a1 = adaptive_gain(W, xp, yp, ho.shifted.C, ho.shifted.P);
      CHECK(std::fabs(a1 - a0) <= 100.0 * h);
    }
  }
}

TEST_CASE("CompactBox vertices") {
  const CompactBox b = CompactBox::cube(3, 2.0);
  const auto vs = b.vertices();
  CHECK(vs.size() == 8);
  for (const ColVec& v : vs)
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(v[i]) == doctest::Approx(2.0));
}

TEST_CASE("dissipativity vertex exactness for input-affine systems") {
  for (const std::string& name : scenario_names()) {
    const ScenarioBundle b = build_scenario(name);
    const DissipativityResult r = check_dissipativity(b.shifted, 25, 1e-9);
    CHECK(r.worst_eig <= r.vertex_worst_eig + 1e-12 * std::max(1.0, std::fabs(r.worst_eig)));
  }
}
