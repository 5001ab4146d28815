#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dissiped/scenarios.hpp"
#include "dissiped/serialize.hpp"

using namespace dissiped;

TEST_CASE("harmonic oscillator bundle") {
  const ScenarioBundle b = build_harmonic_oscillator();
  const Mat O = observability_matrix(b.shifted.C, b.shifted.A0);
  CHECK(O(0, 0) == 0.0);
  CHECK(O(0, 1) == 1.0);
  CHECK(O(1, 0) == 1.0);
  CHECK(O(1, 1) == 0.0);
  CHECK(rank(O, 1e-9) == 2);

  const DissipativityResult d = check_dissipativity(b.shifted, 9, 1e-9);
  CHECK(d.pass);
  CHECK(d.worst_eig == doctest::Approx(0.0));

  const ClosedLoopSystem cls = b.closed_loop(GainPolicy::constant(1.0));
  CHECK(norm_inf(closed_loop_field(cls, ColVec(4))) == 0.0);
}

TEST_CASE("every bundle passes its standing invariants") {
  for (const std::string& name : scenario_names()) {
    CAPTURE(name);
    const ScenarioBundle b = build_scenario(name);
    CHECK(b.equilibrium.residual <= 1e-9);
    CHECK(check_dissipativity(b.shifted, 17, 1e-9).pass);
    CHECK(check_detectability(b.shifted.C, b.shifted.A0).pass);
    CHECK(is_positive_definite(b.shifted.P));
  }
}

TEST_CASE("Cuk bundle values") {
  const CukParams p;
  const ScenarioBundle b = build_cuk(p);
  CHECK(b.equilibrium.u_star[0] == doctest::Approx(25.0 / 37.0).epsilon(1e-15));
  CHECK(b.equilibrium.x_star[3] / p.C4 == doctest::Approx(-p.Vd).epsilon(1e-12));

  // z0: x(0) = 0 and xhat(0) = x* in shifted coordinates
  for (int i = 0; i < 4; ++i) {
    CHECK(b.z0[i] == doctest::Approx(-b.equilibrium.x_star[i]));
    CHECK(b.z0[4 + i] == 0.0);
  }
  CHECK(b.default_alphas == std::vector<double>{1.0, 10.0, 100.0});
  CHECK(b.default_sim.t_final == doctest::Approx(0.5));
  CHECK(b.default_sim.h == doctest::Approx(1e-6));
  CHECK(b.output_state == 4);
  CHECK(b.output_scale == doctest::Approx(1.0 / p.C4));
}

TEST_CASE("heat exchanger bundle values") {
  const HeatExchangerParams p;
  const ScenarioBundle b = build_heat_exchanger(p);
  CHECK(b.equilibrium.u_star[0] == doctest::Approx(0.5 * p.u_M).epsilon(1e-15));

  // the singular input lies strictly inside the shifted box
  const double sing = p.k * p.k / (p.gamma1 * p.gamma2) - p.u_star;
  CHECK(sing > -p.u_star);
  CHECK(sing < p.u_M - p.u_star);
  CHECK(sing == doctest::Approx(3.4585e-3).epsilon(1e-4));

  // sym A(0) negative definite at the operating input
  const Mat A0 = b.shifted.A0;
  CHECK(max_eig_symmetric(0.5 * (A0 + transpose(A0))) < 0.0);

  // x(0) is the steady state for u = 0.17 u_M
  ColVec u0(1);
  u0[0] = 0.17 * p.u_M;
  const Equilibrium init = compute_equilibrium(b.physical, u0);
  for (int i = 0; i < 6; ++i)
    CHECK(b.z0[i] == doctest::Approx(init.x_star[i] - b.equilibrium.x_star[i]).epsilon(1e-12));

  CHECK(b.default_alphas == std::vector<double>{1e-3, 2e-2, 1.0});
}

TEST_CASE("heat exchanger rejects the unobservable operating input") {
  HeatExchangerParams p;
  p.u_star = p.k * p.k / (p.gamma1 * p.gamma2);
  CHECK_THROWS_AS(build_heat_exchanger(p), DetectabilityViolated);
  // and the observability matrix at that input is genuinely rank deficient
  HeatExchangerParams q;
  const ScenarioBundle b = build_heat_exchanger(q);
  ColVec u(1);
  u[0] = q.k * q.k / (q.gamma1 * q.gamma2);
  const Mat O = observability_matrix(b.physical.C, eval_A(b.physical, u));
  CHECK(rank_row_equilibrated(O, 1e-9) < 6);
}

TEST_CASE("bundles are pure functions of their parameters") {
  const std::string a = to_json(build_cuk()).dump();
  const std::string b = to_json(build_cuk()).dump();
  CHECK(a == b);
  const std::string c = to_json(build_heat_exchanger()).dump();
  const std::string d = to_json(build_heat_exchanger()).dump();
  CHECK(c == d);
}

TEST_CASE("analyze_bundle composes the full report") {
  const AnalysisReport rep = analyze_bundle(build_cuk());
  CHECK(rep.dissipativity.pass);
  CHECK(rep.detectability.pass);
  CHECK(rep.observability.rank == 4);
  CHECK(rep.observability.det.has_value());
  CHECK(rep.observability.singular_inputs_found.size() == 2);
  bool has_bslope_note = false;
  for (const std::string& n : rep.notes)
    has_bslope_note = has_bslope_note || n.find("B-slope") != std::string::npos;
  CHECK(has_bslope_note);

  AnalyzeOptions opt;
  opt.with_alpha0 = true;
  const AnalysisReport hrep = analyze_bundle(build_heat_exchanger(), opt);
  REQUIRE(hrep.alpha0.has_value());
  CHECK(*hrep.alpha0 > 0.0);
}

TEST_CASE("invalid scenario name") {
  CHECK_THROWS_AS(build_scenario("nope"), std::invalid_argument);
}
