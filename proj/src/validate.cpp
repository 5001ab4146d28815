#include "dissiped/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "dissiped/analysis.hpp"
#include "dissiped/scenarios.hpp"
#include "dissiped/sim.hpp"

namespace dissiped {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double mean_over_window(const std::vector<double>& times, const std::vector<double>& vals,
                        double t_lo, double t_hi) {
  double s = 0.0;
  long cnt = 0;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_lo && times[i] <= t_hi) {
      s += vals[i];
      ++cnt;
    }
  }
  return cnt ? s / static_cast<double>(cnt) : 0.0;
}

// criterion 1: V(eps) nonincreasing along every scenario x default alpha
CheckResult check_lyapunov_decay() {
  CheckResult r{1, "lyapunov-decay", true, ""};
  double worst = -1e300;
  for (const std::string& name : scenario_names()) {
    const ScenarioBundle b = build_scenario(name);
    for (double alpha : b.default_alphas) {
      const Trajectory traj =
          integrate(b.closed_loop(GainPolicy::constant(alpha)), b.z0, b.default_sim);
      const double tol = 1e-8 * traj.v_series.front();
      for (size_t i = 1; i < traj.size(); ++i) {
        const double up = traj.v_series[i] - traj.v_series[i - 1];
        worst = std::max(worst, up / std::max(traj.v_series.front(), 1e-300));
        if (up > tol) {
          r.pass = false;
          r.detail = name + fmt(": V increased by %.3g at sample %.0f (alpha %.3g)", up,
                                static_cast<double>(i), alpha);
          return r;
        }
      }
    }
  }
  r.detail = fmt("worst per-step V increase %.3g of V(0) (tolerance 1e-8)", worst);
  return r;
}

// criterion 2: eps-block A0 - alpha P^{-1}C'C Hurwitz, margin reported
CheckResult check_error_block_hurwitz() {
  CheckResult r{2, "error-block-hurwitz", true, ""};
  double worst = -1e300;
  std::string worst_at;
  for (const std::string& name : scenario_names()) {
    const ScenarioBundle b = build_scenario(name);
    for (double alpha : b.default_alphas) {
      const ClosedLoopSystem cls = b.closed_loop(GainPolicy::constant(alpha));
      double max_re = -1e300;
      for (const ComplexScalar& e : eigenvalues(linearized_error_block(cls, alpha)))
        max_re = std::max(max_re, e.real());
      if (max_re > worst) {
        worst = max_re;
        worst_at = name + fmt(" alpha=%.3g", alpha);
      }
      if (!(max_re < 0.0)) {
        r.pass = false;
        r.detail = name + fmt(": max Re = %.6g at alpha %.3g", max_re, alpha);
        return r;
      }
    }
  }
  r.detail = "smallest margin: max Re = " + fmt("%.6g", worst) + " (" + worst_at + ")";
  return r;
}

// criterion 3: heat exchanger observability determinant and singular input
CheckResult check_he_observability_det() {
  CheckResult r{3, "heat-exchanger-observability-det", true, ""};
  const HeatExchangerParams p;
  const ScenarioBundle b = build_heat_exchanger(p);
  // closed form for det[C; CA; ...; CA^5]: reversing the 6 rows of the stack
  // flips the determinant sign, hence the leading minus.
  auto closed_form = [&](double ubar) {
    const double u = p.u_star + ubar;
    const double base = p.k * p.k - p.gamma1 * p.gamma2 * u;
    return -(std::pow(p.k, 3) * std::pow(p.gamma2, 6) * std::pow(base, 3));
  };
  const double lo = -p.u_star, hi = p.u_M - p.u_star;
  double worst_rel = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double ubar = lo + (i + 0.5) * (hi - lo) / 200.0;  // interior grid
    ColVec u(1);
    u[0] = ubar;
    const double det = determinant(observability_matrix(b.shifted.C, eval_A(b.shifted, u)));
    const double ref = closed_form(ubar);
    worst_rel = std::max(worst_rel, std::fabs(det - ref) / std::fabs(ref));
  }
  if (worst_rel > 1e-6) {
    r.pass = false;
    r.detail = fmt("grid determinant mismatch: worst rel err %.3g > 1e-6", worst_rel);
    return r;
  }
  const double expected = p.k * p.k / (p.gamma1 * p.gamma2) - p.u_star;
  const SingularScanResult scan = scan_singular_inputs(b.shifted, 200);
  double best = 1e300;
  for (const ColVec& c : scan.candidates) best = std::min(best, std::fabs(c[0] - expected));
  if (best > 1e-9) {
    r.pass = false;
    r.detail = fmt("singular input located %.3g away from k^2/(g1 g2) - u*", best);
    return r;
  }
  r.detail = fmt("worst det rel err %.3g; singular input within %.3g of closed form",
                 worst_rel, best);
  return r;
}

// criterion 4: Cuk rank-deficient at physical u in {0,1}, full rank at u*
CheckResult check_cuk_singular_inputs() {
  CheckResult r{4, "cuk-singular-inputs", true, ""};
  const CukParams p;
  const ScenarioBundle b = build_cuk(p);
  const double ustar = p.Vd / (p.Vd + p.E);
  auto rank_at = [&](double u_phys) {
    ColVec u(1);
    u[0] = u_phys;
    return rank_row_equilibrated(observability_matrix(b.physical.C, eval_A(b.physical, u)), 1e-9);
  };
  const int r0 = rank_at(0.0);
  const int r1 = rank_at(1.0);
  const int rs = rank_at(ustar);
  if (r0 >= 4 || r1 >= 4 || rs != 4) {
    r.pass = false;
    r.detail = fmt("ranks at u=0/1/u*: %.0f / %.0f / %.0f", r0, r1, rs);
    return r;
  }
  r.detail = fmt("rank %.0f at u=0, %.0f at u=1, full rank 4 at u=u*",
                 static_cast<double>(r0), static_cast<double>(r1));
  return r;
}

// criterion 5: equilibrium residuals + Cuk closed-form components
CheckResult check_equilibrium_residuals() {
  CheckResult r{5, "equilibrium-residuals", true, ""};
  const CukParams cp;
  const ScenarioBundle cuk = build_cuk(cp);
  const ScenarioBundle he = build_heat_exchanger();
  auto rel_resid = [](const ScenarioBundle& b) {
    const Mat A = eval_A(b.physical, b.equilibrium.u_star);
    const ColVec B = eval_B(b.physical, b.equilibrium.u_star);
    const double scale =
        std::max({1.0, norm_inf(A) * norm_inf(b.equilibrium.x_star), norm_inf(B)});
    return norm_inf(A * b.equilibrium.x_star + B) / scale;
  };
  const double rc = rel_resid(cuk);
  const double rh = rel_resid(he);
  const double v4 = cuk.equilibrium.x_star[3] / cp.C4;
  const double v3 = cuk.equilibrium.x_star[2] / cp.L3;
  const double e4 = std::fabs(v4 - (-cp.Vd)) / cp.Vd;
  const double e3 = std::fabs(v3 - (-cp.Vd / cp.R_load)) / (cp.Vd / cp.R_load);
  if (rc > 1e-9 || rh > 1e-9 || e4 > 1e-9 || e3 > 1e-9) {
    r.pass = false;
    r.detail = fmt("residuals %.3g / %.3g; x4*/C4 rel err %.3g", rc, rh, std::max(e4, e3));
    return r;
  }
  r.detail = fmt("residuals cuk %.3g, he %.3g; x4*/C4 = -Vd and x3*/L3 = -Vd/R to %.3g",
                 rc, rh, std::max(e4, e3));
  return r;
}

// criterion 6: faster observer convergence for larger alpha
CheckResult check_gain_ordering() {
  CheckResult r{6, "gain-ordering", true, ""};
  std::string detail;
  for (const std::string& name : {std::string("cuk"), std::string("heat-exchanger")}) {
    const ScenarioBundle b = build_scenario(name);
    const double T = b.default_sim.t_final;
    std::vector<double> mid, end;
    double term_err_ratio_largest = 0.0;
    for (double alpha : b.default_alphas) {
      const Trajectory traj =
          integrate(b.closed_loop(GainPolicy::constant(alpha)), b.z0, b.default_sim);
      // pointwise samples at T/2 and T are phase luck for the converter's
      // beat frequencies; windowed means realize "converges faster" robustly
      mid.push_back(mean_over_window(traj.times, traj.err_series, 0.4 * T, 0.6 * T));
      end.push_back(mean_over_window(traj.times, traj.err_series, 0.8 * T, T));
      term_err_ratio_largest = traj.err_series.back() / traj.err_series.front();
    }
    for (size_t i = 1; i < mid.size(); ++i) {
      if (!(mid[i] < mid[i - 1]) || !(end[i] < end[i - 1])) {
        r.pass = false;
        r.detail = name + ": error means not strictly decreasing in alpha";
        return r;
      }
    }
    if (name == "cuk" && term_err_ratio_largest > 0.01) {
      r.pass = false;
      r.detail = fmt("cuk alpha=100 terminal error %.3g of initial (> 1%%)",
                     term_err_ratio_largest);
      return r;
    }
    detail += name +
              fmt(" mid-window gaps %.3g/%.3g", (mid[0] - mid[1]) / mid[0],
                  (mid[1] - mid[2]) / mid[1]) +
              "; ";
  }
  r.detail = detail + "cuk terminal error well under 1% of initial";
  return r;
}

// criterion 7: RK4 order on the scalar problem + harmonic energy drift
CheckResult check_integrator_order() {
  CheckResult r{7, "integrator-order", true, ""};
  auto decay_end = [](double h) {
    SimConfig cfg{1.0, h, 1 << 20};
    double zT = 0.0;
    integrate_field([](const std::vector<double>& z, std::vector<double>& dz) { dz[0] = -z[0]; },
                    {1.0}, cfg, [&](double, const std::vector<double>& z) { zT = z[0]; });
    return zT;
  };
  const double zh = decay_end(0.02);
  const double zh2 = decay_end(0.01);
  const double zh4 = decay_end(0.005);
  const double ratio = std::fabs(zh - zh2) / std::fabs(zh2 - zh4);
  if (!(ratio >= 16.0 * 0.8 && ratio <= 16.0 * 1.2)) {
    r.pass = false;
    r.detail = fmt("step-halving ratio %.4g outside 16 +/- 20%%", ratio);
    return r;
  }

  // undriven oscillator: |z|^2 conserved by the continuous flow
  const double two_pi = 2.0 * std::acos(-1.0);
  SimConfig cfg{100.0 * two_pi, 1e-3, 1000};
  double drift = 0.0;
  integrate_field(
      [](const std::vector<double>& z, std::vector<double>& dz) {
        dz[0] = -z[1];
        dz[1] = z[0];
      },
      {1.0, 0.0}, cfg,
      [&](double, const std::vector<double>& z) {
        drift = std::max(drift, std::fabs(z[0] * z[0] + z[1] * z[1] - 1.0));
      });
  if (drift > 1e-8) {
    r.pass = false;
    r.detail = fmt("energy drift %.3g > 1e-8 over 100 periods", drift);
    return r;
  }
  r.detail = fmt("step-halving ratio %.4g; energy drift %.3g", ratio, drift);
  return r;
}

// criterion 8: adaptive gain positivity, correction bound, V decay
CheckResult check_adaptive_gain() {
  CheckResult r{8, "adaptive-gain", true, ""};
  const ScenarioBundle b = build_cuk();
  const LyapunovSpec& W = b.lyapunov;

  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  double min_alpha = 1e300;
  for (int s = 0; s < 10000; ++s) {
    ColVec xhat(4), y(1);
    for (int i = 0; i < 4; ++i) xhat[i] = 0.05 * d(rng);
    y[0] = 1e-3 * d(rng);
    min_alpha = std::min(min_alpha, adaptive_gain(W, xhat, y, b.shifted.C, b.shifted.P));
  }
  if (!(min_alpha > 0.0)) {
    r.pass = false;
    r.detail = "adaptive gain not strictly positive";
    return r;
  }

  const ClosedLoopSystem cls = b.closed_loop(GainPolicy::adaptive(W));
  std::vector<double> times;
  const auto raw = integrate_raw(cls, b.z0, b.default_sim, &times);
  const int n = b.shifted.n;
  const Mat Pinv_Ct = cls.Pinv_Ct;
  double prev_v = -1.0;
  double v0 = 0.0;
  for (size_t k = 0; k < raw.size(); ++k) {
    ColVec xhat(n), eps(n);
    for (int i = 0; i < n; ++i) {
      xhat[i] = raw[k][static_cast<size_t>(n + i)];
      eps[i] = raw[k][static_cast<size_t>(n + i)] - raw[k][static_cast<size_t>(i)];
    }
    const ColVec y_err = b.shifted.C * eps;
    const double alpha = adaptive_gain(W, xhat, y_err, b.shifted.C, b.shifted.P);
    const double corr = alpha * norm2(Pinv_Ct * y_err);
    const double bound =
        std::max(W.value(xhat), 1.0) / (2.0 * (1.0 + norm2(W.gradient(xhat))));
    if (corr > bound * (1.0 + 1e-12)) {
      r.pass = false;
      r.detail = fmt("correction %.6g exceeds bound %.6g at t=%.3g", corr, bound, times[k]);
      return r;
    }
    const double v = lyapunov_V(b.shifted.P, eps);
    if (k == 0) v0 = v;
    if (k > 0 && v > prev_v + 1e-8 * v0) {
      r.pass = false;
      r.detail = fmt("V increased at t=%.3g in the adaptive run", times[k]);
      return r;
    }
    prev_v = v;
  }
  r.detail = fmt("min alpha %.6g over 1e4 samples; correction bound and V decay hold",
                 min_alpha);
  return r;
}

// criterion 9: (x, xhat) simulation transformed to eps agrees with the
// direct (xhat, eps) simulation
CheckResult check_coordinate_equivalence() {
  CheckResult r{9, "coordinate-equivalence", true, ""};
  double worst = 0.0;
  for (const std::string& name : scenario_names()) {
    const ScenarioBundle b = build_scenario(name);
    for (double alpha : b.default_alphas) {
      const ClosedLoopSystem cls = b.closed_loop(GainPolicy::constant(alpha));
      const int n = b.shifted.n;
      const auto raw_xz = integrate_raw(cls, b.z0, b.default_sim);

      ColVec w0(2 * n);
      for (int i = 0; i < n; ++i) {
        w0[i] = b.z0[n + i];                 // xhat
        w0[n + i] = b.z0[n + i] - b.z0[i];   // eps
      }
      std::vector<std::vector<double>> raw_we;
      SimConfig cfg = b.default_sim;
      integrate_field(
          [&cls](const std::vector<double>& w, std::vector<double>& dw) {
            ColVec wv;
            wv.v = w;
            const ColVec d = observer_error_field(cls, wv);
            dw.assign(d.v.begin(), d.v.end());
          },
          w0.v, cfg, [&](double, const std::vector<double>& w) { raw_we.push_back(w); });

      for (size_t k = 0; k < raw_xz.size(); ++k) {
        double diff2 = 0.0, ref2 = 0.0;
        for (int i = 0; i < n; ++i) {
          const double eps_a =
              raw_xz[k][static_cast<size_t>(n + i)] - raw_xz[k][static_cast<size_t>(i)];
          const double eps_b = raw_we[k][static_cast<size_t>(n + i)];
          diff2 += (eps_a - eps_b) * (eps_a - eps_b);
          ref2 += eps_b * eps_b;
        }
        const double rel = std::sqrt(diff2) / std::max(std::sqrt(ref2), 1e-280);
        worst = std::max(worst, rel);
        if (rel > 1e-8) {
          r.pass = false;
          r.detail = name + fmt(": eps mismatch %.3g at sample %.0f (alpha %.3g)", rel,
                                static_cast<double>(k), alpha);
          return r;
        }
      }
    }
  }
  r.detail = fmt("worst relative eps mismatch %.3g across scenarios and gains", worst);
  return r;
}

// criterion 10: box-vertex dissipativity check equals the grid worst case
CheckResult check_vertex_exactness() {
  CheckResult r{10, "dissipativity-vertex-exactness", true, ""};
  double worst_gap = 0.0;
  for (const std::string& name : scenario_names()) {
    const ScenarioBundle b = build_scenario(name);
    const DissipativityResult d = check_dissipativity(b.shifted, 33, 1e-9);
    const double gap = d.worst_eig - d.vertex_worst_eig;
    worst_gap = std::max(worst_gap, std::fabs(gap));
    if (gap > 0.0) {
      r.pass = false;
      r.detail = name + fmt(": grid worst %.6g above vertex worst %.6g", d.worst_eig,
                            d.vertex_worst_eig);
      return r;
    }
    if (!d.pass) {
      r.pass = false;
      r.detail = name + ": dissipativity check failed";
      return r;
    }
  }
  r.detail = fmt("grid never exceeds vertices (max |gap| %.3g)", worst_gap);
  return r;
}

}  // namespace

std::vector<CheckResult> run_acceptance(const std::string& filter) {
  using Fn = CheckResult (*)();
  const Fn checks[] = {
      check_lyapunov_decay,       check_error_block_hurwitz,
      check_he_observability_det, check_cuk_singular_inputs,
      check_equilibrium_residuals, check_gain_ordering,
      check_integrator_order,     check_adaptive_gain,
      check_coordinate_equivalence, check_vertex_exactness,
  };
  // names needed before running; keep in sync with the functions above
  const char* names[] = {
      "lyapunov-decay", "error-block-hurwitz",
      "heat-exchanger-observability-det", "cuk-singular-inputs",
      "equilibrium-residuals", "gain-ordering",
      "integrator-order", "adaptive-gain",
      "coordinate-equivalence", "dissipativity-vertex-exactness",
  };
  std::vector<CheckResult> out;
  for (size_t i = 0; i < sizeof(checks) / sizeof(checks[0]); ++i) {
    if (!filter.empty() && std::string(names[i]).find(filter) == std::string::npos) continue;
    out.push_back(checks[i]());
  }
  return out;
}

}  // namespace dissiped
