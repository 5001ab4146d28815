// dissiped: analyze, simulate and validate observer-based output-feedback
// loops for dissipative state-affine systems.
//
// Exit codes: 0 ok, 1 validation failure, 2 parse/usage error,
// 3 assumption failure (analyze), 4 non-finite state during simulation.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>

#include "CLI11.hpp"

#include "dissiped/csv.hpp"
#include "dissiped/serialize.hpp"
#include "dissiped/svg.hpp"
#include "dissiped/validate.hpp"

using namespace dissiped;

namespace {

std::uint64_t seed_from_env() {
  const char* s = std::getenv("DISSIPED_SEED");
  if (!s) return 0;
  return std::strtoull(s, nullptr, 10);
}

bool is_scenario(const std::string& name) {
  const auto names = scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

// scenario name or path to a scenario-wrapper / bare-system JSON file
ScenarioBundle load_target(const std::string& target) {
  if (is_scenario(target)) return build_scenario(target);
  std::ifstream is(target);
  if (!is) throw std::invalid_argument("unknown scenario and unreadable file: " + target);
  nlohmann::json j;
  is >> j;
  if (j.contains("system")) return scenario_from_json(j);
  // bare system: wrap with a zero constant law so analyze works
  ScenarioBundle b;
  b.name = target;
  b.shifted = system_from_json(j);
  b.physical = b.shifted;
  b.equilibrium.x_star = ColVec(b.shifted.n);
  b.equilibrium.u_star = ColVec(b.shifted.m);
  b.law = FeedbackLaw::constant(ColVec(b.shifted.m));
  b.z0 = ColVec(2 * b.shifted.n);
  b.default_alphas = {1.0};
  b.default_sim = SimConfig{1.0, 1e-3, 1};
  b.lyapunov = LyapunovSpec{b.shifted.P, 1.0};
  return b;
}

void print_report(const AnalysisReport& rep) {
  auto yn = [](bool b) { return b ? "pass" : "FAIL"; };
  std::cout << "assumption checks\n";
  std::cout << "  dissipativity   " << yn(rep.dissipativity.pass)
            << "  (worst eig " << rep.dissipativity.worst_eig << " at u = ";
  for (int i = 0; i < rep.dissipativity.worst_input.dim(); ++i)
    std::cout << (i ? ", " : "") << rep.dissipativity.worst_input[i];
  std::cout << ")\n";
  std::cout << "  detectability   " << yn(rep.detectability.pass);
  if (rep.detectability.offending_eigenvalue)
    std::cout << "  (offending eigenvalue " << rep.detectability.offending_eigenvalue->real()
              << " + " << rep.detectability.offending_eigenvalue->imag() << "i)";
  std::cout << "\n";
  std::cout << "  observability   rank " << rep.observability.rank;
  if (rep.observability.det) std::cout << ", det " << *rep.observability.det;
  if (!rep.observability.singular_inputs_found.empty()) {
    std::cout << ", singular inputs:";
    for (const ColVec& u : rep.observability.singular_inputs_found)
      std::cout << " " << u[0];
  }
  std::cout << "\n";
  if (rep.alpha0) std::cout << "  alpha0 estimate " << *rep.alpha0 << "\n";
  for (const std::string& note : rep.notes) std::cout << "  note: " << note << "\n";
}

Trajectory run_simulation(const ScenarioBundle& b, bool adaptive, double alpha,
                          const SimConfig& cfg) {
  const GainPolicy gain =
      adaptive ? GainPolicy::adaptive(b.lyapunov) : GainPolicy::constant(alpha);
  return integrate(b.closed_loop(gain), b.z0, cfg);
}

std::vector<double> output_series(const ScenarioBundle& b, const Trajectory& traj) {
  Metric m;
  m.kind = MetricKind::OutputK;
  m.index = b.output_state;
  std::vector<double> out = extract_metric(traj, m);
  for (double& v : out) v *= b.output_scale;
  return out;
}

int cmd_analyze(const std::string& target, bool with_alpha0, const std::string& json_out) {
  ScenarioBundle b;
  try {
    b = load_target(target);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  AnalyzeOptions opt;
  opt.with_alpha0 = with_alpha0;
  opt.seed = seed_from_env();
  const AnalysisReport rep = analyze_bundle(b, opt);
  print_report(rep);
  const nlohmann::json j = to_json(rep);
  if (!json_out.empty()) {
    std::ofstream os(json_out);
    os << j.dump(2) << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return (rep.dissipativity.pass && rep.detectability.pass) ? 0 : 3;
}

int cmd_simulate(const std::string& scenario, double alpha, bool adaptive, double t_final,
                 double step, int record_every, const std::string& out_csv,
                 const std::string& out_svg) {
  ScenarioBundle b;
  try {
    b = load_target(scenario);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  SimConfig cfg = b.default_sim;
  if (t_final > 0.0) cfg.t_final = t_final;
  if (step > 0.0) cfg.h = step;
  if (record_every > 0) cfg.record_every = record_every;
  Trajectory traj;
  try {
    traj = run_simulation(b, adaptive, alpha, cfg);
  } catch (const NonFiniteState& e) {
    std::cerr << "simulation aborted: " << e.what() << "\n";
    return 4;
  }
  if (!out_csv.empty()) {
    write_trajectory_csv(out_csv, traj);
    std::cout << "wrote " << out_csv << " (" << traj.size() << " samples)\n";
  } else {
    write_trajectory_csv(std::cout, traj);
  }
  if (!out_svg.empty()) {
    SvgPanel top{b.output_label, "output", false, {}};
    top.series.push_back({adaptive ? std::string("adaptive") : "alpha=" + std::to_string(alpha),
                          traj.times, output_series(b, traj)});
    SvgPanel bot{"observer error", "|eps|", true, {}};
    bot.series.push_back({"err_norm", traj.times, traj.err_series});
    write_svg_plot(out_svg, {top, bot}, "t [s]");
    std::cout << "wrote " << out_svg << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& scenario, std::vector<double> alphas, double t_final,
              double step, int record_every, const std::string& out_csv,
              const std::string& out_svg) {
  ScenarioBundle b;
  try {
    b = load_target(scenario);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  if (alphas.empty()) alphas = b.default_alphas;
  for (double a : alphas)
    if (!(a > 0.0)) {
      std::cerr << "parse error: alphas must be positive\n";
      return 2;
    }
  std::sort(alphas.begin(), alphas.end());
  SimConfig cfg = b.default_sim;
  if (t_final > 0.0) cfg.t_final = t_final;
  if (step > 0.0) cfg.h = step;
  if (record_every > 0) cfg.record_every = record_every;

  // one integration per gain, concurrently; results ordered by alpha
  std::vector<std::future<Trajectory>> futs;
  futs.reserve(alphas.size());
  for (double a : alphas)
    futs.push_back(std::async(std::launch::async,
                              [&b, a, &cfg] { return run_simulation(b, false, a, cfg); }));
  std::vector<Trajectory> trajs;
  try {
    for (auto& f : futs) trajs.push_back(f.get());
  } catch (const NonFiniteState& e) {
    std::cerr << "simulation aborted: " << e.what() << "\n";
    return 4;
  }

  // combined CSV: t, then output and err_norm per alpha
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_csv.empty()) {
    file.open(out_csv);
    if (!file) {
      std::cerr << "cannot open " << out_csv << "\n";
      return 2;
    }
    os = &file;
  }
  std::vector<std::vector<double>> outs;
  for (const Trajectory& t : trajs) outs.push_back(output_series(b, t));
  *os << "t";
  for (double a : alphas) *os << ",output[alpha=" << a << "],err_norm[alpha=" << a << "]";
  *os << "\n";
  char buf[40];
  for (size_t k = 0; k < trajs.front().size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", trajs.front().times[k]);
    *os << buf;
    for (size_t ai = 0; ai < alphas.size(); ++ai) {
      std::snprintf(buf, sizeof buf, "%.17g", outs[ai][k]);
      *os << "," << buf;
      std::snprintf(buf, sizeof buf, "%.17g", trajs[ai].err_series[k]);
      *os << "," << buf;
    }
    *os << "\n";
  }
  if (!out_csv.empty()) std::cout << "wrote " << out_csv << "\n";

  if (!out_svg.empty()) {
    SvgPanel top{b.output_label, "output", false, {}};
    SvgPanel bot{"observer error", "|eps|", true, {}};
    for (size_t ai = 0; ai < alphas.size(); ++ai) {
      const std::string label = "alpha=" + std::to_string(alphas[ai]);
      top.series.push_back({label, trajs[ai].times, outs[ai]});
      bot.series.push_back({label, trajs[ai].times, trajs[ai].err_series});
    }
    write_svg_plot(out_svg, {top, bot}, "t [s]");
    std::cout << "wrote " << out_svg << "\n";
  }

  // summary: err_norm at quartile times
  const double T = cfg.t_final;
  std::cout << "err_norm at quartile times\n";
  std::cout << "alpha";
  for (double q : {0.25, 0.5, 0.75, 1.0}) std::cout << "\tt=" << q * T;
  std::cout << "\n";
  for (size_t ai = 0; ai < alphas.size(); ++ai) {
    std::cout << alphas[ai];
    for (double q : {0.25, 0.5, 0.75, 1.0}) {
      const double tq = q * T;
      size_t best = 0;
      for (size_t k = 1; k < trajs[ai].times.size(); ++k)
        if (std::fabs(trajs[ai].times[k] - tq) < std::fabs(trajs[ai].times[best] - tq))
          best = k;
      std::snprintf(buf, sizeof buf, "%.6g", trajs[ai].err_series[best]);
      std::cout << "\t" << buf;
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_validate(const std::string& only) {
  const std::vector<CheckResult> results = run_acceptance(only);
  if (results.empty()) {
    std::cerr << "no checks match '" << only << "'\n";
    return 2;
  }
  bool all = true;
  std::string first_fail;
  for (const CheckResult& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << ": " << r.detail
              << "\n";
    if (!r.pass && all) {
      all = false;
      first_fail = r.name;
    }
  }
  if (!all) std::cerr << "first failing check: " << first_fail << "\n";
  return all ? 0 : 1;
}

int cmd_export(const std::string& scenario, const std::string& out) {
  ScenarioBundle b;
  try {
    b = load_target(scenario);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  const nlohmann::json j = to_json(b);
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(out);
    if (!os) {
      std::cerr << "cannot open " << out << "\n";
      return 2;
    }
    os << j.dump(2) << "\n";
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"observer-based output-feedback toolkit for dissipative state-affine systems"};
  app.require_subcommand(1);

  std::string target, out_csv, out_svg, out_json, only;
  double alpha = 0.0, t_final = 0.0, step = 0.0;
  int record_every = 0;
  bool adaptive = false, with_alpha0 = false;
  std::vector<double> alphas;

  auto* an = app.add_subcommand("analyze", "run the assumption checks on a scenario or JSON file");
  an->add_option("scenario", target, "scenario name or JSON file")->required();
  an->add_flag("--with-alpha0", with_alpha0, "estimate the constant-gain bound alpha0");
  an->add_option("--json-out", out_json, "write the JSON report to a file");

  auto* si = app.add_subcommand("simulate", "integrate the closed loop and export CSV/SVG");
  si->add_option("scenario", target, "scenario name or JSON file")->required();
  auto* alpha_opt = si->add_option("--alpha", alpha, "constant observer gain (> 0)");
  si->add_flag("--adaptive", adaptive, "use the output-dependent adaptive gain");
  si->add_option("--t-final", t_final, "simulation horizon [s]");
  si->add_option("--step", step, "integration step [s]");
  si->add_option("--record-every", record_every, "record decimation");
  si->add_option("--out", out_csv, "trajectory CSV path");
  si->add_option("--svg", out_svg, "plot SVG path");

  auto* sw = app.add_subcommand("sweep", "simulate several gains and overlay the results");
  sw->add_option("scenario", target, "scenario name or JSON file")->required();
  sw->add_option("--alphas", alphas, "comma-separated gains")->delimiter(',');
  sw->add_option("--t-final", t_final, "simulation horizon [s]");
  sw->add_option("--step", step, "integration step [s]");
  sw->add_option("--record-every", record_every, "record decimation");
  sw->add_option("--out", out_csv, "combined CSV path");
  sw->add_option("--svg", out_svg, "overlay SVG path");

  auto* va = app.add_subcommand("validate", "run the acceptance checks");
  va->add_option("--only", only, "run only checks whose name contains this substring");

  auto* ex = app.add_subcommand("export-scenario", "write a scenario as JSON");
  ex->add_option("scenario", target, "scenario name")->required();
  ex->add_option("--out", out_csv, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (an->parsed()) return cmd_analyze(target, with_alpha0, out_json);
    if (si->parsed()) {
      if (!adaptive && alpha_opt->count() == 0) {
        std::cerr << "simulate: pass --alpha or --adaptive\n";
        return 2;
      }
      if (!adaptive && !(alpha > 0.0)) {
        std::cerr << "simulate: alpha must be > 0\n";
        return 2;
      }
      return cmd_simulate(target, alpha, adaptive, t_final, step, record_every, out_csv,
                          out_svg);
    }
    if (sw->parsed()) return cmd_sweep(target, alphas, t_final, step, record_every, out_csv, out_svg);
    if (va->parsed()) return cmd_validate(only);
    if (ex->parsed()) return cmd_export(target, out_csv);
  } catch (const NonFiniteState& e) {
    std::cerr << "simulation aborted: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
