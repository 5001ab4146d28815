#pragma once

// The three built-in scenarios with their published parameters: harmonic
// oscillator, Cuk converter and counter-current heat exchanger.

#include <string>
#include <vector>

#include "dissiped/observer.hpp"
#include "dissiped/sim.hpp"

namespace dissiped {

struct CukParams {
  double L1 = 10.9e-3;   // H
  double C2 = 22.0e-6;   // F
  double L3 = 10.9e-3;   // H
  double C4 = 22.9e-6;   // F
  double R_load = 22.36; // Ohm
  double E = 12.0;       // V
  double Vd = 25.0;      // V, target output voltage magnitude
  double beta = 1e-4;    // feedback tuning
};

struct HeatExchangerParams {
  double k = 1.20e-2;      // 1/s
  double gamma1 = 5.06e-1; // 1/kg
  double gamma2 = 1.00e-2; // 1/s
  double E_temp = 360.0;   // K
  double G = 300.0;        // K
  double u_M = 0.05;       // kg/s
  double u_star = 0.025;   // kg/s (= 0.5 u_M)
  double beta = 1.0;
};

// A scenario ready to analyze and simulate: the physical system, its
// operating point, the shifted system the loop runs in, feedback, initial
// condition (shifted coordinates), default gain list and sim settings.
struct ScenarioBundle {
  std::string name;
  InputAffineSystem physical;
  Equilibrium equilibrium;
  InputAffineSystem shifted;
  FeedbackLaw law;
  ColVec z0;  // (xbar0, xhatbar0)
  std::vector<double> default_alphas;
  SimConfig default_sim;
  LyapunovSpec lyapunov;        // default W for adaptive gain / alpha0
  int output_state = 1;         // 1-based physical state the scenario plots
  double output_scale = 1.0;    // plotted value = state * output_scale
  std::string output_label;

  ClosedLoopSystem closed_loop(GainPolicy gain) const;
};

ScenarioBundle build_harmonic_oscillator();
ScenarioBundle build_cuk(const CukParams& p = {});
/// Throws DetectabilityViolated when u_star is within 1e-12 of k^2/(g1*g2).
ScenarioBundle build_heat_exchanger(const HeatExchangerParams& p = {});

/// Builds one of "harmonic-oscillator", "cuk", "heat-exchanger".
ScenarioBundle build_scenario(const std::string& name);
std::vector<std::string> scenario_names();

struct AnalyzeOptions {
  int u_samples = 33;
  double dissipativity_tol = 1e-9;
  double detectability_tol = 1e-9;
  int scan_grid = 200;
  bool with_alpha0 = false;
  int alpha0_samples = 2000;
  std::uint64_t seed = 0;
};

/// Full assumption report for a bundle: dissipativity over the input box,
/// target detectability, observability rank/det and singular-input scan,
/// optionally the alpha0 estimate over default boxes derived from z0.
AnalysisReport analyze_bundle(const ScenarioBundle& b, const AnalyzeOptions& opt = {});

/// Report for a bare system (no feedback or Lyapunov data available).
AnalysisReport analyze_system(const InputAffineSystem& sys, const AnalyzeOptions& opt = {});

}  // namespace dissiped
