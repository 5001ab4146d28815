#pragma once

// Fixed-step classical Runge-Kutta integration of closed-loop fields with
// decimated trajectory recording.

#include <functional>
#include <string>
#include <vector>

#include "dissiped/observer.hpp"

namespace dissiped {

struct SimConfig {
  double t_final = 1.0;   // s
  double h = 1e-3;        // s
  int record_every = 1;   // decimation

  void validate() const;
  long step_count() const;
};

// Recorded quantities are physical: states carry the equilibrium offset,
// inputs are u* + lambda(xhat). v_series and err_series are computed from
// the shifted error before the offset is applied, so they stay accurate
// when eps is many orders below |x*|.
struct Trajectory {
  std::vector<double> times;
  std::vector<ColVec> states;   // 2n: (x, xhat), physical
  std::vector<ColVec> inputs;   // m, physical
  std::vector<ColVec> outputs;  // p, physical y = C x
  std::vector<double> v_series;     // V(eps) = eps'P eps
  std::vector<double> err_series;   // |eps|_2
  std::vector<double> y_err_series; // |C eps|_2
  std::vector<double> gain_series;  // alpha per sample
  int n = 0, m = 0, p = 0;

  size_t size() const { return times.size(); }
};

using FieldFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

/// Classical RK4 with fixed step on an arbitrary autonomous field; records
/// every record_every-th state (plus the final one). Throws NonFiniteState
/// when any component exceeds 1e12 in magnitude or becomes non-finite.
void integrate_field(const FieldFn& f, const std::vector<double>& z0, const SimConfig& cfg,
                     const std::function<void(double, const std::vector<double>&)>& record);

/// Raw shifted samples of the closed loop from z0 = (xbar0, xhatbar0).
std::vector<std::vector<double>> integrate_raw(const ClosedLoopSystem& cls,
                                               const ColVec& z0, const SimConfig& cfg,
                                               std::vector<double>* times = nullptr);

/// Full trajectory recording (physical quantities + diagnostics).
Trajectory integrate(const ClosedLoopSystem& cls, const ColVec& z0, const SimConfig& cfg);

enum class MetricKind { ErrorNorm, LyapunovV, OutputK, InputK };

struct Metric {
  MetricKind kind = MetricKind::ErrorNorm;
  int index = 1;  // 1-based component for OutputK / InputK

  // parses "error_norm", "lyapunov_v", "output_k(i)", "input_k(i)";
  // throws UnknownMetric otherwise.
  static Metric parse(const std::string& name);
};

/// The named scalar series aligned with traj.times. OutputK(i) is the i-th
/// physical plant-state component (the scenario output transform applies on
/// top of it), InputK(i) the i-th physical input channel.
std::vector<double> extract_metric(const Trajectory& traj, const Metric& metric);
std::vector<double> extract_metric(const Trajectory& traj, const std::string& name);

}  // namespace dissiped
