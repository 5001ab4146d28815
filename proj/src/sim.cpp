#include "dissiped/sim.hpp"

#include <cmath>
#include <cstdio>

namespace dissiped {

void SimConfig::validate() const {
  if (!(t_final > 0.0)) throw std::invalid_argument("SimConfig: t_final must be > 0");
  if (!(h > 0.0)) throw std::invalid_argument("SimConfig: step must be > 0");
  if (h > t_final) throw std::invalid_argument("SimConfig: step exceeds t_final");
  if (record_every < 1) throw std::invalid_argument("SimConfig: record_every >= 1");
  if (t_final / h > 1e9) throw std::invalid_argument("SimConfig: more than 1e9 steps");
}

long SimConfig::step_count() const { return std::lround(t_final / h); }

void integrate_field(const FieldFn& f, const std::vector<double>& z0, const SimConfig& cfg,
                     const std::function<void(double, const std::vector<double>&)>& record) {
  cfg.validate();
  const size_t dim = z0.size();
  const long steps = cfg.step_count();
  const double h = cfg.h;

  std::vector<double> z = z0;
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  auto check_finite = [&](double t) {
    for (double v : z) {
      if (!std::isfinite(v) || std::fabs(v) > 1e12) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "state left the finite range at t = %.9g", t);
        throw NonFiniteState(msg, t);
      }
    }
  };

  check_finite(0.0);
  record(0.0, z);
  for (long i = 0; i < steps; ++i) {
    f(z, k1);
    for (size_t j = 0; j < dim; ++j) tmp[j] = z[j] + 0.5 * h * k1[j];
    f(tmp, k2);
    for (size_t j = 0; j < dim; ++j) tmp[j] = z[j] + 0.5 * h * k2[j];
    f(tmp, k3);
    for (size_t j = 0; j < dim; ++j) tmp[j] = z[j] + h * k3[j];
    f(tmp, k4);
    for (size_t j = 0; j < dim; ++j)
      z[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    const double t = static_cast<double>(i + 1) * h;
    check_finite(t);
    if ((i + 1) % cfg.record_every == 0 || i + 1 == steps) record(t, z);
  }
}

namespace {

FieldFn make_field(const ClosedLoopSystem& cls) {
  // bypasses ColVec's construction-time finiteness validation: the
  // integrator's own guard reports blow-ups as NonFiniteState
  return [&cls](const std::vector<double>& z, std::vector<double>& dz) {
    ColVec zv;
    zv.v = z;
    const ColVec d = closed_loop_field(cls, zv);
    dz.assign(d.v.begin(), d.v.end());
  };
}

}  // namespace

std::vector<std::vector<double>> integrate_raw(const ClosedLoopSystem& cls, const ColVec& z0,
                                               const SimConfig& cfg,
                                               std::vector<double>* times) {
  if (z0.dim() != 2 * cls.sys.n)
    throw DimensionMismatch("integrate_raw: dim(z0) != 2n");
  std::vector<std::vector<double>> out;
  integrate_field(make_field(cls), z0.v, cfg, [&](double t, const std::vector<double>& z) {
    if (times) times->push_back(t);
    out.push_back(z);
  });
  return out;
}

Trajectory integrate(const ClosedLoopSystem& cls, const ColVec& z0, const SimConfig& cfg) {
  if (z0.dim() != 2 * cls.sys.n)
    throw DimensionMismatch("integrate: dim(z0) != 2n");
  const int n = cls.sys.n;
  Trajectory traj;
  traj.n = n;
  traj.m = cls.sys.m;
  traj.p = cls.sys.p;

  integrate_field(make_field(cls), z0.v, cfg, [&](double t, const std::vector<double>& z) {
    ColVec x(n), xhat(n), eps(n);
    for (int i = 0; i < n; ++i) {
      x[i] = z[static_cast<size_t>(i)];
      xhat[i] = z[static_cast<size_t>(n + i)];
      eps[i] = xhat[i] - x[i];
    }
    const ColVec u_shift = eval_feedback(cls.law, xhat);
    const ColVec y_err = cls.sys.C * eps;

    traj.times.push_back(t);
    traj.v_series.push_back(lyapunov_V(cls.sys.P, eps));
    traj.err_series.push_back(norm2(eps));
    traj.y_err_series.push_back(norm2(y_err));
    traj.gain_series.push_back(cls.gain_value(xhat, y_err));

    ColVec state_phys(2 * n);
    for (int i = 0; i < n; ++i) {
      state_phys[i] = x[i] + cls.x_star[i];
      state_phys[n + i] = xhat[i] + cls.x_star[i];
    }
    ColVec x_phys(n);
    for (int i = 0; i < n; ++i) x_phys[i] = state_phys[i];
    traj.outputs.push_back(cls.sys.C * x_phys);
    traj.states.push_back(std::move(state_phys));
    traj.inputs.push_back(cls.u_star + u_shift);
  });
  return traj;
}

Metric Metric::parse(const std::string& name) {
  Metric m;
  if (name == "error_norm") {
    m.kind = MetricKind::ErrorNorm;
    return m;
  }
  if (name == "lyapunov_v") {
    m.kind = MetricKind::LyapunovV;
    return m;
  }
  auto indexed = [&](const std::string& prefix, MetricKind kind) -> bool {
    if (name.rfind(prefix + "(", 0) != 0 || name.back() != ')') return false;
    const std::string num = name.substr(prefix.size() + 1, name.size() - prefix.size() - 2);
    if (num.empty()) return false;
    for (char c : num)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    m.kind = kind;
    m.index = std::stoi(num);
    return true;
  };
  if (indexed("output_k", MetricKind::OutputK)) return m;
  if (indexed("input_k", MetricKind::InputK)) return m;
  throw UnknownMetric("unknown metric: " + name);
}

std::vector<double> extract_metric(const Trajectory& traj, const Metric& metric) {
  std::vector<double> out;
  out.reserve(traj.size());
  switch (metric.kind) {
    case MetricKind::ErrorNorm:
      return traj.err_series;
    case MetricKind::LyapunovV:
      return traj.v_series;
    case MetricKind::OutputK: {
      if (metric.index < 1 || metric.index > traj.n)
        throw UnknownMetric("output_k index out of range");
      for (const ColVec& s : traj.states) out.push_back(s[metric.index - 1]);
      return out;
    }
    case MetricKind::InputK: {
      if (metric.index < 1 || metric.index > traj.m)
        throw UnknownMetric("input_k index out of range");
      for (const ColVec& u : traj.inputs) out.push_back(u[metric.index - 1]);
      return out;
    }
  }
  throw UnknownMetric("unknown metric kind");
}

std::vector<double> extract_metric(const Trajectory& traj, const std::string& name) {
  return extract_metric(traj, Metric::parse(name));
}

}  // namespace dissiped
