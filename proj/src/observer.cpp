#include "dissiped/observer.hpp"

#include <algorithm>
#include <cmath>

#include "dissiped/sim.hpp"

namespace dissiped {

GainPolicy GainPolicy::constant(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("GainPolicy: constant alpha must be > 0");
  GainPolicy g;
  g.kind = Kind::Constant;
  g.alpha = alpha;
  return g;
}

GainPolicy GainPolicy::adaptive(LyapunovSpec W) {
  W.validate();
  GainPolicy g;
  g.kind = Kind::Adaptive;
  g.W = std::move(W);
  return g;
}

ClosedLoopSystem ClosedLoopSystem::assemble(InputAffineSystem shifted_sys, FeedbackLaw law,
                                            GainPolicy gain, ColVec x_star, ColVec u_star) {
  shifted_sys.validate();
  if (law.variant != FeedbackVariant::Constant && law.gain.cols != shifted_sys.n)
    throw DimensionMismatch("ClosedLoopSystem: feedback gain must be m x n");
  ClosedLoopSystem cls;
  const Mat Ct = transpose(shifted_sys.C);
  const Mat Pinv = inverse(shifted_sys.P);
  cls.Pinv_Ct = Pinv * Ct;
  cls.Pinv_CtC = cls.Pinv_Ct * shifted_sys.C;
  cls.x_star = x_star.dim() == shifted_sys.n ? x_star : ColVec(shifted_sys.n);
  cls.u_star = u_star.dim() == shifted_sys.m ? u_star : ColVec(shifted_sys.m);
  cls.sys = std::move(shifted_sys);
  cls.law = std::move(law);
  cls.gain = std::move(gain);
  return cls;
}

double ClosedLoopSystem::gain_value(const ColVec& xhat, const ColVec& y_err) const {
  if (gain.kind == GainPolicy::Kind::Constant) return gain.alpha;
  return adaptive_gain(*gain.W, xhat, y_err, sys.C, sys.P);
}

ColVec closed_loop_field(const ClosedLoopSystem& cls, const ColVec& z) {
  const int n = cls.sys.n;
  if (z.dim() != 2 * n) throw DimensionMismatch("closed_loop_field: dim(z) != 2n");
  ColVec x(n), xhat(n);
  for (int i = 0; i < n; ++i) {
    x[i] = z[i];
    xhat[i] = z[n + i];
  }
  const ColVec u = eval_feedback(cls.law, xhat);
  const Mat A = eval_A(cls.sys, u);
  const ColVec B = eval_B(cls.sys, u);
  const ColVec eps = xhat - x;
  const ColVec y_err = cls.sys.C * eps;
  const double alpha = cls.gain_value(xhat, y_err);
  const ColVec corr = alpha * (cls.Pinv_Ct * y_err);

  ColVec dz(2 * n);
  const ColVec xdot = A * x + B;
  const ColVec xhatdot = A * xhat + B - corr;
  for (int i = 0; i < n; ++i) {
    dz[i] = xdot[i];
    dz[n + i] = xhatdot[i];
  }
  return dz;
}

ColVec observer_error_field(const ClosedLoopSystem& cls, const ColVec& w) {
  const int n = cls.sys.n;
  if (w.dim() != 2 * n) throw DimensionMismatch("observer_error_field: dim != 2n");
  ColVec xhat(n), eps(n);
  for (int i = 0; i < n; ++i) {
    xhat[i] = w[i];
    eps[i] = w[n + i];
  }
  const ColVec u = eval_feedback(cls.law, xhat);
  const Mat A = eval_A(cls.sys, u);
  const ColVec B = eval_B(cls.sys, u);
  const ColVec y_err = cls.sys.C * eps;
  const double alpha = cls.gain_value(xhat, y_err);
  const ColVec corr = alpha * (cls.Pinv_Ct * y_err);

  ColVec dw(2 * n);
  const ColVec xhatdot = A * xhat + B - corr;
  const ColVec epsdot = A * eps - corr;
  for (int i = 0; i < n; ++i) {
    dw[i] = xhatdot[i];
    dw[n + i] = epsdot[i];
  }
  return dw;
}

Mat linearized_error_block(const ClosedLoopSystem& cls, double alpha) {
  return cls.sys.A0 - alpha * cls.Pinv_CtC;
}

Mat linearized_closed_loop(const ClosedLoopSystem& cls) {
  const int n = cls.sys.n;
  const double alpha0 = cls.gain_value(ColVec(n), ColVec(cls.sys.p));
  Mat L(2 * n, 2 * n);

  // xhat block: central finite difference of x -> A(lambda(x))x + B(lambda(x))
  const double step = 1e-6;
  for (int j = 0; j < n; ++j) {
    ColVec xp(n), xm(n);
    xp[j] = step;
    xm[j] = -step;
    const ColVec up = eval_feedback(cls.law, xp);
    const ColVec um = eval_feedback(cls.law, xm);
    const ColVec fp = eval_A(cls.sys, up) * xp + eval_B(cls.sys, up);
    const ColVec fm = eval_A(cls.sys, um) * xm + eval_B(cls.sys, um);
    for (int i = 0; i < n; ++i) L(i, j) = (fp[i] - fm[i]) / (2.0 * step);
  }
  const Mat eps_block = linearized_error_block(cls, alpha0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      L(i, n + j) = -alpha0 * cls.Pinv_CtC(i, j);
      L(n + i, n + j) = eps_block(i, j);
    }
  return L;
}

double lyapunov_V(const Mat& P, const ColVec& eps) { return dot(eps, P * eps); }

namespace {

// 4th-order first-derivative stencils on a uniform grid.
double deriv5(const std::vector<double>& v, size_t i, double dt) {
  const size_t n = v.size();
  auto at = [&](size_t k) { return v[k]; };
  if (i >= 2 && i + 2 < n) {
    return (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * dt);
  }
  if (i + 4 < n && i < 2) {
    // forward one-sided
    return (-25.0 * at(i) + 48.0 * at(i + 1) - 36.0 * at(i + 2) + 16.0 * at(i + 3) -
            3.0 * at(i + 4)) /
           (12.0 * dt);
  }
  // backward one-sided
  return (25.0 * at(i) - 48.0 * at(i - 1) + 36.0 * at(i - 2) - 16.0 * at(i - 3) +
          3.0 * at(i - 4)) /
         (12.0 * dt);
}

}  // namespace

std::vector<double> decay_residual(const Trajectory& traj, const ClosedLoopSystem&) {
  size_t len = traj.size();
  if (len >= 2) {
    // the final sample is recorded regardless of decimation and may sit at a
    // shorter spacing; drop it from the uniform-grid stencil if so
    const double dt = traj.times[1] - traj.times[0];
    const double last = traj.times[len - 1] - traj.times[len - 2];
    if (std::fabs(last - dt) > 1e-9 * dt) --len;
  }
  std::vector<double> res(len, 0.0);
  if (len < 5) return res;
  const double dt = traj.times[1] - traj.times[0];
  const std::vector<double> v(traj.v_series.begin(),
                              traj.v_series.begin() + static_cast<long>(len));
  for (size_t i = 0; i < len; ++i) {
    const double dvdt = deriv5(v, i, dt);
    const double ce = traj.y_err_series[i];
    res[i] = dvdt + 2.0 * traj.gain_series[i] * ce * ce;
  }
  return res;
}

}  // namespace dissiped
