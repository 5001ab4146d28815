#pragma once

// Coupled plant/observer vector field with constant or output-dependent
// observer gain, its linearization at the origin, and Lyapunov diagnostics.

#include <optional>
#include <vector>

#include "dissiped/analysis.hpp"
#include "dissiped/system.hpp"

namespace dissiped {

struct GainPolicy {
  enum class Kind { Constant, Adaptive };
  Kind kind = Kind::Constant;
  double alpha = 1.0;               // Constant
  std::optional<LyapunovSpec> W;    // Adaptive

  static GainPolicy constant(double alpha);
  static GainPolicy adaptive(LyapunovSpec W);
};

// Plant + observer + gain policy, all in shifted coordinates (the origin is
// the target equilibrium). The simulation state is z = (x, xhat), 2n wide;
// eps = xhat - x.
struct ClosedLoopSystem {
  InputAffineSystem sys;   // shifted coordinates
  FeedbackLaw law;
  GainPolicy gain;
  Mat Pinv_CtC;            // precomputed P^{-1} C'C
  Mat Pinv_Ct;             // precomputed P^{-1} C'
  ColVec x_star;           // physical offset, for reporting only
  ColVec u_star;

  static ClosedLoopSystem assemble(InputAffineSystem shifted_sys, FeedbackLaw law,
                                   GainPolicy gain, ColVec x_star = {},
                                   ColVec u_star = {});

  // alpha used at the given observer state / output error
  double gain_value(const ColVec& xhat, const ColVec& y_err) const;
};

/// Field of the coupled loop in z = (x, xhat):
///   u = lambda(xhat),
///   xdot    = A(u) x    + B(u),
///   xhatdot = A(u) xhat + B(u) - alpha P^{-1}C'C (xhat - x).
ColVec closed_loop_field(const ClosedLoopSystem& cls, const ColVec& z);

/// Field of the same loop written directly in (xhat, eps); serves as the
/// coordinate-equivalence oracle for closed_loop_field.
ColVec observer_error_field(const ClosedLoopSystem& cls, const ColVec& w);

/// 2n x 2n linearization at the origin in (xhat, eps) coordinates:
///   [ J_xhat   -alpha P^{-1}C'C ]
///   [ 0         A0 - alpha P^{-1}C'C ]
/// The eps block is exact; J_xhat = d/dx [A(lambda(x))x + B(lambda(x))] at 0
/// is evaluated by central finite differences. Adaptive gain uses alpha(0,0).
Mat linearized_closed_loop(const ClosedLoopSystem& cls);

/// Exact eps-block A0 - alpha P^{-1}C'C of the linearization.
Mat linearized_error_block(const ClosedLoopSystem& cls, double alpha);

/// V(eps) = eps'P eps.
double lyapunov_V(const Mat& P, const ColVec& eps);

struct Trajectory;  // sim.hpp

/// Per-sample finite-difference residual dV/dt + 2 alpha |C eps|^2 of a
/// recorded trajectory; the decay inequality makes it <= 0 up to integrator
/// and differencing error. Uses 5-point 4th-order stencils (one-sided at the
/// ends); lower-order differencing cannot resolve the default tolerance.
std::vector<double> decay_residual(const Trajectory& traj, const ClosedLoopSystem& cls);

}  // namespace dissiped
