#pragma once

// State-affine systems xdot = A(u)x + B(u) with input-affine coefficient
// maps, their equilibria, feedback laws and quadratic Lyapunov candidates.

#include <optional>
#include <utility>
#include <vector>

#include "dissiped/matrix.hpp"

namespace dissiped {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// The tuple (A0, {A_k}, B0, {B_k}, C, P, input box):
//   A(u) = A0 + sum_k u_k A_k,   B(u) = B0 + sum_k u_k B_k,   y = Cx,
// with P symmetric positive definite certifying dissipativity.
struct InputAffineSystem {
  int n = 0;
  int m = 0;
  int p = 0;
  Mat A0;
  std::vector<Mat> A_coeff;   // m matrices, n x n
  ColVec B0;
  std::vector<ColVec> B_coeff;  // m vectors
  Mat C;                       // p x n
  Mat P;                       // n x n
  std::vector<Interval> input_box;  // m channels

  // Validates all dimension couplings, P positive definite, lo <= hi.
  void validate() const;
};

struct Equilibrium {
  ColVec x_star;
  ColVec u_star;
  double residual = 0.0;
};

enum class FeedbackVariant { LinearUnsaturated, LinearSaturated, Constant };

// lambda(x) = clamp(gain*x + offset, sat_lo, sat_hi) for the saturated
// variant, gain*x for the unsaturated one, offset alone for Constant.
// The linear variants have offset = 0 so that lambda(0) = 0.
struct FeedbackLaw {
  FeedbackVariant variant = FeedbackVariant::LinearUnsaturated;
  Mat gain;        // m x n
  ColVec offset;   // m
  ColVec sat_lo;   // m (saturated variant only)
  ColVec sat_hi;   // m

  static FeedbackLaw linear(Mat gain_mxn);
  static FeedbackLaw saturated(Mat gain_mxn, ColVec lo, ColVec hi);
  static FeedbackLaw constant(ColVec offset_m);
};

// W(x) = scale * x'Qx, grad W(x) = 2 * scale * Qx.
struct LyapunovSpec {
  Mat Q;
  double scale = 1.0;

  double value(const ColVec& x) const;
  ColVec gradient(const ColVec& x) const;
  void validate() const;  // Q positive definite, scale > 0
};

Mat eval_A(const InputAffineSystem& sys, const ColVec& u);
ColVec eval_B(const InputAffineSystem& sys, const ColVec& u);
ColVec eval_feedback(const FeedbackLaw& law, const ColVec& x);

/// x* = solve(A(u*), -B(u*)); throws SingularMatrix when the requested
/// operating point is not a unique equilibrium. The recorded residual
/// ||A(u*)x* + B(u*)||_inf is checked against 1e-9 * scale.
Equilibrium compute_equilibrium(const InputAffineSystem& sys, const ColVec& u_star);

/// Shifts to error coordinates xbar = x - x*, ubar = u - u*:
///   Abar0 = A(u*), Abar_k = A_k, Bbar0 = 0, Bbar_k = A_k x* + B_k,
/// input box shifted by -u*. Satisfies
///   Abar(ubar) xbar + Bbar(ubar) = A(u*+ubar)(xbar+x*) + B(u*+ubar).
InputAffineSystem shift_to_error_coordinates(const InputAffineSystem& sys,
                                             const Equilibrium& eq);

}  // namespace dissiped
