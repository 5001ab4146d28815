#include "dissiped/system.hpp"

#include <algorithm>
#include <cmath>

namespace dissiped {

void InputAffineSystem::validate() const {
  if (n <= 0 || m <= 0 || p <= 0)
    throw DimensionMismatch("system: n, m, p must be positive");
  if (n > kMaxDim) throw DimensionMismatch("system: n exceeds the supported size (16)");
  auto square_n = [&](const Mat& M, const char* what) {
    if (M.rows != n || M.cols != n) throw DimensionMismatch(what);
  };
  square_n(A0, "system: A0 must be n x n");
  square_n(P, "system: P must be n x n");
  if (static_cast<int>(A_coeff.size()) != m)
    throw DimensionMismatch("system: need m A-coefficients");
  for (const Mat& Ak : A_coeff) square_n(Ak, "system: A_coeff must be n x n");
  if (B0.dim() != n) throw DimensionMismatch("system: B0 must have dim n");
  if (static_cast<int>(B_coeff.size()) != m)
    throw DimensionMismatch("system: need m B-coefficients");
  for (const ColVec& bk : B_coeff)
    if (bk.dim() != n) throw DimensionMismatch("system: B_coeff must have dim n");
  if (C.rows != p || C.cols != n) throw DimensionMismatch("system: C must be p x n");
  if (static_cast<int>(input_box.size()) != m)
    throw DimensionMismatch("system: input_box needs one interval per channel");
  for (const Interval& iv : input_box)
    if (!(iv.lo <= iv.hi)) throw DimensionMismatch("system: input_box lo > hi");
  if (!is_positive_definite(P))
    throw std::invalid_argument("system: P is not positive definite");
}

FeedbackLaw FeedbackLaw::linear(Mat gain_mxn) {
  FeedbackLaw law;
  law.variant = FeedbackVariant::LinearUnsaturated;
  law.offset = ColVec(gain_mxn.rows);
  law.gain = std::move(gain_mxn);
  return law;
}

FeedbackLaw FeedbackLaw::saturated(Mat gain_mxn, ColVec lo, ColVec hi) {
  FeedbackLaw law;
  law.variant = FeedbackVariant::LinearSaturated;
  law.offset = ColVec(gain_mxn.rows);
  law.gain = std::move(gain_mxn);
  for (int k = 0; k < lo.dim(); ++k) {
    // lambda(0) = 0 must survive the clamp
    if (!(lo[k] < 0.0 && 0.0 < hi[k]))
      throw std::invalid_argument("saturated law: need sat_lo < 0 < sat_hi");
  }
  law.sat_lo = std::move(lo);
  law.sat_hi = std::move(hi);
  return law;
}

FeedbackLaw FeedbackLaw::constant(ColVec offset_m) {
  FeedbackLaw law;
  law.variant = FeedbackVariant::Constant;
  law.offset = std::move(offset_m);
  return law;
}

double LyapunovSpec::value(const ColVec& x) const { return scale * dot(x, Q * x); }

ColVec LyapunovSpec::gradient(const ColVec& x) const { return (2.0 * scale) * (Q * x); }

void LyapunovSpec::validate() const {
  if (!(scale > 0.0)) throw std::invalid_argument("LyapunovSpec: scale must be > 0");
  if (!is_positive_definite(Q))
    throw std::invalid_argument("LyapunovSpec: Q is not positive definite");
}

Mat eval_A(const InputAffineSystem& sys, const ColVec& u) {
  if (u.dim() != sys.m) throw DimensionMismatch("eval_A: input dim != m");
  Mat A = sys.A0;
  for (int k = 0; k < sys.m; ++k) {
    const double uk = u[k];
    if (uk == 0.0) continue;
    const Mat& Ak = sys.A_coeff[static_cast<size_t>(k)];
    for (size_t i = 0; i < A.a.size(); ++i) A.a[i] += uk * Ak.a[i];
  }
  return A;
}

ColVec eval_B(const InputAffineSystem& sys, const ColVec& u) {
  if (u.dim() != sys.m) throw DimensionMismatch("eval_B: input dim != m");
  ColVec b = sys.B0;
  for (int k = 0; k < sys.m; ++k) {
    const double uk = u[k];
    if (uk == 0.0) continue;
    const ColVec& bk = sys.B_coeff[static_cast<size_t>(k)];
    for (int i = 0; i < b.dim(); ++i) b[i] += uk * bk[i];
  }
  return b;
}

ColVec eval_feedback(const FeedbackLaw& law, const ColVec& x) {
  if (law.variant == FeedbackVariant::Constant) return law.offset;
  if (law.gain.cols != x.dim()) throw DimensionMismatch("eval_feedback: state dim mismatch");
  ColVec u = law.gain * x;
  if (law.variant == FeedbackVariant::LinearSaturated) {
    for (int k = 0; k < u.dim(); ++k)
      u[k] = std::clamp(u[k], law.sat_lo[k], law.sat_hi[k]);
  }
  return u;
}

Equilibrium compute_equilibrium(const InputAffineSystem& sys, const ColVec& u_star) {
  const Mat A = eval_A(sys, u_star);
  const ColVec B = eval_B(sys, u_star);
  Equilibrium eq;
  eq.u_star = u_star;
  eq.x_star = solve_linear(A, -1.0 * B);
  eq.residual = norm_inf(A * eq.x_star + B);
  const double scale =
      std::max({1.0, norm_inf(A) * norm_inf(eq.x_star), norm_inf(B)});
  if (eq.residual > 1e-9 * scale)
    throw SingularMatrix("compute_equilibrium: residual exceeds 1e-9 * scale");
  return eq;
}

InputAffineSystem shift_to_error_coordinates(const InputAffineSystem& sys,
                                             const Equilibrium& eq) {
  if (eq.x_star.dim() != sys.n || eq.u_star.dim() != sys.m)
    throw DimensionMismatch("shift: equilibrium dims do not match the system");
  InputAffineSystem out = sys;
  out.A0 = eval_A(sys, eq.u_star);
  out.B0 = ColVec(sys.n);  // exact zero: (x*, u*) is the origin of the new chart
  for (int k = 0; k < sys.m; ++k) {
    out.B_coeff[static_cast<size_t>(k)] =
        sys.A_coeff[static_cast<size_t>(k)] * eq.x_star + sys.B_coeff[static_cast<size_t>(k)];
  }
  for (int k = 0; k < sys.m; ++k) {
    out.input_box[static_cast<size_t>(k)].lo -= eq.u_star[k];
    out.input_box[static_cast<size_t>(k)].hi -= eq.u_star[k];
  }
  return out;
}

}  // namespace dissiped
