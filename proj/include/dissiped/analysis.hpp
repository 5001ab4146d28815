#pragma once

// Numerical certification of the three standing assumptions: dissipativity
// of the symmetric part over the input box, target detectability (Hautus),
// observability / singular-input location, plus the constant-gain bound
// alpha0 and the output-dependent adaptive gain.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dissiped/system.hpp"

namespace dissiped {

struct DissipativityResult {
  bool pass = false;
  ColVec worst_input;
  double worst_eig = 0.0;
  double vertex_worst_eig = 0.0;  // worst over the 2^m box vertices alone
};

struct DetectabilityResult {
  bool pass = false;
  std::optional<ComplexScalar> offending_eigenvalue;
};

struct SingularScanPoint {
  ColVec u;
  double value = 0.0;  // det for square stacks, else smallest singular value
};

struct SingularScanResult {
  std::vector<SingularScanPoint> points;
  std::vector<ColVec> candidates;  // refined singular-input locations
  bool used_determinant = false;
};

struct ObservabilityResult {
  int rank = 0;
  std::optional<double> det;  // square stacks only
  std::vector<ColVec> singular_inputs_found;
};

struct AnalysisReport {
  DissipativityResult dissipativity;
  DetectabilityResult detectability;
  ObservabilityResult observability;
  std::optional<double> alpha0;
  std::vector<std::string> notes;
};

// Boxes for the initial sets: K1 (observer states) and K2 (errors).
struct CompactBox {
  std::vector<Interval> iv;

  int dim() const { return static_cast<int>(iv.size()); }
  static CompactBox cube(int n, double half_width);
  std::vector<ColVec> vertices() const;  // 2^n corners
};

/// Worst eigenvalue of sym(P A(u) + A(u)'P) over a uniform grid on the input
/// box (endpoints included) plus all 2^m vertices; for input-affine A the
/// symmetric part is affine in u, so the vertex check is exact and the grid
/// is diagnostics. Pass iff the worst value <= tol.
DissipativityResult check_dissipativity(const InputAffineSystem& sys,
                                        int u_samples = 33, double tol = 1e-9);

/// Hautus test: for every eigenvalue of A0 with Re >= -tol the stack
/// [A0 - lambda I; C] must have full column rank (complex eigenvalues use
/// the real 2n embedding [[A-aI, bI], [-bI, A-aI], [C, 0], [0, C]]).
DetectabilityResult check_detectability(const Mat& C, const Mat& A0, double tol = 1e-9);

/// The np x n stack [C; CA; ...; CA^{n-1}].
Mat observability_matrix(const Mat& C, const Mat& A);

/// Scalar-input scan of det (or smallest singular value) of the
/// observability stack over the input box; near-zero grid points
/// (below 1e-9 * grid max) are refined to 1e-12 interval width.
SingularScanResult scan_singular_inputs(const InputAffineSystem& sys, int grid = 200);

struct Alpha0Breakdown {
  double R = 0.0;
  double rho = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  double alpha0 = 0.0;
};

/// Sampling estimate of the constant-gain bound
///   alpha0 = -M1 / (R * M2 * |P^{-1}| * |C|^2)
/// with R = mu_max(P) * sup_{K2} e'Pe, rho the 5%-inflated smallest sublevel
/// of W containing K1, M1 = sup_{bd D(rho)} L_f W and M2 = 1 + sup |grad W|.
/// Level-set samples always include the axis directions. Throws
/// NotStrictLyapunov when the sampled M1 >= -1e-12.
Alpha0Breakdown estimate_alpha0(const InputAffineSystem& shifted, const FeedbackLaw& law,
                                const LyapunovSpec& W, const CompactBox& K1,
                                const CompactBox& K2, int samples = 2000,
                                std::uint64_t seed = 0);

/// Output-dependent observer gain
///   alpha(xhat, y) = max{W(xhat), 1} / (2 (1 + |grad W(xhat)|)(1 + |P^{-1}C'y|)),
/// strictly positive and locally Lipschitz.
double adaptive_gain(const LyapunovSpec& W, const ColVec& xhat, const ColVec& y_err,
                     const Mat& C, const Mat& P);

}  // namespace dissiped
