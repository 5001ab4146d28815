#pragma once

#include <stdexcept>
#include <string>

namespace dissiped {

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by the integrator when a state component leaves the finite range.
struct NonFiniteState : std::runtime_error {
  double blow_up_time;
  NonFiniteState(const std::string& msg, double t)
      : std::runtime_error(msg), blow_up_time(t) {}
};

struct NotStrictLyapunov : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DetectabilityViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownMetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dissiped
