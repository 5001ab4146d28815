#pragma once

// Trajectory CSV writer/reader. Fixed column order:
//   t, x_1..x_n, xhat_1..xhat_n, u_1..u_m, y_1..y_p, V_eps, err_norm, alpha
// Values are serialized with 17 significant digits so parsing an emitted
// file reproduces the in-memory series.

#include <iosfwd>
#include <string>

#include "dissiped/sim.hpp"

namespace dissiped {

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Parses a CSV produced by write_trajectory_csv. The shifted diagnostic
/// series y_err is not in the file and is left empty.
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace dissiped
