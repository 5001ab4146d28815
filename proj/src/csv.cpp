#include "dissiped/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dissiped {

namespace {

void append_num(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += ',';
  line += buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  std::string header = "t";
  for (int i = 1; i <= traj.n; ++i) header += ",x_" + std::to_string(i);
  for (int i = 1; i <= traj.n; ++i) header += ",xhat_" + std::to_string(i);
  for (int i = 1; i <= traj.m; ++i) header += ",u_" + std::to_string(i);
  for (int i = 1; i <= traj.p; ++i) header += ",y_" + std::to_string(i);
  header += ",V_eps,err_norm,alpha\n";
  os << header;

  char buf[40];
  for (size_t k = 0; k < traj.size(); ++k) {
    std::string line;
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[k]);
    line += buf;
    for (int i = 0; i < 2 * traj.n; ++i) append_num(line, traj.states[k][i]);
    for (int i = 0; i < traj.m; ++i) append_num(line, traj.inputs[k][i]);
    for (int i = 0; i < traj.p; ++i) append_num(line, traj.outputs[k][i]);
    append_num(line, traj.v_series[k]);
    append_num(line, traj.err_series[k]);
    append_num(line, traj.gain_series[k]);
    line += '\n';
    os << line;
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_trajectory_csv(os, traj);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("csv: empty file");

  // column counts from the header names
  int n = 0, m = 0, p = 0;
  {
    std::stringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("x_", 0) == 0) ++n;
      else if (col.rfind("u_", 0) == 0) ++m;
      else if (col.rfind("y_", 0) == 0) ++p;
    }
  }
  Trajectory traj;
  traj.n = n;
  traj.m = m;
  traj.p = p;

  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    const size_t expect = 1 + 2 * static_cast<size_t>(n) + m + p + 3;
    if (vals.size() != expect) throw std::runtime_error("csv: wrong column count");
    size_t i = 0;
    traj.times.push_back(vals[i++]);
    ColVec st(2 * n);
    for (int k = 0; k < 2 * n; ++k) st[k] = vals[i++];
    traj.states.push_back(std::move(st));
    ColVec u(m);
    for (int k = 0; k < m; ++k) u[k] = vals[i++];
    traj.inputs.push_back(std::move(u));
    ColVec y(p);
    for (int k = 0; k < p; ++k) y[k] = vals[i++];
    traj.outputs.push_back(std::move(y));
    traj.v_series.push_back(vals[i++]);
    traj.err_series.push_back(vals[i++]);
    traj.gain_series.push_back(vals[i++]);
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_trajectory_csv(is);
}

}  // namespace dissiped
