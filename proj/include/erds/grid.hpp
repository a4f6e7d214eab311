#pragma once

// 1-D cell-centered grid, state fields, and trajectory bookkeeping.

#include <limits>
#include <vector>

#include "erds/entropy.hpp"

namespace erds {

struct Grid1D {
  int cells = 64;
  double length = 1.0; // |Omega| = 1 unless overridden

  void validate() const {
    if (cells < 1) throw std::invalid_argument("grid: cells must be >= 1");
    if (length <= 0.0) throw std::invalid_argument("grid: length must be > 0");
  }
  double dx() const { return length / cells; }
  double x_center(int j) const { return (j + 0.5) * dx(); }
};

struct StateField {
  Grid1D grid;
  Mat values; // J x (1+n), row j = (u_j, c_1j .. c_nj)

  StateField() = default;
  StateField(const Grid1D& g, int n) : grid(g), values(Mat::Zero(g.cells, 1 + n)) {}

  int n() const { return static_cast<int>(values.cols()) - 1; }
  Vec cell(int j) const { return values.row(j).transpose(); }
};

struct SeriesRow {
  double t = 0.0;
  double dt = 0.0;
  double H = 0.0;
  double energy = 0.0;      // integral of u
  std::vector<double> masses;
  double G = 0.0;           // half the squared L2 norm of u
  double cumP = 0.0;        // cumulative dissipation integral
  double cumRDh = 0.0;      // cumulative reaction dissipation integral
  double cum_ene_a = 0.0;   // cumulative a|grad u|^2 integral
  double cum_ene_m = 0.0;   // cumulative remainder of the energy face flux
  double min_u = 0.0;
  long floor_count = 0;
  double dist = std::numeric_limits<double>::quiet_NaN(); // set by experiments
};

struct Trajectory {
  std::vector<double> times;       // snapshot times
  std::vector<StateField> states;  // snapshots (stride configurable)
  std::vector<SeriesRow> series;   // one row per accepted step plus the initial row
  long total_floor_activations = 0;
};

} // namespace erds
