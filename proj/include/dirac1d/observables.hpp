#pragma once

#include <optional>
#include <vector>

#include "dirac1d/dynamics.hpp"
#include "dirac1d/grid_state.hpp"

namespace dirac1d {

/// Probability density j0 = |f|^2 + |h|^2 and flux jz = -(f* h + h* f).
struct CurrentField {
  Grid1D grid;
  std::vector<double> j0;
  std::vector<double> jz;
  double time = 0.0;
};

CurrentField current(const SpinorField& state);

/// A spatial region whose ends are snapped to cell boundaries.
struct Region {
  enum class Kind { above, below, between };
  Kind kind;
  double a = 0.0;
  double b = 0.0;

  static Region above(double q) { return {Kind::above, q, 0.0}; }
  static Region below(double q) { return {Kind::below, q, 0.0}; }
  static Region between(double lo, double hi) { return {Kind::between, lo, hi}; }
};

/// Half-open cell range [first, last) covered by a region.
struct CellRange {
  std::size_t first = 0;
  std::size_t last = 0;
  double z_lo = 0.0;  // snapped ends
  double z_hi = 0.0;
  bool empty() const { return last <= first; }
};

/// Region ends outside the grid are clamped to the nearest grid end.
CellRange snap_region(const Grid1D& grid, const Region& region);

double probability(const CurrentField& current, const Region& region);
double probability(const SpinorField& state, const Region& region);

/// Sum of j0 dz over cells [first, last).
double probability_cells(const CurrentField& current, std::size_t first, std::size_t last);

/// Suffix sums: out[b] = probability of cells >= b, b in [0, n_cells].
std::vector<double> right_tail_probabilities(const CurrentField& current);

/// jz / j0 where j0 >= floor, nullopt elsewhere.
std::vector<std::optional<double>> velocity(const CurrentField& current, double floor);

/// 1e-30 of the peak density, or the smallest normal double for a zero field.
double default_velocity_floor(const CurrentField& current);

/// Largest |jz| - j0 over the cells (<= 0 for a timelike current).
double max_spacelike_excess(const CurrentField& current);

/// max over interior cells and interior snapshots of
/// |(j0[n+1] - j0[n-1]) / 2dt + (jz[i+1] - jz[i-1]) / 2dz|.
/// Requires a history recorded with stride 1.
double continuity_residual(const History& history);

}  // namespace dirac1d
