#include "dirac1d/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dirac1d {

CurrentField current(const SpinorField& state) {
  CurrentField c{state.grid, std::vector<double>(state.size()),
                 std::vector<double>(state.size()), state.time};
  for (std::size_t i = 0; i < state.size(); ++i) {
    const cplx f = state.f[i], h = state.h[i];
    c.j0[i] = std::norm(f) + std::norm(h);
    // f* h + h* f = 2 Re(f* h)
    c.jz[i] = -2.0 * (f.real() * h.real() + f.imag() * h.imag());
  }
  return c;
}

CellRange snap_region(const Grid1D& grid, const Region& region) {
  CellRange r;
  switch (region.kind) {
    case Region::Kind::above:
      r.first = grid.clamp_boundary(region.a);
      r.last = grid.n_cells();
      break;
    case Region::Kind::below:
      r.first = 0;
      r.last = grid.clamp_boundary(region.a);
      break;
    case Region::Kind::between:
      r.first = grid.clamp_boundary(region.a);
      r.last = grid.clamp_boundary(region.b);
      break;
  }
  if (r.last < r.first) r.last = r.first;
  r.z_lo = grid.boundary(static_cast<std::ptrdiff_t>(r.first));
  r.z_hi = grid.boundary(static_cast<std::ptrdiff_t>(r.last));
  return r;
}

double probability_cells(const CurrentField& current, std::size_t first, std::size_t last) {
  last = std::min(last, current.j0.size());
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) s += current.j0[i];
  return s * current.grid.dz();
}

double probability(const CurrentField& current, const Region& region) {
  const CellRange r = snap_region(current.grid, region);
  if (r.empty()) return 0.0;
  return probability_cells(current, r.first, r.last);
}

double probability(const SpinorField& state, const Region& region) {
  return probability(current(state), region);
}

std::vector<double> right_tail_probabilities(const CurrentField& current) {
  const std::size_t n = current.j0.size();
  std::vector<double> tail(n + 1, 0.0);
  double s = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    s += current.j0[i];
    tail[i] = s * current.grid.dz();
  }
  return tail;
}

std::vector<std::optional<double>> velocity(const CurrentField& current, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("velocity: floor must be > 0");
  std::vector<std::optional<double>> v(current.j0.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (current.j0[i] >= floor) v[i] = current.jz[i] / current.j0[i];
  }
  return v;
}

double default_velocity_floor(const CurrentField& current) {
  const double peak = current.j0.empty()
                          ? 0.0
                          : *std::max_element(current.j0.begin(), current.j0.end());
  return std::max(1e-30 * peak, std::numeric_limits<double>::min());
}

double max_spacelike_excess(const CurrentField& current) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < current.j0.size(); ++i) {
    worst = std::max(worst, std::abs(current.jz[i]) - current.j0[i]);
  }
  return worst;
}

double continuity_residual(const History& history) {
  if (history.stride != 1) {
    throw std::invalid_argument("continuity_residual: history stride must be 1");
  }
  const std::size_t n_snap = history.snapshots.size();
  if (n_snap < 3) return 0.0;
  const double dt = history.cfg.dt;
  const double dz = history.grid().dz();
  std::vector<CurrentField> cur;
  cur.reserve(n_snap);
  for (const auto& s : history.snapshots) cur.push_back(current(s));
  double worst = 0.0;
  const std::size_t n_cells = history.grid().n_cells();
  for (std::size_t n = 1; n + 1 < n_snap; ++n) {
    for (std::size_t i = 1; i + 1 < n_cells; ++i) {
      const double r = (cur[n + 1].j0[i] - cur[n - 1].j0[i]) / (2.0 * dt) +
                       (cur[n].jz[i + 1] - cur[n].jz[i - 1]) / (2.0 * dz);
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

}  // namespace dirac1d
