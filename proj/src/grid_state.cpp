#include "dirac1d/grid_state.hpp"

#include <cmath>
#include <string>

namespace dirac1d {

Grid1D::Grid1D(double z_min, double z_max, std::size_t n_cells)
    : z_min_(z_min), z_max_(z_max), n_cells_(n_cells), dz_(0.0) {
  if (!std::isfinite(z_min) || !std::isfinite(z_max) || !(z_max > z_min)) {
    throw std::invalid_argument("Grid1D: extent must be positive and finite");
  }
  if (n_cells < 2) {
    throw std::invalid_argument("Grid1D: need at least 2 cells");
  }
  dz_ = (z_max - z_min) / static_cast<double>(n_cells);
}

std::size_t Grid1D::snap_boundary(double z) const {
  const double x = (z - z_min_) / dz_;
  if (!(x >= -0.5) || !(x <= static_cast<double>(n_cells_) + 0.5)) {
    throw std::invalid_argument("snap_boundary: z = " + std::to_string(z) +
                                " is outside the grid");
  }
  return clamp_boundary(z);
}

std::size_t Grid1D::clamp_boundary(double z) const {
  const double x = std::round((z - z_min_) / dz_);
  if (!(x > 0.0)) return 0;
  if (x >= static_cast<double>(n_cells_)) return n_cells_;
  return static_cast<std::size_t>(x);
}

Grid1D make_grid(double z_min, double z_max, std::size_t n_cells) {
  return Grid1D(z_min, z_max, n_cells);
}

SpinorField::SpinorField(const Grid1D& g, double t)
    : grid(g), f(g.n_cells()), h(g.n_cells()), time(t) {}

SpinorField::SpinorField(const Grid1D& g, std::vector<cplx> f_in,
                         std::vector<cplx> h_in, double t)
    : grid(g), f(std::move(f_in)), h(std::move(h_in)), time(t) {
  if (f.size() != g.n_cells() || h.size() != g.n_cells()) {
    throw std::invalid_argument("SpinorField: component length != n_cells");
  }
}

double SpinorField::norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::norm(f[i]) + std::norm(h[i]);
  return s * grid.dz();
}

cplx SpinorField::inner(const SpinorField& other) const {
  if (!(grid == other.grid)) throw std::invalid_argument("inner: grid mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += std::conj(f[i]) * other.f[i] + std::conj(h[i]) * other.h[i];
  }
  return s * grid.dz();
}

SpinorField& SpinorField::operator+=(const SpinorField& other) {
  if (!(grid == other.grid)) throw std::invalid_argument("operator+: grid mismatch");
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] += other.f[i];
    h[i] += other.h[i];
  }
  return *this;
}

SpinorField& SpinorField::operator*=(cplx s) {
  for (auto& x : f) x *= s;
  for (auto& x : h) x *= s;
  return *this;
}

SpinorField operator+(SpinorField a, const SpinorField& b) { return a += b; }
SpinorField operator*(cplx s, SpinorField a) { return a *= s; }

double positive_energy_ratio(double k, double mass) {
  const double energy = std::hypot(k, mass);
  const double denom = energy + mass;
  if (denom == 0.0) return 0.0;
  return -k / denom;
}

namespace {

void normalize(SpinorField& s) {
  const double n = s.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("packet has zero or non-finite norm on this grid");
  }
  s *= 1.0 / std::sqrt(n);
}

void check_packet(const PacketSpec& spec) {
  if (!(spec.width > 0.0)) throw std::invalid_argument("packet width must be > 0");
  if (!(spec.mass >= 0.0)) throw std::invalid_argument("packet mass must be >= 0");
}

}  // namespace

SpinorField gaussian_packet(const PacketSpec& spec, const Grid1D& grid) {
  if (spec.kind != PacketKind::gaussian) {
    throw std::invalid_argument("gaussian_packet: spec.kind must be gaussian");
  }
  check_packet(spec);
  // Continuum mass of exp(-x^2/w^2)/(sqrt(pi) w) outside the grid.
  const double outside = 0.5 * std::erfc((spec.z0 - grid.z_min()) / spec.width) +
                         0.5 * std::erfc((grid.z_max() - spec.z0) / spec.width);
  if (!(outside < 1e-12)) {
    throw std::invalid_argument("gaussian_packet: grid too narrow, truncated mass " +
                                std::to_string(outside));
  }
  const double ratio = positive_energy_ratio(spec.k0, spec.mass);
  SpinorField s(grid);
  for (std::size_t i = 0; i < grid.n_cells(); ++i) {
    const double z = grid.center(static_cast<std::ptrdiff_t>(i));
    const double x = (z - spec.z0) / spec.width;
    s.f[i] = std::polar(std::exp(-0.5 * x * x), spec.k0 * z);
    s.h[i] = ratio * s.f[i];
  }
  normalize(s);
  return s;
}

SpinorField compact_packet(const PacketSpec& spec, double z_l, double z_r,
                           const Grid1D& grid) {
  if (!(z_l < z_r)) throw std::invalid_argument("compact_packet: empty support");
  if (z_l < grid.z_min() || z_r > grid.z_max()) {
    throw std::invalid_argument("compact_packet: support outside grid");
  }
  if (!(spec.mass >= 0.0)) throw std::invalid_argument("packet mass must be >= 0");
  const double ratio = positive_energy_ratio(spec.k0, spec.mass);
  const double mid = 0.5 * (z_l + z_r);
  const double half = 0.5 * (z_r - z_l);
  SpinorField s(grid);
  bool any = false;
  for (std::size_t i = 0; i < grid.n_cells(); ++i) {
    const double z = grid.center(static_cast<std::ptrdiff_t>(i));
    if (!(z > z_l && z < z_r)) continue;
    const double x = (z - mid) / half;
    const double a = std::exp(-1.0 / (1.0 - x * x));
    if (a == 0.0) continue;
    s.f[i] = std::polar(a, spec.k0 * z);
    s.h[i] = ratio * s.f[i];
    any = true;
  }
  if (!any) throw std::invalid_argument("compact_packet: support contains no cell centre");
  normalize(s);
  return s;
}

SpinorField cut(const SpinorField& state, double q, CutSide side) {
  const std::size_t b = state.grid.snap_boundary(q);
  SpinorField out(state.grid, state.time);
  const std::size_t lo = side == CutSide::left ? 0 : b;
  const std::size_t hi = side == CutSide::left ? b : state.size();
  for (std::size_t i = lo; i < hi; ++i) {
    out.f[i] = state.f[i];
    out.h[i] = state.h[i];
  }
  return out;
}

}  // namespace dirac1d
