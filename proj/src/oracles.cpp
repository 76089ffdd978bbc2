#include "dirac1d/oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "dirac1d/observables.hpp"

namespace dirac1d {

SpinorField massless_exact(const Profile& a, const Profile& b, double t, const Grid1D& grid) {
  SpinorField s(grid, t);
  const double cells = t / grid.dz();
  const double whole = std::round(cells);
  const bool on_lattice = std::abs(cells - whole) <= 1e-9 * std::max(1.0, std::abs(cells));
  const auto shift = static_cast<std::ptrdiff_t>(whole);
  for (std::size_t i = 0; i < grid.n_cells(); ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    cplx left, right;
    if (on_lattice) {
      left = a(grid.center(ii + shift));
      right = b(grid.center(ii - shift));
    } else {
      const double z = grid.center(ii);
      left = a(z + t);
      right = b(z - t);
    }
    s.f[i] = left + right;
    s.h[i] = left - right;
  }
  return s;
}

// --- fringe -----------------------------------------------------------------

FringeSpec::FringeSpec(double k_in, double p_in) : k(k_in), p(p_in) {
  if (!(p > k && k > 0.0)) throw std::invalid_argument("FringeSpec: need p > k > 0");
}

FringeResult fringe_demo(const FringeSpec& spec, const Grid1D& grid, std::size_t n_steps) {
  const double dz = grid.dz();
  const double q = spec.p - spec.k;  // fringe wavenumber
  const double wavelength = 2.0 * std::numbers::pi / q;
  if (wavelength < 8.0 * dz || spec.p * dz > 1.0) {
    throw std::invalid_argument("fringe_demo: fringe or carrier unresolved by the grid");
  }
  const std::size_t n_cells = grid.n_cells();
  const std::size_t margin = 2 * n_steps;
  if (2 * margin >= n_cells) throw std::invalid_argument("fringe_demo: grid too short for n_steps");
  // Trim the window to a whole number of fringe wavelengths.
  const double raw = static_cast<double>(n_cells - 2 * margin) * dz;
  const double fringes = std::floor(raw / wavelength);
  if (fringes < 1.0) throw std::invalid_argument("fringe_demo: window shorter than one fringe");
  const auto width = static_cast<std::size_t>(std::lround(fringes * wavelength / dz));
  FringeResult out;
  out.window_first = margin + (n_cells - 2 * margin - width) / 2;
  out.window_last = out.window_first + width;

  const double k = spec.k, p = spec.p;
  const Profile a = [k](double z) { return std::polar(1.0, k * z); };
  const Profile b = [p](double z) { return std::polar(1.0, p * z); };
  const SpinorField initial = massless_exact(a, b, 0.0, grid);

  SchemeConfig cfg = SchemeConfig::for_grid(grid, 0.0);
  cfg.boundary_mass_limit = std::numeric_limits<double>::infinity();
  const double drift = (p + k) / (p - k);

  std::vector<double> times, positions;
  double unwrapped = 0.0, last_phase = 0.0;
  propagate(initial, Potential(grid), n_steps, cfg, 1, [&](const SpinorField& s, std::size_t) {
    const CurrentField cur = current(s);
    const double floor = default_velocity_floor(cur);
    cplx moment = 0.0;
    for (std::size_t i = out.window_first; i < out.window_last; ++i) {
      const double z = grid.center(static_cast<std::ptrdiff_t>(i));
      const double dens = std::norm(s.f[i]);
      moment += dens * std::polar(1.0, -q * z);
      const double c = std::cos(0.5 * q * (z - drift * s.time));
      out.fringe_density_formula_residual =
          std::max(out.fringe_density_formula_residual, std::abs(dens - 4.0 * c * c));
      if (cur.j0[i] >= floor) {
        out.max_abs_prob_velocity =
            std::max(out.max_abs_prob_velocity, std::abs(cur.jz[i] / cur.j0[i]));
      }
    }
    // |f|^2 = 2 + 2 cos(q (z - x)) puts the first harmonic's phase at -q x.
    const double phase = -std::arg(moment);
    if (times.empty()) {
      unwrapped = phase;
    } else {
      double d = phase - last_phase;
      d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
      unwrapped += d;
    }
    last_phase = phase;
    times.push_back(s.time);
    positions.push_back(unwrapped / q);
  });

  if (times.size() < 2) throw std::invalid_argument("fringe_demo: need n_steps >= 1");
  double mt = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) mt += times[i], mx += positions[i];
  mt /= static_cast<double>(times.size());
  mx /= static_cast<double>(times.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    sxy += (times[i] - mt) * (positions[i] - mx);
    sxx += (times[i] - mt) * (times[i] - mt);
  }
  out.phase_velocity = sxy / sxx;
  return out;
}

// --- determinant ------------------------------------------------------------

std::array<Matrix4, 4> gamma_matrices() {
  const cplx I{0.0, 1.0};
  const cplx mi = -I;
  using Pauli = std::array<std::array<cplx, 2>, 2>;
  const std::array<Pauli, 4> sigma = {{
      {{{1.0, 0.0}, {0.0, 1.0}}},  // identity, used for gamma^0
      {{{0.0, 1.0}, {1.0, 0.0}}},
      {{{0.0, -I}, {I, 0.0}}},
      {{{1.0, 0.0}, {0.0, -1.0}}},
  }};
  std::array<Matrix4, 4> g{};
  for (std::size_t mu = 0; mu < 4; ++mu) {
    // gamma^0 = -i [[0, 1], [1, 0]], gamma^j = -i [[0, s_j], [-s_j, 0]]
    const double lower_sign = mu == 0 ? 1.0 : -1.0;
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) {
        g[mu][r][c + 2] = mi * sigma[mu][r][c];
        g[mu][r + 2][c] = mi * lower_sign * sigma[mu][r][c];
      }
    }
  }
  return g;
}

Matrix4 contract(const Covector4& xi) {
  static const std::array<Matrix4, 4> g = gamma_matrices();
  const std::array<double, 4> x = {xi.xi0, xi.xi1, xi.xi2, xi.xi3};
  Matrix4 m{};
  for (std::size_t mu = 0; mu < 4; ++mu) {
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) m[r][c] += g[mu][r][c] * x[mu];
    }
  }
  return m;
}

cplx characteristic_determinant(const Covector4& xi) {
  Matrix4 a = contract(xi);
  cplx det = 1.0;
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == cplx{}) return 0.0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < 4; ++r) {
      const cplx factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < 4; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  return det;
}

double characteristic_closed_form(const Covector4& xi) {
  const double s = -xi.xi0 * xi.xi0 + xi.xi1 * xi.xi1 + xi.xi2 * xi.xi2 + xi.xi3 * xi.xi3;
  return s * s;
}

// --- dispersion -------------------------------------------------------------

DispersionResult dispersion_check(double k, double mass, const Grid1D& grid, double dt,
                                  std::size_t n_steps, Splitting splitting) {
  if (dt != grid.dz()) throw std::invalid_argument("dispersion_check: dt must equal dz");
  if (std::abs(k) * grid.dz() > 0.5) {
    throw std::invalid_argument("dispersion_check: wavenumber unresolved (|k| dz > 0.5)");
  }
  if (n_steps == 0) throw std::invalid_argument("dispersion_check: need n_steps >= 1");
  const std::size_t n_cells = grid.n_cells();
  const std::size_t margin = 2 * n_steps;
  if (2 * margin >= n_cells) throw std::invalid_argument("dispersion_check: grid too short");

  const double ratio = positive_energy_ratio(k, mass);
  SpinorField s(grid);
  for (std::size_t i = 0; i < n_cells; ++i) {
    s.f[i] = std::polar(1.0, k * grid.center(static_cast<std::ptrdiff_t>(i)));
    s.h[i] = ratio * s.f[i];
  }
  SchemeConfig cfg = SchemeConfig::for_grid(grid, mass, splitting);
  cfg.boundary_mass_limit = std::numeric_limits<double>::infinity();
  const Propagator prop(Potential(grid), cfg);
  Characteristics c = to_characteristics(s);
  double phase = 0.0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    Characteristics prev = c;
    prop.step(c, static_cast<double>(n) * dt);
    cplx overlap = 0.0;
    for (std::size_t i = margin; i < n_cells - margin; ++i) {
      overlap += std::conj(prev.u[i]) * c.u[i] + std::conj(prev.w[i]) * c.w[i];
    }
    phase += std::arg(overlap);
  }
  DispersionResult r;
  r.measured_energy = -phase / (static_cast<double>(n_steps) * dt);
  r.exact_energy = std::hypot(k, mass);
  r.frequency_error = std::abs(r.measured_energy - r.exact_energy);
  return r;
}

}  // namespace dirac1d
