#include "dirac1d/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dirac1d {

Characteristics to_characteristics(const SpinorField& state) {
  Characteristics c;
  c.u.resize(state.size());
  c.w.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    c.u[i] = state.f[i] + state.h[i];
    c.w[i] = state.f[i] - state.h[i];
  }
  return c;
}

SpinorField from_characteristics(const Characteristics& c, const Grid1D& grid,
                                 double time) {
  SpinorField s(grid, time);
  if (c.u.size() != grid.n_cells() || c.w.size() != grid.n_cells()) {
    throw std::invalid_argument("from_characteristics: size mismatch");
  }
  for (std::size_t i = 0; i < c.u.size(); ++i) {
    s.f[i] = 0.5 * (c.u[i] + c.w[i]);
    s.h[i] = 0.5 * (c.u[i] - c.w[i]);
  }
  return s;
}

// --- Potential --------------------------------------------------------------

namespace {

void check_values(const Grid1D& grid, const std::vector<double>& v) {
  if (v.size() != grid.n_cells()) {
    throw std::invalid_argument("Potential: value count != n_cells");
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("Potential: non-finite V");
  }
}

}  // namespace

Potential::Potential(const Grid1D& grid)
    : Potential(grid, std::vector<double>(grid.n_cells(), 0.0)) {}

Potential::Potential(const Grid1D& grid, std::vector<double> v)
    : grid_(grid) {
  check_values(grid, v);
  epochs_.push_back({-std::numeric_limits<double>::infinity(), std::move(v)});
}

Potential::Potential(const Grid1D& grid, std::vector<Epoch> epochs)
    : grid_(grid), epochs_(std::move(epochs)) {
  if (epochs_.empty()) throw std::invalid_argument("Potential: no epochs");
  epochs_.front().t_start = -std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < epochs_.size(); ++e) {
    check_values(grid, epochs_[e].v);
    if (e > 0 && !(epochs_[e].t_start > epochs_[e - 1].t_start)) {
      throw std::invalid_argument("Potential: epochs must be strictly ordered");
    }
  }
}

std::size_t Potential::epoch_index(double t) const {
  auto it = std::upper_bound(epochs_.begin(), epochs_.end(), t,
                             [](double x, const Epoch& e) { return x < e.t_start; });
  return static_cast<std::size_t>(it - epochs_.begin()) - 1;
}

Potential rectangular_barrier(const Grid1D& grid, double v0, double z_on,
                              double z_off, double smoothing) {
  if (!(z_on < z_off)) throw std::invalid_argument("rectangular_barrier: inverted interval");
  if (z_on < grid.z_min() || z_off > grid.z_max()) {
    throw std::invalid_argument("rectangular_barrier: interval outside grid");
  }
  if (!(smoothing >= 0.0)) throw std::invalid_argument("rectangular_barrier: smoothing < 0");
  if (smoothing > z_off - z_on) {
    throw std::invalid_argument("rectangular_barrier: ramps wider than the barrier");
  }
  constexpr double pi = 3.14159265358979323846;
  // Ramp 0 -> 1 over [edge - s/2, edge + s/2].
  auto ramp = [&](double x) {
    if (smoothing == 0.0) return x >= 0.0 ? 1.0 : 0.0;
    if (x <= -0.5 * smoothing) return 0.0;
    if (x >= 0.5 * smoothing) return 1.0;
    return 0.5 * (1.0 - std::cos(pi * (x / smoothing + 0.5)));
  };
  std::vector<double> v(grid.n_cells());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double z = grid.center(static_cast<std::ptrdiff_t>(i));
    double shape;
    if (smoothing == 0.0) {
      shape = (z >= z_on && z <= z_off) ? 1.0 : 0.0;
    } else {
      shape = std::min(ramp(z - z_on), ramp(z_off - z));
    }
    v[i] = v0 * shape;
  }
  return Potential(grid, std::move(v));
}

Potential perturb_potential(const Potential& base, double z_a, double z_b,
                            double t_a, double t_b, double dv) {
  if (!(z_a <= z_b) || !(t_a <= t_b)) {
    throw std::invalid_argument("perturb_potential: inverted region or window");
  }
  const Grid1D& grid = base.grid();
  if (z_b < grid.z_min() || z_a > grid.z_max()) {
    throw std::invalid_argument("perturb_potential: region outside grid");
  }
  if (dv == 0.0 || t_a == t_b) return base;

  // Merge the existing epoch starts with t_a and t_b.
  std::vector<double> starts;
  for (const auto& e : base.epochs()) starts.push_back(e.t_start);
  starts.push_back(t_a);
  starts.push_back(t_b);
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

  std::vector<Potential::Epoch> epochs;
  for (double s : starts) {
    std::vector<double> v = base.at(s);
    if (s >= t_a && s < t_b) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double z = grid.center(static_cast<std::ptrdiff_t>(i));
        if (z >= z_a && z <= z_b) v[i] += dv;
      }
    }
    epochs.push_back({s, std::move(v)});
  }
  return Potential(grid, std::move(epochs));
}

// --- Scheme -----------------------------------------------------------------

SchemeConfig SchemeConfig::for_grid(const Grid1D& grid, double mass, Splitting splitting) {
  SchemeConfig cfg;
  cfg.dt = grid.dz();
  cfg.mass = mass;
  cfg.splitting = splitting;
  return cfg;
}

Propagator::Propagator(const Potential& potential, const SchemeConfig& cfg)
    : potential_(potential), cfg_(cfg) {
  if (cfg.dt != potential.grid().dz()) {
    throw std::invalid_argument("SchemeConfig: dt must equal dz exactly (CFL = 1)");
  }
  if (!(cfg.mass >= 0.0) || !std::isfinite(cfg.mass)) {
    throw std::invalid_argument("SchemeConfig: mass must be finite and >= 0");
  }
  for (const auto& epoch : potential_.epochs()) {
    std::vector<cplx> half(epoch.v.size()), full(epoch.v.size());
    for (std::size_t i = 0; i < epoch.v.size(); ++i) {
      half[i] = std::polar(1.0, -epoch.v[i] * 0.5 * cfg_.dt);
      full[i] = std::polar(1.0, -epoch.v[i] * cfg_.dt);
    }
    half_phase_.push_back(std::move(half));
    full_phase_.push_back(std::move(full));
  }
}

void Propagator::rotate(Characteristics& c, double t_mid, bool half) const {
  const std::size_t e = potential_.epoch_index(t_mid);
  const std::vector<cplx>& phase = half ? half_phase_[e] : full_phase_[e];
  const double tau = half ? 0.5 * cfg_.dt : cfg_.dt;
  const double cm = std::cos(cfg_.mass * tau);
  const double sm = std::sin(cfg_.mass * tau);
  const std::size_t n = c.u.size();
  for (std::size_t i = 0; i < n; ++i) local_rotation(c.u[i], c.w[i], phase[i], cm, sm);
}

void Propagator::step(Characteristics& c, double t) const {
  const std::size_t n = c.u.size();
  const double dz = potential_.grid().dz();
  const double edge_lo = 0.5 * (std::norm(c.u.front()) + std::norm(c.w.front())) * dz;
  const double edge_hi = 0.5 * (std::norm(c.u.back()) + std::norm(c.w.back())) * dz;
  if (edge_lo > cfg_.boundary_mass_limit || edge_hi > cfg_.boundary_mass_limit) {
    throw BoundaryMassError("field reached the grid edge at t = " + std::to_string(t) +
                            " (edge mass " + std::to_string(std::max(edge_lo, edge_hi)) +
                            ")");
  }
  const double dt = cfg_.dt;
  auto shift = [&] {
    std::copy(c.u.begin() + 1, c.u.end(), c.u.begin());
    c.u[n - 1] = 0.0;
    std::copy_backward(c.w.begin(), c.w.end() - 1, c.w.end());
    c.w[0] = 0.0;
  };
  if (cfg_.splitting == Splitting::strang) {
    rotate(c, t + 0.25 * dt, true);
    shift();
    rotate(c, t + 0.75 * dt, true);
  } else {
    shift();
    rotate(c, t + 0.5 * dt, false);
  }
}

SpinorField step(const SpinorField& state, const Potential& potential,
                 const SchemeConfig& cfg) {
  if (!(state.grid == potential.grid())) throw std::invalid_argument("step: grid mismatch");
  const Propagator prop(potential, cfg);
  Characteristics c = to_characteristics(state);
  prop.step(c, state.time);
  return from_characteristics(c, state.grid, state.time + cfg.dt);
}

void propagate(const SpinorField& state, const Potential& potential,
               std::size_t n_steps, const SchemeConfig& cfg,
               std::size_t snapshot_stride, const Observer& observer) {
  if (snapshot_stride == 0) throw std::invalid_argument("snapshot stride must be >= 1");
  if (!(state.grid == potential.grid())) throw std::invalid_argument("propagate: grid mismatch");
  const Propagator prop(potential, cfg);
  Characteristics c = to_characteristics(state);
  const double t0 = state.time;
  observer(state, 0);
  for (std::size_t k = 0; k < n_steps; ++k) {
    prop.step(c, t0 + static_cast<double>(k) * cfg.dt);
    if ((k + 1) % snapshot_stride == 0) {
      observer(from_characteristics(c, state.grid, t0 + static_cast<double>(k + 1) * cfg.dt),
               k + 1);
    }
  }
}

History evolve(const SpinorField& state, const Potential& potential, std::size_t n_steps,
               const SchemeConfig& cfg, std::size_t snapshot_stride) {
  History hist{{}, potential, cfg, snapshot_stride};
  hist.snapshots.reserve(n_steps / std::max<std::size_t>(snapshot_stride, 1) + 1);
  propagate(state, potential, n_steps, cfg, snapshot_stride,
            [&](const SpinorField& s, std::size_t) { hist.snapshots.push_back(s); });
  return hist;
}

}  // namespace dirac1d
