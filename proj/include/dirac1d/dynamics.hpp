#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dirac1d/grid_state.hpp"

namespace dirac1d {

/// Thrown when a field reaches the edge of the grid.
class BoundaryMassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Characteristic amplitudes: u = f + h travels left, w = f - h travels right.
struct Characteristics {
  std::vector<cplx> u;
  std::vector<cplx> w;
};

Characteristics to_characteristics(const SpinorField& state);
SpinorField from_characteristics(const Characteristics& c, const Grid1D& grid,
                                 double time);

/// Electrostatic potential energy V per cell, piecewise constant in time.
///
/// Epoch e is active for t in [t_start(e), t_start(e+1)); the first epoch
/// starts at -infinity.
class Potential {
 public:
  struct Epoch {
    double t_start;
    std::vector<double> v;
    bool operator==(const Epoch&) const = default;
  };

  explicit Potential(const Grid1D& grid);                        // V = 0
  Potential(const Grid1D& grid, std::vector<double> v);          // static
  Potential(const Grid1D& grid, std::vector<Epoch> epochs);

  const Grid1D& grid() const { return grid_; }
  const std::vector<Epoch>& epochs() const { return epochs_; }
  bool is_static() const { return epochs_.size() == 1; }

  std::size_t epoch_index(double t) const;
  const std::vector<double>& at(double t) const { return epochs_[epoch_index(t)].v; }

  bool operator==(const Potential&) const = default;

 private:
  Grid1D grid_;
  std::vector<Epoch> epochs_;
};

/// V0 on [z_on, z_off], zero outside, with optional cosine ramps of width
/// `smoothing` centred on each edge.
Potential rectangular_barrier(const Grid1D& grid, double v0, double z_on,
                              double z_off, double smoothing = 0.0);

/// Adds dv on cells with centre in [z_a, z_b] during t in [t_a, t_b).
Potential perturb_potential(const Potential& base, double z_a, double z_b,
                            double t_a, double t_b, double dv);

enum class Splitting { lie, strang };

struct SchemeConfig {
  double dt = 0.0;
  double mass = 0.0;
  Splitting splitting = Splitting::strang;
  /// Probability mass allowed in either edge cell before a step aborts.
  double boundary_mass_limit = 1e-9;

  /// dt = dz, the only time step the scheme accepts.
  static SchemeConfig for_grid(const Grid1D& grid, double mass,
                               Splitting splitting = Splitting::strang);

  bool operator==(const SchemeConfig&) const = default;
};

/// Exact exponential of -i (V + m sigma_1) tau applied to one cell's (u, w).
/// `phase` is e^{-i V tau}; cos_m and sin_m are cos(m tau) and sin(m tau).
inline void local_rotation(cplx& u, cplx& w, cplx phase, double cos_m, double sin_m) {
  const double ur = u.real(), ui = u.imag();
  const double wr = w.real(), wi = w.imag();
  // cos(m tau) (u, w) - i sin(m tau) (w, u)
  const double ar = cos_m * ur + sin_m * wi, ai = cos_m * ui - sin_m * wr;
  const double br = cos_m * wr + sin_m * ui, bi = cos_m * wi - sin_m * ur;
  const double pr = phase.real(), pi = phase.imag();
  u = {ar * pr - ai * pi, ar * pi + ai * pr};
  w = {br * pr - bi * pi, br * pi + bi * pr};
}

/// Stateful propagator working on characteristic amplitudes.
///
/// Each step applies the exact exponential of -i(V + m sigma_1) on every
/// cell and an exact one-cell shift (w right, u left). Strang splitting
/// uses half rotations on both sides of the shift; Lie splitting shifts
/// first and then rotates over the full step.
class Propagator {
 public:
  Propagator(const Potential& potential, const SchemeConfig& cfg);

  void step(Characteristics& c, double t) const;

  const SchemeConfig& config() const { return cfg_; }

 private:
  void rotate(Characteristics& c, double t_mid, bool half) const;

  Potential potential_;
  SchemeConfig cfg_;
  // Per epoch: e^{-i V dt/2} and e^{-i V dt} for every cell.
  std::vector<std::vector<cplx>> half_phase_;
  std::vector<std::vector<cplx>> full_phase_;
};

/// One time step of the state; the result carries time state.time + dt.
SpinorField step(const SpinorField& state, const Potential& potential,
                 const SchemeConfig& cfg);

/// Snapshots at t_0 + n * stride * dt.
struct History {
  std::vector<SpinorField> snapshots;
  Potential potential;
  SchemeConfig cfg;
  std::size_t stride = 1;

  const Grid1D& grid() const { return snapshots.front().grid; }
  double time(std::size_t n) const { return snapshots[n].time; }
  /// Number of scheme steps between the first snapshot and snapshot n.
  std::size_t steps_at(std::size_t n) const { return n * stride; }
};

/// Visits the initial state and every stride-th state after it.
using Observer = std::function<void(const SpinorField&, std::size_t step_index)>;

void propagate(const SpinorField& state, const Potential& potential,
               std::size_t n_steps, const SchemeConfig& cfg,
               std::size_t snapshot_stride, const Observer& observer);

/// floor(n_steps / stride) + 1 snapshots; all n_steps are taken.
History evolve(const SpinorField& state, const Potential& potential,
               std::size_t n_steps, const SchemeConfig& cfg,
               std::size_t snapshot_stride = 1);

}  // namespace dirac1d
