#pragma once

#include <array>
#include <functional>

#include "dirac1d/dynamics.hpp"
#include "dirac1d/grid_state.hpp"

namespace dirac1d {

// --- massless closed form ---------------------------------------------------

using Profile = std::function<cplx(double)>;

/// f = a(z + t) + b(z - t), h = a(z + t) - b(z - t) at the cell centres.
/// When t is a whole number N of cells the profiles are evaluated at the
/// centres of cells i + N and i - N, so the samples coincide bit for bit
/// with a shifted t = 0 sampling.
SpinorField massless_exact(const Profile& a, const Profile& b, double t, const Grid1D& grid);

// --- superluminal fringe ----------------------------------------------------

struct FringeSpec {
  double k = 1.0;
  double p = 2.0;
  FringeSpec(double k_in, double p_in);
};

struct FringeResult {
  double phase_velocity = 0.0;
  double max_abs_prob_velocity = 0.0;
  double fringe_density_formula_residual = 0.0;
  std::size_t window_first = 0;
  std::size_t window_last = 0;  // exclusive
};

/// Evolves a(z) = e^{ikz}, b(z) = e^{ipz} without mass or potential and
/// measures the drift of the |f|^2 fringe inside a window at least
/// 2 n_steps cells from either edge.
FringeResult fringe_demo(const FringeSpec& spec, const Grid1D& grid, std::size_t n_steps);

// --- characteristic determinant ---------------------------------------------

struct Covector4 {
  double xi0 = 0.0, xi1 = 0.0, xi2 = 0.0, xi3 = 0.0;
};

using Matrix4 = std::array<std::array<cplx, 4>, 4>;

/// Weyl-basis gamma^mu, mu = 0..3, including the overall -i factor.
std::array<Matrix4, 4> gamma_matrices();

/// M^mu xi_mu.
Matrix4 contract(const Covector4& xi);

/// det(M^mu xi_mu) by LU factorisation with partial pivoting.
cplx characteristic_determinant(const Covector4& xi);

/// (-xi0^2 + xi1^2 + xi2^2 + xi3^2)^2.
double characteristic_closed_form(const Covector4& xi);

// --- dispersion -------------------------------------------------------------

struct DispersionResult {
  double measured_energy = 0.0;
  double exact_energy = 0.0;
  double frequency_error = 0.0;
};

/// Evolves a positive-energy plane wave e^{ikz} (V = 0) and fits its phase
/// rotation rate over a central window unaffected by the grid edges.
DispersionResult dispersion_check(double k, double mass, const Grid1D& grid, double dt,
                                  std::size_t n_steps, Splitting splitting = Splitting::strang);

}  // namespace dirac1d
