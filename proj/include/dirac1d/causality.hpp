#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dirac1d/dynamics.hpp"
#include "dirac1d/grid_state.hpp"

namespace dirac1d {

/// Smallest cell interval holding every cell with |f| + |h| > threshold.
/// z_lo/z_hi are the outer boundaries of the first/last such cell.
struct SupportInterval {
  bool empty = true;
  std::size_t first_cell = 0;
  std::size_t last_cell = 0;  // inclusive
  double z_lo = 0.0;
  double z_hi = 0.0;
  double threshold = 0.0;
};

SupportInterval support(const SpinorField& state, double threshold = 0.0);

/// Outcome of one check. pass == (margin >= -tolerance). Checks that assert
/// exact zeros report margin = -(largest offending magnitude), tolerance 0.
struct CausalityReport {
  std::string check;
  bool pass = true;
  double margin = 0.0;
  double worst_t = 0.0;
  double worst_q = 0.0;
  double tolerance = 0.0;
  std::vector<std::pair<std::string, double>> scalars;

  void finalize() { pass = margin >= -tolerance; }
  double scalar(const std::string& name) const;
};

/// Keeps the lower margin; ties go to smaller t, then smaller q.
void merge_worst(CausalityReport& into, double margin, double t, double q);

/// One line: "check <name> PASS|FAIL margin=... tol=... t=... q=... [k=v ...]".
std::string format_report_line(const CausalityReport& r);

inline constexpr double kInequalityTolerance = 1e-10;

/// Every snapshot n is supported inside the initial support dilated by
/// steps_at(n) cells on each side, with exact zeros outside.
CausalityReport lightcone_check(const History& history, const SupportInterval& initial);

/// margin = min_n [P_0(z > Q) - P_n(z > Q + t_n)]. Q is snapped to a
/// boundary; throws if Q + t leaves the grid before the last snapshot.
CausalityReport causal_inequality_check(const History& history, double q);

/// causal_inequality_check for every boundary Q whose comoving cut stays on
/// the grid for the whole history.
CausalityReport causal_inequality_scan(const History& history);

/// margin = min over t_n <= t_max of [P_0(z > barrier_left) - P_n(z > L)].
/// Requires t_max < L - barrier_left.
CausalityReport tunneling_bound_check(const History& history, double length, double t_max,
                                      double barrier_left = 0.0);

/// Evolves state0 and its left/right cuts at Q under the same potential and
/// returns three reports: linearity (Psi_L + Psi_R vs Psi), full-equals-right
/// beyond z = Q + t, and left-vanishes beyond z = Q + t.
std::array<CausalityReport, 3> decomposition_check(const SpinorField& state0, double q,
                                                   const Potential& potential,
                                                   std::size_t n_steps,
                                                   const SchemeConfig& cfg);

/// Applies the n-step propagator to every basis vector supported left of Q
/// and reports the largest amplitude beyond Q + t_n. Throws when the grid has
/// more than max_cells cells.
CausalityReport operator_identity_check(const Potential& potential, const SchemeConfig& cfg,
                                        std::size_t n_steps, double q,
                                        std::size_t max_cells = 4096);

/// Spacetime extent (in steps and cells) where two potentials can differ.
struct PerturbationBox {
  bool empty = true;
  std::size_t first_step = 0;  // first step whose rotations differ
  std::size_t last_step = 0;
  std::size_t first_cell = 0;
  std::size_t last_cell = 0;  // inclusive
};

PerturbationBox perturbation_box(const Potential& base, const Potential& perturbed,
                                 const SchemeConfig& cfg, double t0, std::size_t n_steps);

/// Compares evolutions under `base` and `perturbed` on Bob's region at every
/// snapshot. Throws if the perturbation can reach Bob's region by the final
/// step.
CausalityReport signalling_check(const SpinorField& state0, const Potential& base,
                                 const Potential& perturbed, double bob_lo, double bob_hi,
                                 std::size_t n_steps, const SchemeConfig& cfg);

}  // namespace dirac1d
