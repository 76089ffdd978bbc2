#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirac1d/causality.hpp"
#include "dirac1d/dynamics.hpp"
#include "dirac1d/grid_state.hpp"

namespace dirac1d {

struct GridSpec {
  double z_min = -400.0;
  double z_max = 200.0;
  std::size_t n_cells = 12000;
  bool operator==(const GridSpec&) const = default;
};

struct PotentialSpec {
  double v0 = 0.0;
  double z_on = 0.0;
  double z_off = 15.0;
  double smoothing = 0.0;
  bool operator==(const PotentialSpec&) const = default;
};

/// Localised dV switched on inside a spacetime box (Alice's device).
struct PerturbationSpec {
  bool enabled = false;
  double z_a = 0.0, z_b = 0.0;
  double t_a = 0.0, t_b = 0.0;
  double dv = 0.0;
  bool operator==(const PerturbationSpec&) const = default;
};

struct CheckSpec {
  std::string name;
  std::map<std::string, double> params;
  bool operator==(const CheckSpec&) const = default;
  double param(const std::string& key, double fallback) const;
};

struct ExperimentConfig {
  GridSpec grid;
  PacketSpec packet{PacketKind::gaussian, -120.0, 15.0, 2.0, 1.0, 0.0, 0.0};
  double support_lo = -10.0;  // compact_bump support
  double support_hi = 0.0;
  PotentialSpec potential;
  PerturbationSpec perturbation;
  Splitting splitting = Splitting::strang;
  std::size_t n_steps = 4000;
  std::size_t stride = 20;
  std::vector<CheckSpec> checks;
  // Dumont reproduction
  double reference_arrival_time = 110.0;
  double arrival_threshold_fraction = 0.1;
  // Output
  std::string out_dir = "out";
  std::size_t csv_z_stride = 1;
  std::uint64_t seed = 12345;
  // characteristic-determinant sampling
  std::size_t determinant_samples = 10000;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Flat "key.path = value" text, one entry per line, '#' comments.
/// Values are numbers, bare words, or [a, b, ...] arrays.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

struct ExperimentReport {
  std::string config_echo;
  std::vector<CausalityReport> checks;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  std::vector<std::string> notes;  // modelling assumptions behind the run
  std::string error;  // non-empty when the run failed

  bool all_pass() const;
  double scalar(const std::string& name) const;
  const CausalityReport& check(const std::string& name) const;
};

/// report.txt content. Timing lines start with "timing", assumptions with "note".
std::string format_report(const ExperimentReport& report);

/// Q = L - t_T.
double q_point(double arrival_time, double length);

/// First snapshot time with P_t(z > z_detect) >= threshold_prob.
std::optional<double> arrival_time(const History& history, double z_detect,
                                   double threshold_prob);

SpinorField make_initial_state(const ExperimentConfig& cfg);
Potential make_potential(const ExperimentConfig& cfg);
SchemeConfig make_scheme(const ExperimentConfig& cfg);

/// Rows "t,z,j0,jz" (t-major, then z), every csv_z_stride-th cell.
void write_density_csv(std::ostream& os, const History& history, std::size_t z_stride = 1);

/// Names accepted by run_checks.
const std::vector<std::string>& known_checks();

/// Runs each requested check on the history (and, for the checks that need
/// their own evolutions, on fresh runs from cfg).
std::vector<CausalityReport> run_checks(const ExperimentConfig& cfg, const History& history,
                                        const std::vector<CheckSpec>& checks);

/// Evolves cfg and runs cfg.checks; if `history_out` is given the history is
/// moved into it.
ExperimentReport run_experiment(const ExperimentConfig& cfg, std::optional<History>* history_out = nullptr);

/// Gaussian towards a barrier on [0, L]: estimates t_T, Q and the tail and
/// tunnelled probabilities, and checks that the tunnelled probability never
/// exceeds the tail in its causal past.
ExperimentReport run_dumont(const ExperimentConfig& cfg, std::optional<History>* history_out = nullptr);

ExperimentReport run_fringe(const ExperimentConfig& cfg);
ExperimentReport run_characteristics(const ExperimentConfig& cfg);

enum class SweepParameter { v0, length, mass, k0 };
SweepParameter parse_sweep_parameter(const std::string& name);

/// One run_dumont per value, run concurrently; reports keep the order of
/// `values` and failures are recorded in ExperimentReport::error.
std::vector<ExperimentReport> run_sweep(const ExperimentConfig& cfg, SweepParameter parameter,
                                        const std::vector<double>& values);

}  // namespace dirac1d
