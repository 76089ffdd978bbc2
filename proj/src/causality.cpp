#include "dirac1d/causality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "dirac1d/observables.hpp"

namespace dirac1d {

SupportInterval support(const SpinorField& state, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("support: threshold must be >= 0");
  SupportInterval s;
  s.threshold = threshold;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (std::abs(state.f[i]) + std::abs(state.h[i]) > threshold) {
      if (s.empty) {
        s.empty = false;
        s.first_cell = i;
      }
      s.last_cell = i;
    }
  }
  if (!s.empty) {
    s.z_lo = state.grid.boundary(static_cast<std::ptrdiff_t>(s.first_cell));
    s.z_hi = state.grid.boundary(static_cast<std::ptrdiff_t>(s.last_cell) + 1);
  }
  return s;
}

double CausalityReport::scalar(const std::string& name) const {
  for (const auto& [k, v] : scalars) {
    if (k == name) return v;
  }
  throw std::out_of_range("CausalityReport: no scalar " + name);
}

void merge_worst(CausalityReport& into, double margin, double t, double q) {
  const bool better = margin < into.margin ||
                      (margin == into.margin &&
                       (t < into.worst_t || (t == into.worst_t && q < into.worst_q)));
  if (better) {
    into.margin = margin;
    into.worst_t = t;
    into.worst_q = q;
  }
}

std::string format_report_line(const CausalityReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "check %s %s margin=%.17g tol=%.17g t=%.17g q=%.17g",
                r.check.c_str(), r.pass ? "PASS" : "FAIL", r.margin, r.tolerance,
                r.worst_t, r.worst_q);
  std::string line = buf;
  for (const auto& [k, v] : r.scalars) {
    std::snprintf(buf, sizeof buf, " %s=%.17g", k.c_str(), v);
    line += buf;
  }
  return line;
}

namespace {

CausalityReport start_report(std::string name, double tolerance) {
  CausalityReport r;
  r.check = std::move(name);
  r.tolerance = tolerance;
  r.margin = std::numeric_limits<double>::infinity();
  r.worst_t = std::numeric_limits<double>::infinity();
  r.worst_q = std::numeric_limits<double>::infinity();
  return r;
}

// Exact checks with nothing to measure report a zero margin at the origin.
void close_report(CausalityReport& r, double t0, double q0) {
  if (r.margin == std::numeric_limits<double>::infinity()) {
    r.margin = 0.0;
    r.worst_t = t0;
    r.worst_q = q0;
  }
  r.finalize();
}

double amplitude(const SpinorField& s, std::size_t i) {
  if (s.f[i] == cplx{} && s.h[i] == cplx{}) return 0.0;
  return std::abs(s.f[i]) + std::abs(s.h[i]);
}

}  // namespace

CausalityReport lightcone_check(const History& history, const SupportInterval& initial) {
  CausalityReport r = start_report("lightcone", 0.0);
  const Grid1D& grid = history.grid();
  const auto n_cells = static_cast<std::ptrdiff_t>(grid.n_cells());
  for (std::size_t n = 0; n < history.snapshots.size(); ++n) {
    const SpinorField& s = history.snapshots[n];
    const auto k = static_cast<std::ptrdiff_t>(history.steps_at(n));
    std::ptrdiff_t lo = n_cells, hi = -1;  // allowed cells [lo, hi]
    if (!initial.empty) {
      lo = static_cast<std::ptrdiff_t>(initial.first_cell) - k;
      hi = static_cast<std::ptrdiff_t>(initial.last_cell) + k;
    }
    double worst = 0.0;
    std::ptrdiff_t where = 0;
    for (std::ptrdiff_t i = 0; i < n_cells; ++i) {
      if (i >= lo && i <= hi) continue;
      const double a = amplitude(s, static_cast<std::size_t>(i));
      if (a > worst) {
        worst = a;
        where = i;
      }
    }
    if (worst > 0.0) merge_worst(r, -worst, s.time, grid.center(where));
  }
  close_report(r, history.time(0), initial.empty ? grid.z_min() : initial.z_lo);
  return r;
}

CausalityReport causal_inequality_check(const History& history, double q) {
  const Grid1D& grid = history.grid();
  const std::size_t b = grid.snap_boundary(q);
  const double q_snapped = grid.boundary(static_cast<std::ptrdiff_t>(b));
  if (b + history.steps_at(history.snapshots.size() - 1) > grid.n_cells()) {
    throw std::invalid_argument("causal_inequality_check: Q + t leaves the grid");
  }
  CausalityReport r = start_report("causal_inequality", kInequalityTolerance);
  const std::vector<double> tail0 = right_tail_probabilities(current(history.snapshots[0]));
  for (std::size_t n = 0; n < history.snapshots.size(); ++n) {
    const std::vector<double> tail = right_tail_probabilities(current(history.snapshots[n]));
    merge_worst(r, tail0[b] - tail[b + history.steps_at(n)], history.time(n), q_snapped);
  }
  r.scalars = {{"Q", q_snapped}, {"tail_probability", tail0[b]}};
  r.finalize();
  return r;
}

CausalityReport causal_inequality_scan(const History& history) {
  const Grid1D& grid = history.grid();
  const std::size_t n_cells = grid.n_cells();
  const std::size_t k_last = history.steps_at(history.snapshots.size() - 1);
  CausalityReport r = start_report("causal_inequality_scan", kInequalityTolerance);
  if (k_last > n_cells) {
    throw std::invalid_argument("causal_inequality_scan: run longer than the grid");
  }
  const std::vector<double> tail0 = right_tail_probabilities(current(history.snapshots[0]));
  for (std::size_t n = 0; n < history.snapshots.size(); ++n) {
    const std::vector<double> tail = right_tail_probabilities(current(history.snapshots[n]));
    const std::size_t k = history.steps_at(n);
    for (std::size_t b = 0; b + k_last <= n_cells; ++b) {
      merge_worst(r, tail0[b] - tail[b + k], history.time(n),
                  grid.boundary(static_cast<std::ptrdiff_t>(b)));
    }
  }
  r.scalars = {{"boundaries_scanned", static_cast<double>(n_cells - k_last + 1)}};
  r.finalize();
  return r;
}

CausalityReport tunneling_bound_check(const History& history, double length, double t_max,
                                      double barrier_left) {
  if (!(t_max < length)) throw std::invalid_argument("tunneling_bound_check: t_max >= L");
  const Grid1D& grid = history.grid();
  const std::size_t b_in = grid.snap_boundary(barrier_left);
  const std::size_t b_out = grid.snap_boundary(barrier_left + length);
  CausalityReport r = start_report("tunneling_bound", kInequalityTolerance);
  const std::vector<double> tail0 = right_tail_probabilities(current(history.snapshots[0]));
  const double t0 = history.time(0);
  double max_tunneled = 0.0;
  for (std::size_t n = 0; n < history.snapshots.size(); ++n) {
    if (history.time(n) - t0 > t_max) break;
    const double tunneled = probability_cells(current(history.snapshots[n]), b_out, grid.n_cells());
    max_tunneled = std::max(max_tunneled, tunneled);
    merge_worst(r, tail0[b_in] - tunneled, history.time(n),
                grid.boundary(static_cast<std::ptrdiff_t>(b_out)));
  }
  r.scalars = {{"leaked_probability", tail0[b_in]}, {"max_tunneled_probability", max_tunneled}};
  r.finalize();
  return r;
}

namespace {

// f and h of cell i from the characteristic pair.
std::pair<cplx, cplx> spinor_at(const Characteristics& c, std::size_t i) {
  return {0.5 * (c.u[i] + c.w[i]), 0.5 * (c.u[i] - c.w[i])};
}

}  // namespace

std::array<CausalityReport, 3> decomposition_check(const SpinorField& state0, double q,
                                                   const Potential& potential,
                                                   std::size_t n_steps,
                                                   const SchemeConfig& cfg) {
  const Grid1D& grid = state0.grid;
  const std::size_t b = grid.snap_boundary(q);
  const double q_snapped = grid.boundary(static_cast<std::ptrdiff_t>(b));
  const Propagator prop(potential, cfg);
  Characteristics full = to_characteristics(state0);
  Characteristics left = to_characteristics(cut(state0, q_snapped, CutSide::left));
  Characteristics right = to_characteristics(cut(state0, q_snapped, CutSide::right));

  CausalityReport lin = start_report("decomposition_linearity", 0.0);
  CausalityReport right_eq = start_report("decomposition_right_equals_full", 0.0);
  CausalityReport left_zero = start_report("decomposition_left_vanishes", 0.0);
  double scale = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double t = state0.time + static_cast<double>(k) * cfg.dt;
    double lin_worst = 0.0, eq_worst = 0.0, zero_worst = 0.0;
    std::size_t lin_at = 0, eq_at = 0, zero_at = 0;
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
      const auto [f, h] = spinor_at(full, i);
      const auto [fl, hl] = spinor_at(left, i);
      const auto [fr, hr] = spinor_at(right, i);
      // sqrt(norm) is fine for the rounding-level comparison; the exact
      // clauses below only take moduli of values already known to be nonzero
      scale = std::max(scale, std::sqrt(std::norm(f)) + std::sqrt(std::norm(h)));
      const double d = std::sqrt(std::norm(fl + fr - f)) + std::sqrt(std::norm(hl + hr - h));
      if (d > lin_worst) lin_worst = d, lin_at = i;
      if (i >= b + k) {
        const cplx df = f - fr, dh = h - hr;
        if (df != cplx{} || dh != cplx{}) {
          const double e = std::abs(df) + std::abs(dh);
          if (e > eq_worst) eq_worst = e, eq_at = i;
        }
        if (fl != cplx{} || hl != cplx{}) {
          const double z = std::abs(fl) + std::abs(hl);
          if (z > zero_worst) zero_worst = z, zero_at = i;
        }
      }
    }
    auto at = [&](std::size_t i) { return grid.center(static_cast<std::ptrdiff_t>(i)); };
    if (lin_worst > 0.0) merge_worst(lin, -lin_worst, t, at(lin_at));
    if (eq_worst > 0.0) merge_worst(right_eq, -eq_worst, t, at(eq_at));
    if (zero_worst > 0.0) merge_worst(left_zero, -zero_worst, t, at(zero_at));
    if (k == n_steps) break;
    prop.step(full, t);
    prop.step(left, t);
    prop.step(right, t);
  }
  // Rounding in the shared rotations accumulates at most linearly in the steps.
  lin.tolerance = 4.0 * std::numeric_limits<double>::epsilon() *
                  static_cast<double>(n_steps + 1) * scale;
  for (auto* r : {&lin, &right_eq, &left_zero}) {
    close_report(*r, state0.time, q_snapped);
    r->scalars.push_back({"Q", q_snapped});
  }
  return {lin, right_eq, left_zero};
}

CausalityReport operator_identity_check(const Potential& potential, const SchemeConfig& cfg,
                                        std::size_t n_steps, double q, std::size_t max_cells) {
  const Grid1D& grid = potential.grid();
  const std::size_t n_cells = grid.n_cells();
  if (n_cells > max_cells) {
    throw std::invalid_argument("operator_identity_check: grid has more than " +
                                std::to_string(max_cells) + " cells");
  }
  const std::size_t b = grid.snap_boundary(q);
  const double q_snapped = grid.boundary(static_cast<std::ptrdiff_t>(b));
  SchemeConfig open_cfg = cfg;
  open_cfg.boundary_mass_limit = std::numeric_limits<double>::infinity();
  const Propagator prop(potential, open_cfg);

  // Basis vector 2j is f = delta_j, 2j + 1 is h = delta_j.
  const std::size_t n_basis = 2 * b;
  struct Worst {
    double amp = 0.0;
    std::size_t step = 0;
    std::size_t cell = 0;
  };
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    Worst w;
    Characteristics c{std::vector<cplx>(n_cells), std::vector<cplx>(n_cells)};
    for (std::size_t v = lo; v < hi; ++v) {
      std::fill(c.u.begin(), c.u.end(), cplx{});
      std::fill(c.w.begin(), c.w.end(), cplx{});
      const std::size_t j = v / 2;
      c.u[j] = 1.0;
      c.w[j] = (v % 2 == 0) ? 1.0 : -1.0;
      for (std::size_t k = 1; k <= n_steps; ++k) {
        prop.step(c, static_cast<double>(k - 1) * cfg.dt);
        for (std::size_t i = b + k; i < n_cells; ++i) {
          // |f| + |h| from the characteristic pair
          if (c.u[i] == cplx{} && c.w[i] == cplx{}) continue;
          const double a = 0.5 * (std::abs(c.u[i] + c.w[i]) + std::abs(c.u[i] - c.w[i]));
          if (a > w.amp || (a == w.amp && a > 0.0 && k < w.step)) w = {a, k, i};
        }
      }
    }
    return w;
  };

  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 16));
  std::vector<Worst> partial(n_threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n_basis + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t lo = std::min(n_basis, t * chunk);
      const std::size_t hi = std::min(n_basis, lo + chunk);
      pool.emplace_back([&, t, lo, hi] { partial[t] = run_range(lo, hi); });
    }
  }
  CausalityReport r = start_report("operator_identity", 0.0);
  for (const Worst& w : partial) {
    if (w.amp > 0.0) {
      merge_worst(r, -w.amp, static_cast<double>(w.step) * cfg.dt, grid.center(w.cell));
    }
  }
  close_report(r, 0.0, q_snapped);
  r.scalars = {{"Q", q_snapped}, {"basis_vectors", static_cast<double>(n_basis)}};
  return r;
}

PerturbationBox perturbation_box(const Potential& base, const Potential& perturbed,
                                 const SchemeConfig& cfg, double t0, std::size_t n_steps) {
  if (!(base.grid() == perturbed.grid())) {
    throw std::invalid_argument("perturbation_box: grid mismatch");
  }
  PerturbationBox box;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::ptrdiff_t, std::ptrdiff_t>> seen;
  auto differing_cells = [&](double t) {
    const std::size_t ea = base.epoch_index(t), eb = perturbed.epoch_index(t);
    auto [it, fresh] = seen.try_emplace({ea, eb}, std::ptrdiff_t{-1}, std::ptrdiff_t{-1});
    if (fresh) {
      const auto& va = base.epochs()[ea].v;
      const auto& vb = perturbed.epochs()[eb].v;
      for (std::size_t i = 0; i < va.size(); ++i) {
        if (va[i] != vb[i]) {
          if (it->second.first < 0) it->second.first = static_cast<std::ptrdiff_t>(i);
          it->second.second = static_cast<std::ptrdiff_t>(i);
        }
      }
    }
    return it->second;
  };
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * cfg.dt;
    std::vector<double> samples;
    if (cfg.splitting == Splitting::strang) {
      samples = {t + 0.25 * cfg.dt, t + 0.75 * cfg.dt};
    } else {
      samples = {t + 0.5 * cfg.dt};
    }
    for (double ts : samples) {
      const auto [lo, hi] = differing_cells(ts);
      if (lo < 0) continue;
      if (box.empty) {
        box.empty = false;
        box.first_step = k;
        box.first_cell = static_cast<std::size_t>(lo);
        box.last_cell = static_cast<std::size_t>(hi);
      }
      box.last_step = k;
      box.first_cell = std::min(box.first_cell, static_cast<std::size_t>(lo));
      box.last_cell = std::max(box.last_cell, static_cast<std::size_t>(hi));
    }
  }
  return box;
}

namespace {

// After K steps the difference field lies inside [first - d, last + d] with
// d = K - first_step (nothing before the first differing step completes).
bool bob_is_safe(const PerturbationBox& box, std::size_t k, const CellRange& bob) {
  if (box.empty || k <= box.first_step || bob.empty()) return true;
  const auto d = static_cast<std::ptrdiff_t>(k - box.first_step);
  const auto reach_lo = static_cast<std::ptrdiff_t>(box.first_cell) - d;
  const auto reach_hi = static_cast<std::ptrdiff_t>(box.last_cell) + d;
  const auto bob_lo = static_cast<std::ptrdiff_t>(bob.first);
  const auto bob_hi = static_cast<std::ptrdiff_t>(bob.last) - 1;
  return bob_lo > reach_hi || bob_hi < reach_lo;
}

}  // namespace

CausalityReport signalling_check(const SpinorField& state0, const Potential& base,
                                 const Potential& perturbed, double bob_lo, double bob_hi,
                                 std::size_t n_steps, const SchemeConfig& cfg) {
  const Grid1D& grid = state0.grid;
  if (!(bob_lo < bob_hi)) throw std::invalid_argument("signalling_check: empty Bob region");
  const CellRange bob = snap_region(grid, Region::between(bob_lo, bob_hi));
  const PerturbationBox box = perturbation_box(base, perturbed, cfg, state0.time, n_steps);
  if (!bob_is_safe(box, n_steps, bob)) {
    throw std::invalid_argument(
        "signalling_check: the perturbation lies inside the causal past of Bob's region");
  }
  const Propagator prop_base(base, cfg);
  const Propagator prop_pert(perturbed, cfg);
  Characteristics a = to_characteristics(state0);
  Characteristics p = a;
  CausalityReport r = start_report("signalling", 0.0);
  for (std::size_t k = 0;; ++k) {
    const double t = state0.time + static_cast<double>(k) * cfg.dt;
    double worst = 0.0;
    std::size_t at = bob.first;
    for (std::size_t i = bob.first; i < bob.last; ++i) {
      if (a.u[i] == p.u[i] && a.w[i] == p.w[i]) continue;
      const auto [fa, ha] = spinor_at(a, i);
      const auto [fp, hp] = spinor_at(p, i);
      const double d = std::abs(fa - fp) + std::abs(ha - hp);
      if (d > worst) worst = d, at = i;
    }
    if (worst > 0.0) merge_worst(r, -worst, t, grid.center(static_cast<std::ptrdiff_t>(at)));
    if (k == n_steps) break;
    prop_base.step(a, t);
    prop_pert.step(p, t);
  }
  close_report(r, state0.time, bob.z_lo);
  r.scalars = {{"bob_lo", bob.z_lo},
               {"bob_hi", bob.z_hi},
               {"perturbed_steps",
                box.empty ? 0.0 : static_cast<double>(box.last_step - box.first_step + 1)}};
  return r;
}

}  // namespace dirac1d
