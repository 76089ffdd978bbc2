#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dirac1d/causality.hpp"
#include "dirac1d/dynamics.hpp"
#include "dirac1d/observables.hpp"
#include "reference.hpp"

using namespace dirac1d;

namespace {

// Total flux sum_i jz dz at t = 20 for a smooth massive scattering run,
// refined by `level` (dz = 0.1 / level).
double total_flux(std::size_t level, Splitting splitting) {
  const Grid1D g(-60.0, 60.0, 1200 * level);
  const SpinorField s0 = gaussian_packet({PacketKind::gaussian, -10.0, 5.0, 1.0, 1.0}, g);
  const Potential v = rectangular_barrier(g, 1.0, 0.0, 10.0, 4.0);
  const SchemeConfig cfg = SchemeConfig::for_grid(g, 1.0, splitting);
  const History h = evolve(s0, v, 200 * level, cfg, 200 * level);
  const CurrentField c = current(h.snapshots.back());
  double j = 0.0;
  for (double x : c.jz) j += x * g.dz();
  return j;
}

double observed_order(Splitting splitting) {
  const double j1 = total_flux(1, splitting), j2 = total_flux(2, splitting),
               j4 = total_flux(4, splitting);
  return std::log2(std::abs(j1 - j2) / std::abs(j2 - j4));
}

}  // namespace

TEST_CASE("characteristic variables of pure movers") {
  const Grid1D g(0.0, 4.0, 4);
  SpinorField right(g), left(g);
  for (std::size_t i = 0; i < 4; ++i) {
    const cplx b{0.5 + i, -0.25 * i};
    right.f[i] = b;
    right.h[i] = -b;
    left.f[i] = b;
    left.h[i] = b;
  }
  const Characteristics r = to_characteristics(right), l = to_characteristics(left);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r.u[i] == cplx{});
    CHECK(r.w[i] == 2.0 * right.f[i]);
    CHECK(l.u[i] == 2.0 * left.f[i]);
    CHECK(l.w[i] == cplx{});
  }
}

TEST_CASE("characteristic round trip within one ulp") {
  const Grid1D g(-1.0, 1.0, 500);
  const SpinorField s = ref::random_field(g, 11);
  const SpinorField back = from_characteristics(to_characteristics(s), g, 0.0);
  std::uint64_t worst = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    // ulps are counted against the cell's scale; cancellation in f+h
    // makes a relative ulp count meaningless for tiny components.
    const double scale = std::abs(s.f[i]) + std::abs(s.h[i]);
    for (auto [a, b] : {std::pair{s.f[i], back.f[i]}, std::pair{s.h[i], back.h[i]}}) {
      const double e = std::max(std::abs(a.real() - b.real()), std::abs(a.imag() - b.imag()));
      worst = std::max<std::uint64_t>(worst, e == 0.0 ? 0 : static_cast<std::uint64_t>(
                                                               std::ceil(e / (scale * 0x1p-53))));
    }
  }
  CHECK(worst <= 2);  // one ulp of the scale, counted in half-ulps
}

TEST_CASE("mass rotation at a quarter period swaps the components") {
  cplx u = 1.0, w = 0.0;
  const double tau = std::numbers::pi / 2;
  local_rotation(u, w, 1.0, std::cos(tau), std::sin(tau));
  CHECK(std::abs(u) <= 1e-16);
  CHECK(std::abs(w - cplx{0.0, -1.0}) <= 1e-16);
}

TEST_CASE("zero steps returns the initial state") {
  const Grid1D g(-50.0, 50.0, 1000);
  const SpinorField s0 = gaussian_packet({PacketKind::gaussian, 0.0, 5.0, 1.0, 1.0}, g);
  const History h = evolve(s0, Potential(g), 0, SchemeConfig::for_grid(g, 1.0));
  REQUIRE(h.snapshots.size() == 1);
  CHECK(ref::bitwise_equal(h.snapshots[0].f, s0.f));
  CHECK(ref::bitwise_equal(h.snapshots[0].h, s0.h));
}

TEST_CASE("snapshot count is floor(n / stride) + 1") {
  const Grid1D g(-50.0, 50.0, 1000);
  const SpinorField s0 = gaussian_packet({PacketKind::gaussian, 0.0, 5.0, 1.0, 1.0}, g);
  const History h = evolve(s0, Potential(g), 25, SchemeConfig::for_grid(g, 1.0), 10);
  CHECK(h.snapshots.size() == 3);
  CHECK(h.time(2) == doctest::Approx(2.0));
}

TEST_CASE("massless right mover is transported by exactly one cell per step") {
  const Grid1D g(-50.0, 50.0, 1000);
  SpinorField s0 = compact_packet({PacketKind::compact_bump, 0, 0, 1.0, 0.0}, -30.0, -20.0, g);
  const History h = evolve(s0, Potential(g), 100, SchemeConfig::for_grid(g, 0.0), 100);
  const SupportInterval a = support(s0), b = support(h.snapshots.back());
  CHECK(b.first_cell == a.first_cell + 100);
  CHECK(b.last_cell == a.last_cell + 100);
}

TEST_CASE("time step must equal the cell size") {
  const Grid1D g(0.0, 10.0, 100);
  SchemeConfig cfg = SchemeConfig::for_grid(g, 1.0);
  cfg.dt *= 0.5;
  CHECK_THROWS(Propagator(Potential(g), cfg));
}

TEST_CASE("mass reaching the edge aborts") {
  const Grid1D g(-10.0, 10.0, 200);
  const SpinorField s0 = compact_packet({PacketKind::compact_bump, 0, 0, 1.0, 0.0}, -9.0, -5.0, g);
  // k0 = 1, m = 0 moves right; a left mover needs k0 < 0
  const SpinorField left = compact_packet({PacketKind::compact_bump, 0, 0, -1.0, 0.0}, -9.0, -5.0, g);
  CHECK_NOTHROW(evolve(s0, Potential(g), 50, SchemeConfig::for_grid(g, 0.0)));
  CHECK_THROWS_AS(evolve(left, Potential(g), 100, SchemeConfig::for_grid(g, 0.0)),
                  BoundaryMassError);
}

TEST_CASE("rectangular barrier") {
  const Grid1D g(-10.0, 30.0, 400);
  const Potential zero = rectangular_barrier(g, 0.0, 0.0, 15.0);
  for (double v : zero.at(0.0)) CHECK(v == 0.0);
  const Potential sharp = rectangular_barrier(g, 5.0, 0.0, 15.0);
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    const double z = g.center(static_cast<std::ptrdiff_t>(i));
    CHECK(sharp.at(0.0)[i] == (z > 0.0 && z < 15.0 ? 5.0 : 0.0));
  }
  CHECK_THROWS(rectangular_barrier(g, 1.0, 10.0, 5.0));
}

TEST_CASE("smoothed barrier keeps its area") {
  // Cosine ramps centred on the edges add and remove equal areas.
  const Grid1D g(-10.0, 30.0, 4000);
  const Potential v = rectangular_barrier(g, 2.0, 0.0, 15.0, 3.0);
  double area = 0.0;
  for (double x : v.at(0.0)) area += x * g.dz();
  CHECK(area == doctest::Approx(30.0).epsilon(1e-9));
}

TEST_CASE("perturbation edge cases") {
  const Grid1D g(-100.0, 100.0, 2000);
  const Potential base = rectangular_barrier(g, 1.0, 0.0, 10.0);
  CHECK(perturb_potential(base, -5.0, 5.0, 0.0, 5.0, 0.0) == base);

  const SpinorField s0 = gaussian_packet({PacketKind::gaussian, -20.0, 4.0, 1.0, 1.0}, g);
  const SchemeConfig cfg = SchemeConfig::for_grid(g, 1.0);
  const Potential late = perturb_potential(base, -5.0, 5.0, 100.0, 200.0, 3.0);
  const History a = evolve(s0, base, 300, cfg, 300);
  const History b = evolve(s0, late, 300, cfg, 300);
  CHECK(ref::bitwise_equal(a.snapshots.back().f, b.snapshots.back().f));
  CHECK(ref::bitwise_equal(a.snapshots.back().h, b.snapshots.back().h));
}

TEST_CASE("one step is unitary and linear") {
  const Grid1D g(-10.0, 10.0, 400);
  SpinorField s = ref::random_field(g, 3);
  // keep the edge cells empty so the boundary guard stays quiet
  s = cut(cut(s, -9.0, CutSide::right), 9.0, CutSide::left);
  s *= 1.0 / std::sqrt(s.norm());
  const SpinorField t = cut(cut(ref::random_field(g, 4), -9.0, CutSide::right), 9.0, CutSide::left);
  std::vector<double> vv(g.n_cells());
  for (std::size_t i = 0; i < vv.size(); ++i) vv[i] = std::sin(0.3 * static_cast<double>(i)) * 4.0;
  const Potential v(g, vv);
  for (Splitting sp : {Splitting::strang, Splitting::lie}) {
    const SchemeConfig cfg = SchemeConfig::for_grid(g, 1.3, sp);
    const SpinorField s1 = step(s, v, cfg);
    CHECK(std::abs(s1.norm() - 1.0) <= 1e-14);

    const cplx alpha{0.3, -1.7};
    const SpinorField lhs = step(s + alpha * t, v, cfg);
    const SpinorField rhs = s1 + alpha * step(t, v, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
      worst = std::max(worst, std::abs(lhs.f[i] - rhs.f[i]) + std::abs(lhs.h[i] - rhs.h[i]));
    }
    CHECK(worst <= 1e-14);
  }
}

TEST_CASE("convergence order of the splittings") {
  const double strang = observed_order(Splitting::strang);
  const double lie = observed_order(Splitting::lie);
  MESSAGE("strang order " << strang << ", lie order " << lie);
  CHECK(strang >= 1.9);
  CHECK(lie >= 0.9);
}
