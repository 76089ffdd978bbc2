import math

import numpy as np
import pytest

import dirac1d as d


def test_grid_and_packet():
    g = d.Grid1D(-1.0, 1.0, 4)
    assert g.dz == 0.5
    assert list(g.centers()) == [-0.75, -0.25, 0.25, 0.75]
    with pytest.raises(ValueError):
        d.Grid1D(0.0, 1.0, 1)

    g = d.Grid1D(-400.0, 200.0, 12000)
    psi = d.gaussian_packet(d.PacketSpec(d.PacketKind.gaussian, -120.0, 15.0, 2.0, 1.0), g)
    assert abs(psi.norm() - 1.0) < 1e-12
    tail = d.probability_above(psi, -95.0)
    assert abs(tail - 0.5 * math.erfc(25.0 / 15.0)) < 1e-6


def test_evolution_and_checks():
    g = d.Grid1D(-60.0, 60.0, 1200)
    spec = d.PacketSpec(d.PacketKind.compact_bump, k0=2.0, mass=1.0)
    psi = d.compact_packet(spec, -10.0, 0.0, g)
    v = d.rectangular_barrier(g, 5.0, 0.0, 10.0)
    cfg = d.SchemeConfig.for_grid(g, 1.0)
    h = d.evolve(psi, v, 200, cfg, 1)
    assert len(h) == 201
    assert d.lightcone_check(h, d.support(psi)).margin == 0.0
    assert d.tunneling_bound_check(h, 10.0, 9.9).margin == 0.0
    assert d.causal_inequality_scan(h).passed
    lin, right, left = d.decomposition_check(psi, -5.0, v, 200, cfg)
    assert lin.passed and right.margin == 0.0 and left.margin == 0.0
    c = d.current(h.snapshots[-1])
    assert np.all(np.abs(c.jz) <= c.j0 * (1 + 1e-15))


def test_massless_exact_matches_shift():
    g = d.Grid1D(-20.0, 20.0, 400)

    def bump(z0):
        return lambda z: complex(math.ldexp(round(math.ldexp(math.exp(-((z - z0) / 2) ** 2), 20)), -20) + 0.0)

    a, b = bump(5.0), bump(-5.0)
    psi = d.massless_exact(a, b, 0.0, g)
    h = d.evolve(psi, d.Potential(g), 50, d.SchemeConfig.for_grid(g, 0.0), 50)
    exact = d.massless_exact(a, b, 50 * g.dz, g)
    assert np.array_equal(h.snapshots[-1].f, exact.f)
    assert np.array_equal(h.snapshots[-1].h, exact.h)


def test_config_round_trip_and_reports():
    cfg = d.ExperimentConfig.parse("grid.n_cells = 3000\npotential.v0 = 2\n")
    assert d.ExperimentConfig.parse(cfg.serialize()) == cfg
    rep = d.run_characteristics(d.ExperimentConfig())
    assert rep.all_pass()
    assert rep.format().startswith("# dirac1d report")
    assert d.q_point(110.0, 15.0) == -95.0
    assert d.run_sweep(d.ExperimentConfig(), "V0", []) == []


def test_fringe():
    r = d.fringe_demo(1.0, 2.0, d.Grid1D(-150.0, 150.0, 6000), 400)
    assert abs(r.phase_velocity - 3.0) < 0.06
    assert r.max_abs_prob_velocity < 1e-6
