import math

import numpy as np
import pytest

import trotterlab as tl


def test_lattice_counts():
    lat = tl.lattice("acene", 3)
    assert lat["site_count"] == 14
    assert len(lat["bonds"]) == 16


def test_term_counts():
    s = tl.build_system("acene", 3)
    assert s.potential.term_count() == 406
    assert s.shifted_potential.term_count() == 290
    h = tl.hamiltonian_json(s)
    assert h["term_counts"]["shifted_potential"] == 290


def test_commutator_convention():
    x = tl.PauliSum.from_text("+1.0e+00 X0", 1)
    y = tl.PauliSum.from_text("+1.0e+00 Y0", 1)
    c = tl.commutator(x, y)  # [X, Y] = 2iZ
    assert c.coefficient("Z0") == pytest.approx(2.0)


def test_benzene_gaps_and_effective_spectrum():
    s = tl.build_system("acene", 1)
    states = dict(tl.low_lying(s, 3))
    assert "S0" in states and "T1" in states
    e, ee = tl.effective_spectrum(s, 0.01)
    assert len(e) == 400
    assert abs(ee.sum() - e.sum()) < 1e-6
    assert tl.pearson(list(e), list((ee - e) / 1e-4)) == pytest.approx(-0.837, abs=0.02)


def test_series_extraction():
    t, energy = 0.1, -3.2
    g = [complex(math.cos(energy * k * t), -math.sin(energy * k * t)) for k in range(121)]
    assert tl.extract_energy(g, t, 0.05, -3.0) == pytest.approx(energy, abs=1e-7)


def test_costs():
    assert tl.steps_fixed_timestep(0.1, 0.04354, 0.02) == 840
    r = tl.cost(342, 104, 14, mode="gap", t=0.1)
    assert r["n_steps"] == 840
    assert r["total_Toffoli"] == pytest.approx(9.97e6, rel=0.01)


def test_kinetic_constants():
    k = tl.kinetic_constants("acene", 3, samples=500)
    assert (k["rotations"], k["t_gates"]) == (52, 104)
    assert 0 < k["average"] <= k["worst"]
