import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acwave import diagnostics as D
from acwave import solver2d as S
from acwave.profiles1d import front_speed, heteroclinic

from conftest import grid_field

BOUND7_Q05 = 0.954594154601839157941139888842  # mpmath oracle
BETA_TILTED = 1.5397437753641047528655270581


def layer_x(P, h):
    g = heteroclinic(P)
    x = np.arange(-10, 10 + h / 2, h)
    y = np.arange(-2, 2 + h / 2, h)
    return grid_field(np.repeat(g(x)[None, :], y.size, axis=0), x, y, 1.0, P)


def planar_y(P, h, c):
    g = heteroclinic(P)
    x = np.arange(-2, 2 + h / 2, h)
    y = np.arange(-12, 12 + h / 2, h)
    return grid_field(np.repeat(g(y)[:, None], x.size, axis=1), x, y, c, P)


def test_rho_constant_and_layer(quartic):
    x = np.linspace(-3, 3, 30)
    f = grid_field(-np.ones((30, 30)), x, x, 1.0, quartic)
    assert np.all(D.rho_profile(f, quartic)[1] == 0.0)
    _, rho = D.rho_profile(layer_x(quartic, 0.02), quartic)
    assert np.max(np.abs(rho - quartic.beta)) < 1e-4


def test_hamiltonian_constant_field(quartic):
    x = np.linspace(-3, 3, 30)
    f = grid_field(np.ones((30, 30)), x, x, 1.0, quartic)
    assert D.hamiltonian_residual(f, quartic, -2, 2) == 0.0


def test_flux_planar(tilted):
    c0 = front_speed(tilted)
    f = planar_y(tilted, 0.01, c0)
    ft = D.flux_identity(f, tilted)
    assert np.max(np.abs(ft.h)) < 1e-14
    assert abs(ft.mass[0] - 0.4 / c0) < 1e-4
    chk = D.planar_flux_check(tilted)
    assert chk["error"] <= 1e-6
    assert abs(chk["predicted"] - 0.942809) < 1e-6


def test_gradient_bound_saturated_by_planar(quartic):
    x = np.linspace(-3, 3, 30)
    assert D.gradient_and_monotone(grid_field(np.ones((30, 30)), x, x, 1.0, quartic),
                                   quartic)["max_excess"] == 0.0
    e = [abs(D.gradient_and_monotone(planar_y(quartic, h, 1.0), quartic)["max_excess"])
         for h in (0.1, 0.05)]
    assert e[0] < 1e-2 and 3.5 < e[0] / e[1] < 4.5


def test_barrier():
    assert D.barrier_rates(1.0, 1.0) == (1.0, 0.5)
    m1, m2 = D.barrier_rates(1.0, 1.0)
    assert abs(D.barrier(0.0, 0.0, 3.0, 1.0, 1.0) - 4 * math.exp(-m2 * 3.0)) < 1e-15


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 10.0), st.floats(0.01, 10.0))
def test_barrier_rate_identities(c, mu0):
    m1, m2 = D.barrier_rates(c, mu0)
    assert abs(m1 - m2 - c / 2) <= 1e-12 * max(1, c)
    assert abs(m1 ** 2 + m2 ** 2 - c * c / 4 - mu0) <= 1e-12 * max(1, c * c, mu0)


def test_speed_bounds(quartic, tilted):
    b = D.speed_bounds(quartic, 0.5)
    assert b["beta_conj"] == -0.5
    assert abs(b["bound_case7"] - BOUND7_Q05) < 1e-10
    assert "bound_case9" not in b
    bt = D.speed_bounds(tilted, 0.6)
    assert abs(bt["bound_case9"] - 0.4 / BETA_TILTED) < 1e-10


def test_classify_constant(quartic):
    x = np.linspace(-5, 5, 40)
    r = D.classify_row(np.ones(40), x, quartic)
    assert r["class"] == "constant +1" and r["distance"] == 0.0


def test_balanced_field_diagnostics(balanced, quartic):
    f = balanced["field"]
    rep = D.diagnose(f, quartic, balanced["k1"], balanced["k2"], alpha=0.5)
    ham = rep.hamiltonian
    b = quartic.beta
    assert ham["interior_residual"] <= 0.05 * b
    assert abs(ham["rho_top"] - 2 * b) <= 0.05 * 2 * b
    assert abs(ham["rho_bottom"]) <= 0.05 * b
    assert rep.flux.residual <= 0.02 * f.c * rep.flux.max_mass
    assert rep.gradient["max_excess"] <= 0.02
    assert rep.decay["holds"] and 0 < rep.decay["nu"] <= math.sqrt(quartic.mu0)
    assert rep.limits["bottom_class"] == "constant -1"
    assert rep.limits["top_class"] == "two-layer phi"
    # row mass decays toward both ends
    m = D.row_mass(f)
    assert m[1] < 1e-3 * m.max() and m[-2] < m.max()


def test_vshape_limits(vshape, tilted):
    lim = D.limit_profiles(vshape["field"], tilted)
    assert lim["bottom_class"] == "constant -1" and lim["top_class"] == "constant +1"


def test_witness_small(quartic):
    cfg = S.SolveConfig(x_extent=(-8, 8), y_extent=(-80, 20), nx=65, ny=401, dt=0.4,
                        max_steps=200, check_every=25, guess="single-layer")
    w = D.nonexistence_witness(quartic, 1.0, cfg)
    s = w.summary()
    assert s["status"] == "max_steps" and not s["steady_reached"]
    assert all(w.monotone.values())
    assert not s["front_reached_bottom"]


def test_witness_rejects_unbalanced(tilted):
    with pytest.raises(ValueError):
        D.nonexistence_witness(tilted, 1.0, S.SolveConfig())
