import math

import numpy as np
import pytest

from bgpwave import ModelParams
from bgpwave.errors import ParameterError
from bgpwave.grid import Grid
from bgpwave.rescaling import build_g_tables, build_phi_tables, g_weight

P = ModelParams(1.0, 2.0, 10.0)


def test_g_at_zero_is_continuous_to_second_order():
    left = g_weight(np.array([-1e-12]))
    right = g_weight(np.array([0.0]))
    for l, r, v in zip(left, right, (1.0, -1.0, 1.0)):
        assert r[0] == v
        assert l[0] == pytest.approx(v, abs=1e-10)


def test_g_far_left():
    g, g1, g2 = g_weight(np.array([-1e6]))
    # arctan(y) = -pi/2 - 1/y + O(y^-3) for y -> -inf
    assert g[0] == pytest.approx(1.0 + 1.5 * math.pi - 2.0 / (1e6 - 1.0), rel=1e-13)
    assert 0 < -g1[0] < 1e-11 and abs(g2[0]) < 1e-17


def test_g_right_branch():
    x = np.linspace(0, 30, 7)
    g, g1, g2 = g_weight(x)
    np.testing.assert_array_equal(g, np.exp(-x))
    np.testing.assert_array_equal(g1, -np.exp(-x))
    np.testing.assert_array_equal(g2, np.exp(-x))


def test_g_derivatives_match_differences():
    x = np.linspace(-8, 5, 53)
    eps = 1e-5
    g, g1, g2 = g_weight(x)
    gp, g1p, _ = g_weight(x + eps)
    gm, g1m, _ = g_weight(x - eps)
    np.testing.assert_allclose((gp - gm) / (2 * eps), g1, atol=1e-8)
    np.testing.assert_allclose((g1p - g1m) / (2 * eps), g2, atol=1e-8)
    assert np.all(g > 0) and np.all(g1 < 0)


@pytest.mark.parametrize("x0", [-5.0, -0.5, 2.0])
def test_rescaled_operator_identity(x0):
    # phi1 (gQ) + phi2 (gQ)' - kappa (gQ)'' == g [(rho - c) Q + c Q' - kappa Q'']
    c = 2.4
    tab = build_phi_tables(build_g_tables(Grid(10.0, 0.05)), c, P)
    i = int(np.argmin(np.abs(tab.x - x0)))
    x = tab.x[i]
    g, g1, g2 = tab.g[i], tab.g1[i], tab.g2[i]
    Q, Q1, Q2 = math.sin(x) + 2, math.cos(x), -math.sin(x)
    Qt, Qt1, Qt2 = g * Q, g1 * Q + g * Q1, g2 * Q + 2 * g1 * Q1 + g * Q2
    lhs = tab.phi1[i] * Qt + tab.phi2[i] * Qt1 - P.kappa * Qt2
    rhs = g * ((P.rho - c) * Q + c * Q1 - P.kappa * Q2)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_phi_at_minus_five():
    c = 2.4
    tab = build_phi_tables(build_g_tables(Grid(10.0, 0.05)), c, P)
    i = int(np.argmin(np.abs(tab.x + 5.0)))
    g = 1 + math.pi / 2 + 2 * math.atan(4.0)
    g1, g2 = -2 / 17, -16 / 289
    expect = P.rho - c - c * g1 / g - P.kappa * (2 * g1**2 - g * g2) / g**2
    assert tab.phi1[i] == pytest.approx(expect, rel=1e-13)
    assert tab.phi2[i] == pytest.approx(c + 2 * P.kappa * g1 / g, rel=1e-13)


def test_phi_right_constants():
    grid = Grid(10.0, 0.05)
    tab = build_phi_tables(build_g_tables(grid), 2.4, P)
    right = grid.x >= 0
    assert np.all(tab.phi1[right] == P.rho - P.kappa)
    assert np.all(tab.phi2[right] == 2.4 - 2 * P.kappa)


def test_phi_rejects_infinite_speed():
    with pytest.raises(ParameterError):
        build_phi_tables(build_g_tables(Grid(10.0, 0.05)), math.inf, P)
