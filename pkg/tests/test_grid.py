import numpy as np
import pytest

from bgpwave.errors import DimensionError, ParameterError, SingularSystemError
from bgpwave.grid import (Dirichlet, Grid, Robin, TridiagonalSystem, assemble_operator,
                          central_first_derivative, central_second_derivative,
                          cumulative_trapezoid, solve_tridiagonal, tail_trapezoid, trapezoid)


def dominant_system(rng, n=12):
    sub, sup = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    diag = (np.abs(sub) + np.abs(sup) + rng.uniform(0.5, 2.0, n)) * rng.choice([-1, 1], n)
    return TridiagonalSystem(sub, diag, sup, rng.normal(size=n))


class TestGrid:
    def test_nodes(self):
        g = Grid(10.0, 0.05)
        assert g.n == 401 and g.center == 200
        assert g.x[0] == -10.0 and g.x[-1] == 10.0 and g.x[g.center] == 0.0
        np.testing.assert_allclose(np.diff(g.x), 0.05, rtol=1e-12)

    def test_reference_size(self):
        assert Grid(40.0, 0.02).n == 4001

    @pytest.mark.parametrize("a,h", [(1.0, 0.3), (1.0, 2.0 / 3.0), (0.0, 0.1), (1.0, -0.1),
                                     (np.inf, 0.1), (0.05, 0.05)])
    def test_rejects_bad_grids(self, a, h):
        with pytest.raises(ParameterError):
            Grid(a, h)

    def test_x_is_read_only(self, small_grid):
        with pytest.raises(ValueError):
            small_grid.x[0] = 1.0

    def test_index_of(self, small_grid):
        assert small_grid.index_of(0.0) == small_grid.center
        assert small_grid.index_of(-99.0) == 0
        assert small_grid.index_of(0.051) == small_grid.center + 1

    def test_check(self, small_grid):
        with pytest.raises(DimensionError):
            small_grid.check(np.zeros(3))


class TestDerivatives:
    def test_first_derivative_second_order(self):
        errs = []
        for h in (0.1, 0.05):
            g = Grid(2.0, h)
            errs.append(np.max(np.abs(central_first_derivative(np.sin(g.x), g) - np.cos(g.x))))
        assert np.log2(errs[0] / errs[1]) > 1.9

    def test_first_derivative_exact_on_quadratics(self):
        g = Grid(1.0, 0.1)
        u = 3 * g.x**2 - g.x + 2
        np.testing.assert_allclose(central_first_derivative(u, g), 6 * g.x - 1, atol=1e-12)

    def test_second_derivative(self):
        g = Grid(2.0, 0.01)
        d2 = central_second_derivative(np.sin(g.x), g)
        np.testing.assert_allclose(d2[1:-1], -np.sin(g.x[1:-1]), atol=1e-4)
        assert d2[0] == d2[1] and d2[-1] == d2[-2]


class TestQuadrature:
    def test_trapezoid_linear_exact(self):
        g = Grid(3.0, 0.1)
        assert trapezoid(2 * g.x + 1, g) == pytest.approx(6.0, abs=1e-12)

    def test_trapezoid_exp(self):
        g = Grid(1.0, 0.001)
        assert trapezoid(np.exp(g.x), g) == pytest.approx(np.exp(1) - np.exp(-1), rel=1e-6)

    def test_partial_ranges(self, small_grid):
        u = np.cos(small_grid.x)
        i, j = 50, 300
        assert trapezoid(u, small_grid, i, i) == 0.0
        cum = cumulative_trapezoid(u, small_grid)
        tail = tail_trapezoid(u, small_grid)
        assert cum[j] - cum[i] == pytest.approx(trapezoid(u, small_grid, i, j), abs=1e-12)
        assert tail[i] == pytest.approx(trapezoid(u, small_grid, i), abs=1e-12)
        assert tail[-1] == 0.0 and cum[0] == 0.0
        np.testing.assert_allclose(cum + tail, trapezoid(u, small_grid), atol=1e-12)

    def test_cumulative_start(self, small_grid):
        u = np.ones(small_grid.n)
        cum = cumulative_trapezoid(u, small_grid, start=100)
        assert np.all(cum[:101] == 0.0)
        assert cum[-1] == pytest.approx(small_grid.h * (small_grid.n - 1 - 100))

    def test_bad_range(self, small_grid):
        with pytest.raises(IndexError):
            trapezoid(np.ones(small_grid.n), small_grid, 10, 5)


class TestTridiagonal:
    @pytest.mark.parametrize("seed", range(20))
    def test_matches_dense_elimination(self, seed):
        system = dominant_system(np.random.default_rng(seed))
        u = solve_tridiagonal(system)
        dense = np.linalg.solve(system.to_dense(), system.rhs)
        assert np.max(np.abs(u - dense)) <= 1e-12
        assert system.is_diagonally_dominant()

    def test_matvec_round_trip(self, rng):
        system = dominant_system(rng, 50)
        u = solve_tridiagonal(system)
        np.testing.assert_allclose(system.matvec(u), system.rhs, atol=1e-12)
        np.testing.assert_allclose(system.to_dense() @ u, system.matvec(u), atol=1e-14)

    def test_zero_pivot(self):
        system = TridiagonalSystem(np.zeros(3), np.array([0.0, 1.0, 1.0]), np.zeros(3), np.ones(3))
        with pytest.raises(SingularSystemError) as exc:
            solve_tridiagonal(system)
        assert exc.value.row == 0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            TridiagonalSystem(np.zeros(3), np.ones(4), np.zeros(3), np.ones(3))


class TestAssembly:
    def test_dirichlet_problem(self):
        # -u'' = pi^2 sin(pi x), u(-1) = u(1) = 0
        errs = []
        for h in (0.02, 0.01):
            g = Grid(1.0, h)
            s = assemble_operator(g, 1.0, 0.0, 0.0, np.pi**2 * np.sin(np.pi * g.x),
                                  Dirichlet(0.0), Dirichlet(0.0))
            errs.append(np.max(np.abs(solve_tridiagonal(s) - np.sin(np.pi * g.x))))
        assert np.log2(errs[0] / errs[1]) > 1.9

    def test_robin_ends_second_order(self):
        # -u'' + u' + u = f with u = cos x + 2 and u' = sigma u + beta at both ends
        def solve(h):
            g = Grid(1.0, h)
            x = g.x
            u = np.cos(x) + 2
            f = np.cos(x) - np.sin(x) + u
            sl, sr = 0.5, -0.3
            left = Robin(sl, -np.sin(-1.0) - sl * (np.cos(-1.0) + 2))
            right = Robin(sr, -np.sin(1.0) - sr * (np.cos(1.0) + 2))
            s = assemble_operator(g, 1.0, 1.0, 1.0, f, left, right)
            return np.max(np.abs(solve_tridiagonal(s) - u))

        e1, e2 = solve(0.02), solve(0.01)
        assert e2 < 1e-4 and np.log2(e1 / e2) > 1.9
