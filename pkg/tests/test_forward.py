import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from conftest import quad_knapsack_instance, random_simplex_point
from revealib.domain import Domain, Instance, ParameterPoint, UtilityForm, eval_f
from revealib.errors import ConfigurationError, DimensionLimitError, NumericalGuardError
from revealib.forward import (
    SolveStatus,
    brute_force_forward,
    kkt_residual,
    pick_with_tie_break,
    solve_binary_knapsack,
    solve_bilinear_knapsack,
    solve_ces_eq_knapsack,
    solve_cobb_douglas_knapsack,
    solve_custom_1d,
    solve_forward,
    solve_quad_continuous,
)


def _quad_1d(theta, price, budget):
    return solve_quad_continuous(np.array([theta]), Domain.cont_knapsack([price], budget), np.array([1.0]))


class TestQuadContinuous:
    def test_interior_optimum(self):
        sol = _quad_1d(0.5, 1.0, 1.0)
        assert sol.ok
        assert_allclose(sol.x, [0.5])
        assert sol.tie_break_norm == pytest.approx(0.5)

    def test_budget_binds(self):
        assert_allclose(_quad_1d(2.0, 1.0, 1.0).x, [1.0], atol=1e-9)

    def test_matches_grid_oracle_in_two_dimensions(self, rng):
        for _ in range(5):
            inst = quad_knapsack_instance(rng, 2)
            theta = random_simplex_point(rng, 2)
            sol = solve_forward(theta, inst)
            oracle = brute_force_forward(theta, inst)
            assert sol.objective <= oracle.objective + 1e-9
            assert_allclose(sol.x, oracle.x, atol=1e-4 * max(1.0, np.abs(oracle.x).max()))

    def test_knapsack_optimality_conditions(self, rng):
        for _ in range(10):
            inst = quad_knapsack_instance(rng, 6)
            theta = random_simplex_point(rng, 6)
            sol = solve_forward(theta, inst)
            assert inst.domain.feasibility_residual(sol.x) <= 1e-8
            assert kkt_residual(sol, theta, inst) <= 1e-7
            grad = inst.utility.P * sol.x - theta.values
            for _ in range(100):
                z = inst.domain.sample_feasible(rng)
                assert np.dot(grad, z - sol.x) >= -1e-6
                assert sol.objective <= eval_f(z, theta, inst) + 1e-7

    def test_polytope_matches_grid_oracle(self, small_polytope_stream):
        theta = small_polytope_stream.theta_true
        for inst in small_polytope_stream.instances[:3]:
            sol = solve_forward(theta, inst)
            assert sol.status is SolveStatus.OPTIMAL
            assert inst.domain.feasibility_residual(sol.x) <= 1e-8
            assert kkt_residual(sol, theta, inst) <= 1e-7
            oracle = brute_force_forward(theta, inst)
            assert sol.objective <= oracle.objective + 1e-7

    def test_deterministic(self, rng):
        inst = quad_knapsack_instance(rng, 5)
        theta = random_simplex_point(rng, 5)
        assert_array_equal(solve_forward(theta, inst).x, solve_forward(theta, inst).x)


class TestBinaryKnapsack:
    def test_nothing_worth_taking(self):
        dom = Domain.bin_knapsack([1.0, 2.0], 3.0)
        sol = solve_binary_knapsack(np.array([0.1, 0.2]), dom, np.array([1.0, 1.0]))
        assert_array_equal(sol.x, [0.0, 0.0])

    def test_everything_fits(self):
        dom = Domain.bin_knapsack([1.0, 2.0, 3.0], 10.0)
        sol = solve_binary_knapsack(np.array([0.5, 0.3, 0.2]), dom, np.array([0.1, 0.1, 0.1]))
        assert_array_equal(sol.x, [1.0, 1.0, 1.0])

    def test_tie_prefers_fewer_items(self):
        # one item worth 2 against two items worth 1 each, same weight
        dom = Domain.bin_knapsack([2.0, 1.0, 1.0], 2.0)
        sol = solve_binary_knapsack(np.array([2.5, 1.5, 1.5]), dom, np.array([1.0, 1.0, 1.0]))
        assert_array_equal(sol.x, [1.0, 0.0, 0.0])

    def test_equal_counts_tie_lexicographically(self):
        # either item alone is optimal; [0, 1] is the lexicographically smaller choice
        inst = Instance(1, UtilityForm.quad_diag([0.5, 0.5]), Domain.bin_knapsack([100.0, 100.0], 150.0))
        theta = np.array([0.5, 0.5])
        assert_array_equal(solve_forward(theta, inst).x, [0.0, 1.0])
        assert_array_equal(brute_force_forward(theta, inst).x, [0.0, 1.0])

        inst = Instance(1, UtilityForm.quad_diag([1.0, 1.0, 1.0, 1.0]), Domain.bin_knapsack([1.0, 1.0, 1.0, 1.0], 2.0))
        theta = np.array([1.0, 1.0, 1.0, 1.0])
        assert_array_equal(solve_forward(theta, inst).x, [0.0, 0.0, 1.0, 1.0])
        assert_array_equal(solve_forward(theta, inst).x, brute_force_forward(theta, inst).x)

    def test_matches_exhaustive_enumeration(self, rng):
        n = 12
        P = rng.uniform(1.0, 21.0, size=n)
        P /= P.sum()
        theta = random_simplex_point(rng, n)
        prices = np.round(theta.values + 100.0 + rng.integers(-10, 11, size=n))
        inst = Instance(1, UtilityForm.quad_diag(P), Domain.bin_knapsack(prices, rng.uniform(1.0, prices.sum())))

        sol = solve_forward(theta, inst)
        oracle = brute_force_forward(theta, inst)
        assert sol.objective == pytest.approx(oracle.objective, abs=1e-12)
        assert inst.domain.is_feasible(sol.x)

    def test_rejects_fractional_prices(self):
        dom = Domain.cont_knapsack([1.5, 2.0], 3.0)
        with pytest.raises(ConfigurationError):
            solve_binary_knapsack(np.array([0.5, 0.5]), dom, np.array([1.0, 1.0]))


class TestCesEqKnapsack:
    def test_symmetric(self):
        sol = solve_ces_eq_knapsack(ParameterPoint([0.5, 0.5]), Domain.eq_knapsack([1.0, 1.0], 1.0))
        assert_allclose(sol.x, [0.5, 0.5])

    def test_closed_form_against_budget_line(self):
        theta = ParameterPoint([0.25, 0.75])
        inst = Instance(1, UtilityForm.ces(), Domain.eq_knapsack([1.0, 1.0], 1.0))
        sol = solve_forward(theta, inst)
        assert_allclose(sol.x, [0.75, 0.25])

        grid = np.linspace(0.0, 1.0, 10_001)
        values = 0.25 * grid ** 2 + 0.75 * (1.0 - grid) ** 2
        assert abs(grid[np.argmin(values)] - sol.x[0]) <= 1e-4

    def test_random_instance_kkt_and_grid(self, rng):
        theta = random_simplex_point(rng, 5)
        prices = rng.uniform(90.0, 110.0, size=5)
        dom = Domain.eq_knapsack(prices, rng.uniform(1.0, prices.sum()))
        sol = solve_ces_eq_knapsack(theta, dom)
        # stationarity 2θ_i x_i = λ p_i with one λ
        ratios = 2.0 * theta.values * sol.x / prices
        assert np.ptp(ratios) <= 1e-10 * max(1.0, ratios.max())
        assert abs(np.dot(prices, sol.x) - dom.budget) <= 1e-10 * dom.budget

        small = Instance(1, UtilityForm.ces(), Domain.eq_knapsack(prices[:3], dom.budget / 2))
        theta3 = ParameterPoint.on_simplex(theta.values[:3])
        exact = solve_forward(theta3, small)
        oracle = brute_force_forward(theta3, small)
        assert exact.objective <= oracle.objective + 1e-12
        assert oracle.objective - exact.objective <= 1e-4 * exact.objective

    def test_floor_guards_division(self):
        sol = solve_ces_eq_knapsack(np.array([1.0, 0.0]), Domain.eq_knapsack([1.0, 1.0], 1.0))
        assert np.all(np.isfinite(sol.x))
        with pytest.raises(NumericalGuardError):
            solve_ces_eq_knapsack(np.array([1.1, -0.1]), Domain.eq_knapsack([1.0, 1.0], 1.0))


class TestBilinearKnapsack:
    def test_single_profitable_item(self):
        sol = solve_bilinear_knapsack(np.array([1.0, 0.0, 0.0]), Domain.cont_knapsack([1.0, 1.0, 1.0], 2.0))
        assert_array_equal(sol.x, [2.0, 0.0, 0.0])

    def test_zero_theta_gives_zero(self):
        sol = solve_bilinear_knapsack(np.zeros(3), Domain.cont_knapsack([1.0, 1.0, 1.0], 2.0))
        assert_array_equal(sol.x, np.zeros(3))

    def test_matches_vertex_enumeration(self, rng):
        for _ in range(10):
            theta = random_simplex_point(rng, 4)
            prices = rng.uniform(1.0, 10.0, size=4)
            inst = Instance(1, UtilityForm.bilinear(), Domain.cont_knapsack(prices, 5.0))
            assert_allclose(solve_forward(theta, inst).x, brute_force_forward(theta, inst).x)


class TestCobbDouglas:
    def test_symmetric_split(self):
        sol = solve_cobb_douglas_knapsack(ParameterPoint([0.5, 0.5]), Domain.cont_knapsack([1.0, 1.0], 2.0))
        assert_allclose(sol.x, [1.0, 1.0])

    def test_degenerate_weight(self):
        sol = solve_cobb_douglas_knapsack(np.array([1.0, 0.0]), Domain.cont_knapsack([1.0, 1.0], 1.0))
        assert sol.x[0] == pytest.approx(1.0)
        assert 0.0 < sol.x[1] < 1e-8

    def test_stationarity(self, rng):
        theta = random_simplex_point(rng, 3)
        prices = rng.uniform(1.0, 5.0, size=3)
        dom = Domain.cont_knapsack(prices, 7.0)
        sol = solve_cobb_douglas_knapsack(theta, dom)
        # θ_i / x_i = λ p_i
        lam = theta.values / (sol.x * prices)
        assert np.ptp(lam) <= 1e-10 * lam.max()
        assert abs(np.dot(prices, sol.x) - 7.0) <= 1e-10


class TestCustom1d:
    @pytest.fixture
    def inst(self):
        return Instance(1, UtilityForm.custom_1d("obscuring"), Domain.interval(-1.0, 1.0))

    @pytest.mark.parametrize("theta, expected", [(-1.0, -1.0), (0.0, -1.0), (3.0, 0.0), (1.0, 0.0)])
    def test_case_analysis(self, inst, theta, expected):
        assert_array_equal(solve_custom_1d(theta, inst).x, [expected])

    @pytest.mark.parametrize("theta, expected", [(0.5, -1.0), (-0.5, 1.0), (0.0, 0.0)])
    def test_linear_form(self, theta, expected):
        inst = Instance(1, UtilityForm.custom_1d("linear"), Domain.interval(-1.0, 1.0))
        assert_array_equal(solve_forward(np.array([theta]), inst).x, [expected])

    def test_brute_force_agrees(self, inst):
        for theta in np.linspace(-3.0, 3.0, 13):
            assert_array_equal(brute_force_forward(theta, inst).x, solve_custom_1d(theta, inst).x)


def test_tie_break_prefers_smaller_norm_then_lexicographic():
    candidates = [np.array([1.0, 0.0]), np.array([0.0, 0.5]), np.array([-0.5, 0.0])]
    assert pick_with_tie_break(candidates, [0.0, 0.0, 0.0]) == 2
    assert pick_with_tie_break(candidates, [0.0, 0.0, 1.0]) == 1


def test_unsupported_pair_is_rejected():
    inst = Instance(1, UtilityForm.ces(), Domain.cont_knapsack([1.0, 1.0], 1.0))
    with pytest.raises(ConfigurationError):
        solve_forward(ParameterPoint([0.5, 0.5]), inst)


def test_brute_force_refuses_large_grids(rng):
    inst = quad_knapsack_instance(rng, 4)
    with pytest.raises(DimensionLimitError):
        brute_force_forward(random_simplex_point(rng, 4), inst)

    big = Instance(1, UtilityForm.quad_diag(np.ones(16)), Domain.bin_knapsack(np.ones(16), 3.0))
    with pytest.raises(DimensionLimitError):
        brute_force_forward(np.full(16, 1.0 / 16), big)


def test_brute_force_binary_subsets_are_exhaustive():
    inst = Instance(1, UtilityForm.quad_diag([0.5, 0.5, 0.5]), Domain.bin_knapsack([1.0, 1.0, 1.0], 2.0))
    theta = np.array([0.9, 0.8, 0.7])
    best = min(
        (np.array(bits, dtype=float) for bits in itertools.product((0, 1), repeat=3) if sum(bits) <= 2),
        key=lambda x: eval_f(x, theta, inst),
    )
    assert_array_equal(brute_force_forward(theta, inst).x, best)
    assert_array_equal(solve_forward(theta, inst).x, best)
