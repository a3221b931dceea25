"""Exhaustive forward solvers used as independent oracles in tests."""
import itertools

import numpy as np

from ..domain import DomainKind, Instance, ParameterPoint, UtilityKind, eval_f
from ..errors import ConfigurationError, DimensionLimitError
from .solvers import ForwardSolution, SolveStatus, pick_with_tie_break

MAX_GRID_DIM = 3
MAX_ENUM_DIM = 15
GRID_POINTS = {1: 2001, 2: 401, 3: 61}
ZOOM_ROUNDS = 6
ZOOM_CELLS = 3


def _batch_objective(X, theta, utility):
    if utility.kind is UtilityKind.QUAD:
        return 0.5 * (X * X) @ utility.P - X @ theta
    if utility.kind is UtilityKind.CES:
        return (X * X) @ theta
    if utility.kind is UtilityKind.COBB:
        return -np.log(X) @ theta
    raise ConfigurationError(f"no grid objective for utility '{utility.kind.value}'")


def _feasible_mask(X, dom):
    tol = 1e-12
    mask = np.all(X >= -tol, axis=1)
    if dom.kind is DomainKind.POLYTOPE:
        mask &= np.all(X @ dom.A.T <= dom.c * (1 + tol), axis=1)
    elif dom.kind is DomainKind.CONT_KNAPSACK:
        mask &= X @ dom.prices <= dom.budget * (1 + tol)
    return mask


def _lift(Z, dom):
    """Maps grid points to actions; eq-knapsack grids cover the first n − 1 coordinates."""
    if dom.kind is not DomainKind.EQ_KNAPSACK:
        return Z
    p = dom.prices
    last = (dom.budget - Z @ p[:-1]) / p[-1]
    return np.hstack([Z, last[:, None]])


def _grid_search(theta, inst):
    dom, utility = inst.domain, inst.utility
    upper = dom.coordinate_upper_bounds()
    if dom.kind is DomainKind.EQ_KNAPSACK:
        upper = upper[:-1]
    dim = upper.shape[0]
    lower = np.zeros(dim)
    if utility.kind is UtilityKind.COBB:
        lower = 1e-9 * upper

    if dim == 0:
        x = _lift(np.zeros((1, 0)), dom)[0]
        return ForwardSolution(x, eval_f(x, theta, inst), SolveStatus.OPTIMAL, 1)
    count = GRID_POINTS[dim]
    lo, hi = lower.copy(), upper.copy()
    best_x, best_val, evaluated = None, np.inf, 0

    for _ in range(ZOOM_ROUNDS):
        axes = [np.linspace(lo[k], hi[k], count) for k in range(dim)]
        Z = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
        X = _lift(Z, dom)
        mask = _feasible_mask(X, dom)
        if utility.kind is UtilityKind.COBB:
            mask &= np.all(X > 0, axis=1)
        X, Z = X[mask], Z[mask]
        evaluated += mask.size
        if not X.shape[0]:
            break
        values = _batch_objective(X, theta, utility)
        k = int(np.argmin(values))
        if values[k] < best_val:
            best_val, best_x = float(values[k]), X[k]
        steps = (hi - lo) / max(count - 1, 1)
        lo = np.maximum(Z[k] - ZOOM_CELLS * steps, lower)
        hi = np.minimum(Z[k] + ZOOM_CELLS * steps, upper)

    return ForwardSolution(best_x, eval_f(best_x, theta, inst), SolveStatus.OPTIMAL, evaluated)


def _enumerate(theta, inst, candidates):
    objectives = [eval_f(x, theta, inst) for x in candidates]
    best = pick_with_tie_break(candidates, objectives)
    return ForwardSolution(candidates[best], objectives[best], SolveStatus.OPTIMAL, len(candidates))


def brute_force_forward(theta, inst: Instance, resolution=1e-3):
    """
    Solves the forward problem by exhaustive search.

    Continuous domains are gridded (n ≤ 3) with a few zoom-in refinements, the
    bilinear knapsack by vertex enumeration, the binary knapsack by subset
    enumeration (n ≤ 15), and intervals by a grid that includes 0.

    Args:
        theta (ParameterPoint or array_like): The parameter.
        inst (Instance): The step.
        resolution (float): Grid spacing on interval domains.

    Returns:
        ForwardSolution: The best point found.

    Raises:
        DimensionLimitError: The instance is too large for the chosen enumeration.
    """
    theta = np.array(theta.values if isinstance(theta, ParameterPoint) else theta, dtype=float, ndmin=1)
    dom, utility = inst.domain, inst.utility
    n = dom.n

    if dom.kind is DomainKind.BIN_KNAPSACK:
        if n > MAX_ENUM_DIM:
            raise DimensionLimitError(f"subset enumeration is capped at n={MAX_ENUM_DIM}, got n={n}")
        candidates = [
            np.array(bits, dtype=float) for bits in itertools.product((0.0, 1.0), repeat=n)
            if np.dot(bits, dom.prices) <= dom.budget
        ]
        return _enumerate(theta, inst, candidates)

    if utility.kind is UtilityKind.BILINEAR:
        candidates = [np.zeros(n)] + [np.eye(n)[i] * dom.budget / dom.prices[i] for i in range(n)]
        return _enumerate(theta, inst, candidates)

    if dom.kind is DomainKind.INTERVAL:
        grid = np.linspace(dom.lo, dom.hi, int(np.ceil((dom.hi - dom.lo) / resolution)) + 1)
        if dom.lo <= 0.0 <= dom.hi:
            grid = np.union1d(grid, [0.0])
        return _enumerate(theta, inst, [np.array([x]) for x in grid])

    free = n - 1 if dom.kind is DomainKind.EQ_KNAPSACK else n
    if free > MAX_GRID_DIM:
        raise DimensionLimitError(f"grid search is capped at {MAX_GRID_DIM} free coordinates, got {free}")
    return _grid_search(theta, inst)
