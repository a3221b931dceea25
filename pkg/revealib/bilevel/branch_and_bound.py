"""Best-first branch-and-bound on complementarity for the ℓ^pre implicit update."""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np

from ..colored_print import log_debug
from ..domain import DomainKind, Instance, Observation, ParameterPoint, UtilityKind
from ..errors import ConfigurationError, DimensionLimitError, SolverError
from ..forward import solve_custom_1d, solve_quad_continuous
from ..forward.qp import quad_kkt_residual
from .patterns import ComplementarityPattern, KktPoint, PreProblem, kkt_pattern_solve, solve_node

MAX_PRE_DIM = 15
NODE_LIMIT = 200_000
COMPLEMENTARITY_TOL = 1e-9
ACTIVE_TOL = 1e-9


@dataclass(order=True)
class BBNode:
    bound: float
    node_id: int
    pattern: ComplementarityPattern = field(compare=False)


@dataclass(frozen=True)
class PreStepResult:
    theta: ParameterPoint
    x: np.ndarray
    objective: float
    kkt: KktPoint | None
    nodes: int = 0


def _most_violated(problem, candidate, pattern):
    """The free pair with the largest min(a, b), or None when all free pairs are complementary."""
    slack = problem.c - problem.A @ candidate.x
    scale = max(1.0, float(np.abs(candidate.x).max(initial=0.0)), float(np.abs(candidate.theta).max(initial=0.0)))
    best, best_gap = None, COMPLEMENTARITY_TOL * scale
    for i, branch in enumerate(pattern.active_x):
        if branch is None:
            gap = min(max(candidate.x[i], 0.0), max(candidate.w[i], 0.0))
            if gap > best_gap:
                best, best_gap = ("x", i), gap
    for j, branch in enumerate(pattern.active_g):
        if branch is None:
            gap = min(max(candidate.v[j], 0.0), max(slack[j], 0.0))
            if gap > best_gap:
                best, best_gap = ("g", j), gap
    return best


def _implied_pattern(problem, candidate, pattern):
    """Completes a pattern by zeroing the smaller member of every free pair."""
    slack = problem.c - problem.A @ candidate.x
    active_x = tuple(
        branch if branch is not None else bool(candidate.x[i] <= candidate.w[i])
        for i, branch in enumerate(pattern.active_x)
    )
    active_g = tuple(
        branch if branch is not None else bool(slack[j] <= candidate.v[j])
        for j, branch in enumerate(pattern.active_g)
    )
    return ComplementarityPattern(active_x, active_g)


def _kkt_point(P, theta, A, c, x):
    _, w, v = quad_kkt_residual(P, theta, A, c, x)
    return KktPoint(
        x=x,
        w=w,
        v=v,
        active_x=tuple(bool(value) for value in x <= ACTIVE_TOL),
        active_g=tuple(bool(value) for value in c - A @ x <= ACTIVE_TOL * max(1.0, float(np.abs(c).max()))),
    )


def _as_point(theta, space):
    if space.is_simplex:
        return ParameterPoint.on_simplex(theta)
    return ParameterPoint(np.clip(theta, space.lo, space.hi), space)


def branch_and_bound(problem: PreProblem, incumbent_theta, incumbent_x, node_limit=NODE_LIMIT):
    """
    Global minimum of the single-level update by best-first search over patterns.

    Nodes are ordered by their relaxation value. A node whose relaxation is
    already complementary is closed by re-solving its implied complete
    pattern; otherwise it branches on the most violated free pair.

    Args:
        problem (PreProblem): The update data.
        incumbent_theta (numpy.ndarray): A feasible starting θ (the prox center).
        incumbent_x (numpy.ndarray): x(incumbent_theta; u).
        node_limit (int): Maximum number of node QPs.

    Returns:
        tuple: (theta, x, objective, nodes solved).
    """
    best_theta, best_x = incumbent_theta, incumbent_x
    best_obj = problem.objective(incumbent_theta, incumbent_x)
    counter = itertools.count()

    root = ComplementarityPattern.free(problem.n, problem.m)
    heap = [BBNode(-np.inf, next(counter), root)]
    nodes = 0

    while heap:
        node = heapq.heappop(heap)
        if node.bound >= best_obj - 1e-15 * max(1.0, abs(best_obj)):
            break
        nodes += 1
        if nodes > node_limit:
            raise SolverError(f"branch-and-bound hit the node limit ({node_limit}); lower n or raise the limit")

        relaxed = solve_node(problem, node.pattern)
        if relaxed is None or relaxed.objective >= best_obj:
            continue

        pair = _most_violated(problem, relaxed, node.pattern)
        if pair is None:
            closed = kkt_pattern_solve(_implied_pattern(problem, relaxed, node.pattern), problem)
            nodes += 1
            candidate = closed if closed is not None else relaxed
            if candidate.objective < best_obj:
                best_theta, best_x, best_obj = candidate.theta, candidate.x, candidate.objective
            continue

        kind, index = pair
        for value in (True, False):
            heapq.heappush(heap, BBNode(relaxed.objective, next(counter), node.pattern.fix(kind, index, value)))

    log_debug(f"branch-and-bound closed after {nodes} node QPs, objective {best_obj:.6g}")
    return best_theta, best_x, best_obj, nodes


def _pre_step_1d(theta_t, eta, inst, y, space):
    """
    Exact update for the 1-D custom utilities.

    x(θ) is piecewise constant in θ with breaks where two candidate actions
    tie. On each piece the objective is ½(θ − θ_t)² + η(x − y)², so the
    minimizer is θ_t clipped to the piece; pieces are open at a break where
    the action jumps, so points just inside each end are tried too.
    """
    lo, hi = space.lo, space.hi
    dom = inst.domain
    actions = [dom.lo, dom.hi] + ([0.0] if dom.lo <= 0.0 <= dom.hi else [])

    def f1_and_c(x):
        if inst.utility.custom == "obscuring":
            return x, (-1.0 if x == 0.0 else 0.0)
        return 0.0, x

    lines = [f1_and_c(x) for x in actions]
    breaks = {lo, hi}
    for (a1, b1), (a2, b2) in itertools.combinations(lines, 2):
        if b1 != b2:
            crossing = (a2 - a1) / (b1 - b2)
            if lo < crossing < hi:
                breaks.add(crossing)
    breaks = sorted(breaks)

    nudge = 1e-9 * (hi - lo)
    candidates = {float(np.clip(theta_t, lo, hi))}
    for a, b in zip(breaks[:-1], breaks[1:]):
        inner_a, inner_b = min(a + nudge, b), max(b - nudge, a)
        candidates.update({a, b, inner_a, inner_b, float(np.clip(theta_t, inner_a, inner_b))})

    def objective(theta):
        x = solve_custom_1d(theta, inst).x
        return 0.5 * (theta - theta_t) ** 2 + eta * float((x[0] - y[0]) ** 2), x

    best = min(sorted(candidates), key=lambda theta: (objective(theta)[0], abs(theta - theta_t)))
    value, x = objective(best)
    return PreStepResult(ParameterPoint(np.array([best]), space), x, value, None, len(candidates))


def implicit_pre_solve(theta_t: ParameterPoint, eta, inst: Instance, y, node_limit=NODE_LIMIT):
    """
    The ℓ^pre implicit update with its diagnostics.

    Args:
        theta_t (ParameterPoint): The prox center θ_t.
        eta (float): Step size η_t ≥ 0.
        inst (Instance): A quad step on ck or cp, or a custom-1d step.
        y (Observation or array_like): The revealed action.
        node_limit (int): Branch-and-bound node cap.

    Returns:
        PreStepResult: θ_{t+1}, its action, the update objective and the KKT point.
    """
    y = y.y if isinstance(y, Observation) else np.asarray(y, dtype=float)
    space = theta_t.space
    if eta < 0:
        raise ConfigurationError(f"step size must be nonnegative, got {eta}")

    if inst.utility.kind is UtilityKind.CUSTOM_1D:
        if space.is_simplex:
            raise ConfigurationError("custom-1d updates need a box parameter space")
        return _pre_step_1d(float(theta_t.values[0]), eta, inst, y, space)

    if inst.utility.kind is not UtilityKind.QUAD or inst.domain.kind not in (
        DomainKind.CONT_KNAPSACK, DomainKind.POLYTOPE
    ):
        raise ConfigurationError("the ℓ^pre oracle covers quadratic utilities on continuous knapsacks and polytopes")
    if inst.n > MAX_PRE_DIM:
        raise DimensionLimitError(f"the ℓ^pre oracle is capped at n={MAX_PRE_DIM}, got n={inst.n}; lower --n")

    P = inst.utility.P
    A, c = inst.domain.constraint_matrix()
    x_t = solve_quad_continuous(theta_t, inst.domain, P).x
    if eta == 0:
        return PreStepResult(theta_t, x_t, 0.0, _kkt_point(P, theta_t.values, A, c, x_t), 0)

    problem = PreProblem(np.asarray(theta_t.values), float(eta), y, P, A, c, space)
    theta, _, _, nodes = branch_and_bound(problem, problem.theta_t, x_t, node_limit)
    point, x = theta_t, x_t
    if theta is not problem.theta_t:
        moved = _as_point(theta, space)
        x_moved = solve_quad_continuous(moved, inst.domain, P).x
        # re-measured at the exact forward solution; never worse than staying put
        if problem.objective(moved.values, x_moved) < problem.objective(theta_t.values, x_t):
            point, x = moved, x_moved
    objective = problem.objective(point.values, x)
    return PreStepResult(point, x, objective, _kkt_point(P, point.values, A, c, x), nodes)


def implicit_pre_step(theta_t: ParameterPoint, eta, inst: Instance, y, node_limit=NODE_LIMIT):
    """θ_{t+1} = argmin over θ ∈ Θ of ½‖θ − θ_t‖² + η_t‖y_t − x(θ; u_t)‖²."""
    return implicit_pre_solve(theta_t, eta, inst, y, node_limit).theta


def pre_problem(theta_t: ParameterPoint, eta, inst: Instance, y):
    """Builds the PreProblem of one update, for the exhaustive oracle."""
    y = y.y if isinstance(y, Observation) else np.asarray(y, dtype=float)
    A, c = inst.domain.constraint_matrix()
    return PreProblem(np.asarray(theta_t.values), float(eta), y, inst.utility.P, A, c, theta_t.space)
