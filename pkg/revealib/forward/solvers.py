"""Forward problem x(θ; u) = argmin f(x; θ, u) over the step's domain."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..colored_print import log_warn
from ..domain import Domain, DomainKind, Instance, ParameterPoint, UtilityKind, eval_f
from ..errors import ConfigurationError, NumericalGuardError, SolverError
from .qp import quad_kkt_residual, solve_nonneg_polytope_qp

THETA_FLOOR = 1e-9
TIE_TOL = 1e-12
BUDGET_RTOL = 1e-10
BISECTION_MAX_ITER = 200


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    MAX_ITER = "max-iter"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class ForwardSolution:
    x: np.ndarray
    objective: float
    status: SolveStatus
    iterations: int = 0

    def __post_init__(self):
        x = np.array(self.x, dtype=float, ndmin=1)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @property
    def tie_break_norm(self):
        return float(np.linalg.norm(self.x))

    @property
    def ok(self):
        return self.status is SolveStatus.OPTIMAL


def _theta_values(theta):
    values = theta.values if isinstance(theta, ParameterPoint) else theta
    values = np.array(values, dtype=float, ndmin=1)
    if not np.all(np.isfinite(values)):
        raise NumericalGuardError("theta has non-finite entries")
    return values


def _floored(theta, floor=THETA_FLOOR):
    """Clamps θ to the floor; a coordinate that is genuinely negative is an error."""
    if np.any(theta < -THETA_FLOOR):
        raise NumericalGuardError(f"closed form needs θ ≥ 0, got min θ_i = {theta.min():.3e}")
    return np.maximum(theta, floor)


def _quad_objective(x, theta, P):
    return 0.5 * float(np.dot(P * x, x)) - float(np.dot(theta, x))


def solve_quad_continuous(theta, dom: Domain, P):
    """
    Minimizes ½xᵀPx − ⟨θ,x⟩ (P diagonal) over a continuous knapsack or polytope.

    The knapsack path clips the unconstrained point θ/P and, when the budget
    binds, bisects on the budget multiplier λ with x_i(λ) = max(0, (θ_i − λp_i)/P_ii).
    The polytope path runs the operator-splitting QP solver.

    Args:
        theta (ParameterPoint or array_like): The parameter.
        dom (Domain): A ck or cp domain.
        P (array_like): Positive diagonal of P.

    Returns:
        ForwardSolution: The unique minimizer.
    """
    theta = _theta_values(theta)
    P = np.asarray(P, dtype=float)

    if dom.kind is DomainKind.POLYTOPE:
        result = solve_nonneg_polytope_qp(P, theta, dom.A, dom.c)
        status = SolveStatus.OPTIMAL if result.converged else SolveStatus.MAX_ITER
        return ForwardSolution(result.x, _quad_objective(result.x, theta, P), status, result.iterations)

    if dom.kind is not DomainKind.CONT_KNAPSACK:
        raise ConfigurationError(f"continuous quadratic solver does not handle domain '{dom.kind.value}'")

    p, b = dom.prices, dom.budget
    x = np.maximum(theta / P, 0.0)
    if np.dot(p, x) <= b:
        return ForwardSolution(x, _quad_objective(x, theta, P), SolveStatus.OPTIMAL, 0)

    def x_of(lam):
        return np.maximum((theta - lam * p) / P, 0.0)

    lo, hi = 0.0, float(np.max(theta / p))
    iterations = 0
    while iterations < BISECTION_MAX_ITER:
        iterations += 1
        mid = 0.5 * (lo + hi)
        if np.dot(p, x_of(mid)) > b:
            lo = mid
        else:
            hi = mid
        # x(hi) is always within budget; stop once it is also tight enough
        if b - np.dot(p, x_of(hi)) <= BUDGET_RTOL * b or hi - lo <= 1e-16 * max(hi, 1.0):
            break

    x = x_of(hi)
    return ForwardSolution(x, _quad_objective(x, theta, P), SolveStatus.OPTIMAL, iterations)


def solve_binary_knapsack(theta, dom: Domain, P):
    """
    Exact optimum of ½xᵀPx − ⟨θ,x⟩ over {x ∈ {0,1}^n : ⟨p,x⟩ ≤ b}.

    On binaries x_i² = x_i, so this is the 0/1 knapsack maximizing Σ(θ_i − ½P_ii)x_i,
    solved by dynamic programming over the integer budget ⌊b⌋. Ties go to fewer
    items (smaller norm), then to the lexicographically smaller vector: items
    enter the table last index first, so the walk back decides x_0 first and
    leaves an item out whenever that keeps the optimum.

    Args:
        theta (ParameterPoint or array_like): The parameter.
        dom (Domain): A bk domain with integer prices.
        P (array_like): Positive diagonal of P.

    Returns:
        ForwardSolution: The optimal 0/1 action.
    """
    theta = _theta_values(theta)
    P = np.asarray(P, dtype=float)
    prices = dom.prices
    if not np.all(prices == np.round(prices)):
        raise ConfigurationError("binary knapsack needs integer prices")

    values = theta - 0.5 * P
    weights = prices.astype(np.int64)
    capacity = int(np.floor(dom.budget))
    items = [i for i in reversed(range(theta.shape[0])) if values[i] > 0 and weights[i] <= capacity]

    best_val = np.zeros(capacity + 1)
    best_cnt = np.zeros(capacity + 1, dtype=np.int64)
    keep = np.zeros((len(items), capacity + 1), dtype=bool)

    for row, i in enumerate(items):
        w = weights[i]
        take_val = best_val[:capacity + 1 - w] + values[i]
        take_cnt = best_cnt[:capacity + 1 - w] + 1
        skip_val = best_val[w:]
        skip_cnt = best_cnt[w:]
        better = (take_val > skip_val + TIE_TOL) | (
            (np.abs(take_val - skip_val) <= TIE_TOL) & (take_cnt < skip_cnt)
        )
        best_val[w:] = np.where(better, take_val, skip_val)
        best_cnt[w:] = np.where(better, take_cnt, skip_cnt)
        keep[row, w:] = better

    x = np.zeros(theta.shape[0])
    remaining = capacity
    for row in range(len(items) - 1, -1, -1):
        if keep[row, remaining]:
            i = items[row]
            x[i] = 1.0
            remaining -= weights[i]

    return ForwardSolution(x, _quad_objective(x, theta, P), SolveStatus.OPTIMAL, len(items))


def solve_ces_eq_knapsack(theta, dom: Domain):
    """
    Minimizes Σθ_i x_i² over {x ≥ 0 : ⟨p,x⟩ = b}.

    Closed form x_i = λp_i/(2θ_i) with λ = 2b / Σ_j p_j²/θ_j.

    Args:
        theta (ParameterPoint or array_like): The parameter, floored at THETA_FLOOR.
        dom (Domain): An eck domain.

    Returns:
        ForwardSolution: The unique minimizer.
    """
    theta = _floored(_theta_values(theta))
    p, b = dom.prices, dom.budget
    lam = 2.0 * b / float(np.sum(p * p / theta))
    x = lam * p / (2.0 * theta)
    return ForwardSolution(x, float(np.dot(theta, x * x)), SolveStatus.OPTIMAL, 0)


def solve_bilinear_knapsack(theta, dom: Domain):
    """
    Maximizes ⟨θ,x⟩ over the continuous knapsack by the greedy LP rule.

    The whole budget goes to the first index maximizing θ_i/p_i; when no ratio
    is positive x = 0 (the smallest-norm optimum).

    Args:
        theta (ParameterPoint or array_like): A nonnegative parameter.
        dom (Domain): A ck domain.

    Returns:
        ForwardSolution: An optimal vertex.
    """
    theta = _theta_values(theta)
    ratios = theta / dom.prices
    x = np.zeros(theta.shape[0])
    best = int(np.argmax(ratios))
    if ratios[best] > 0:
        x[best] = dom.budget / dom.prices[best]
    return ForwardSolution(x, -float(np.dot(theta, x)), SolveStatus.OPTIMAL, 0)


def solve_cobb_douglas_knapsack(theta, dom: Domain):
    """
    Maximizes Σθ_i log x_i over the continuous knapsack.

    The budget binds and x_i = θ_i b / (p_i Σθ); for θ on the simplex this is θ_i b / p_i.

    Args:
        theta (ParameterPoint or array_like): The parameter, floored at THETA_FLOOR.
        dom (Domain): A ck domain.

    Returns:
        ForwardSolution: The unique maximizer.
    """
    theta = _floored(_theta_values(theta))
    x = theta * dom.budget / (dom.prices * theta.sum())
    return ForwardSolution(x, -float(np.dot(theta, np.log(x))), SolveStatus.OPTIMAL, 0)


def pick_with_tie_break(candidates, objectives, tol=TIE_TOL):
    """
    Index of the best candidate: lowest objective, then smaller Euclidean norm, then lexicographic.

    Args:
        candidates (list[numpy.ndarray]): Candidate actions.
        objectives (list[float]): Their objective values.

    Returns:
        int: Index into candidates.
    """
    objectives = np.asarray(objectives, dtype=float)
    best = objectives.min()
    tied = [i for i in range(len(candidates)) if objectives[i] <= best + tol]
    return min(tied, key=lambda i: (round(float(np.linalg.norm(candidates[i])), 12), tuple(candidates[i])))


def solve_custom_1d(theta, inst: Instance):
    """
    Exact forward solve for the 1-D custom utilities over an interval.

    Both built-in forms are piecewise linear with their only break at 0, so
    the optimum is among the interval endpoints and 0.

    Args:
        theta (float or ParameterPoint): The scalar parameter.
        inst (Instance): A custom-1d instance on an interval domain.

    Returns:
        ForwardSolution: The optimum under the smaller-norm tie-break.
    """
    theta = _theta_values(theta)
    dom = inst.domain
    points = [dom.lo, dom.hi]
    if dom.lo <= 0.0 <= dom.hi:
        points.append(0.0)
    candidates = [np.array([point]) for point in points]
    objectives = [eval_f(x, theta, inst) for x in candidates]
    best = pick_with_tie_break(candidates, objectives)
    return ForwardSolution(candidates[best], objectives[best], SolveStatus.OPTIMAL, len(candidates))


def solve_forward(theta, inst: Instance):
    """
    Dispatches x(θ; u_t) to the solver for the step's (utility, domain) pair.

    Args:
        theta (ParameterPoint or array_like): The parameter.
        inst (Instance): The step.

    Returns:
        ForwardSolution: The forward solution; status may be max-iter for the polytope path.
    """
    kind, dom = inst.utility.kind, inst.domain

    if kind is UtilityKind.QUAD:
        if dom.kind in (DomainKind.CONT_KNAPSACK, DomainKind.POLYTOPE):
            return solve_quad_continuous(theta, dom, inst.utility.P)
        if dom.kind is DomainKind.BIN_KNAPSACK:
            return solve_binary_knapsack(theta, dom, inst.utility.P)
    elif kind is UtilityKind.CES and dom.kind is DomainKind.EQ_KNAPSACK:
        return solve_ces_eq_knapsack(theta, dom)
    elif kind is UtilityKind.BILINEAR and dom.kind is DomainKind.CONT_KNAPSACK:
        return solve_bilinear_knapsack(theta, dom)
    elif kind is UtilityKind.COBB and dom.kind is DomainKind.CONT_KNAPSACK:
        return solve_cobb_douglas_knapsack(theta, dom)
    elif kind is UtilityKind.CUSTOM_1D:
        return solve_custom_1d(theta, inst)

    raise ConfigurationError(f"no forward solver for utility '{kind.value}' on domain '{dom.kind.value}'")


def solve_forward_checked(theta, inst: Instance):
    """
    solve_forward that raises on infeasibility and warns on an iteration cap.

    Raises:
        SolverError: The domain was infeasible.
    """
    sol = solve_forward(theta, inst)
    if sol.status is SolveStatus.INFEASIBLE:
        raise SolverError(f"forward problem at t={inst.t} is infeasible", sol)
    if sol.status is SolveStatus.MAX_ITER:
        log_warn(f"forward solve at t={inst.t} hit the iteration cap after {sol.iterations} iterations")
    return sol


def kkt_residual(sol: ForwardSolution, theta, inst: Instance):
    """
    KKT residual of a quadratic forward solution on a ck or cp domain.

    Args:
        sol (ForwardSolution): The solution to check.
        theta (ParameterPoint or array_like): The parameter it was solved at.
        inst (Instance): A quad instance on a continuous knapsack or polytope.

    Returns:
        float: max of the stationarity and primal-feasibility violations.
    """
    if inst.utility.kind is not UtilityKind.QUAD or inst.domain.kind not in (
        DomainKind.CONT_KNAPSACK, DomainKind.POLYTOPE
    ):
        raise ConfigurationError("kkt_residual covers the quadratic continuous cases only")
    A, c = inst.domain.constraint_matrix()
    residual, _, _ = quad_kkt_residual(inst.utility.P, _theta_values(theta), A, c, sol.x)
    return residual
