"""
Single-level reformulation of the ℓ^pre implicit update.

The update

    min over θ ∈ Θ of ½‖θ − θ_t‖² + η‖y − x(θ; u)‖²,
    x(θ; u) = argmin {½xᵀPx − ⟨θ, x⟩ : x ≥ 0, Ax ≤ c}

is written over z = (θ, x, v) with w = Px − θ + Aᵀv. Every complementarity
pair (x_i, w_i) and (v_j, c_j − A_j x) is either fixed to one branch by a
pattern or left free; a free pair keeps both sign constraints, which relaxes
the complementarity. Each node is a strictly convex QP handed to quadprog.
"""
import itertools
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from quadprog import solve_qp

from ..domain import ParameterSpace
from ..errors import DimensionLimitError

# keeps the quadprog Hessian positive definite in the multiplier block
MU_REG = 1e-8
MAX_ENUM_PAIRS = 12


@dataclass(frozen=True)
class ComplementarityPattern:
    """
    Branch choices for every complementarity pair.

    active_x[i]: True fixes x_i = 0, False fixes w_i = 0, None leaves the pair free.
    active_g[j]: True fixes A_j x = c_j, False fixes v_j = 0, None leaves the pair free.
    """

    active_x: Tuple[Optional[bool], ...]
    active_g: Tuple[Optional[bool], ...]

    @classmethod
    def free(cls, n, m):
        return cls((None,) * n, (None,) * m)

    @property
    def is_complete(self):
        return None not in self.active_x and None not in self.active_g

    def fix(self, kind, index, value):
        if kind == "x":
            active_x = list(self.active_x)
            active_x[index] = value
            return ComplementarityPattern(tuple(active_x), self.active_g)
        active_g = list(self.active_g)
        active_g[index] = value
        return ComplementarityPattern(self.active_x, tuple(active_g))


@dataclass(frozen=True)
class KktPoint:
    """A primal point of the inner problem with its multipliers."""

    x: np.ndarray
    w: np.ndarray
    v: np.ndarray
    active_x: Tuple[bool, ...]
    active_g: Tuple[bool, ...]

    def residuals(self, P, theta, A, c):
        """(stationarity, complementarity) residuals as max-abs values."""
        stationarity = P * self.x - theta + A.T @ self.v - self.w
        complementarity = np.concatenate([self.w * self.x, self.v * (A @ self.x - c)])
        return float(np.abs(stationarity).max(initial=0.0)), float(np.abs(complementarity).max(initial=0.0))


@dataclass(frozen=True)
class PreProblem:
    """Data of one ℓ^pre update: prox center, step, observation and inner problem."""

    theta_t: np.ndarray
    eta: float
    y: np.ndarray
    P: np.ndarray
    A: np.ndarray
    c: np.ndarray
    space: ParameterSpace

    @property
    def n(self):
        return self.P.shape[0]

    @property
    def m(self):
        return self.A.shape[0]

    def objective(self, theta, x):
        diff = x - self.y
        return 0.5 * float(np.dot(theta - self.theta_t, theta - self.theta_t)) + self.eta * float(np.dot(diff, diff))


@dataclass(frozen=True)
class PatternCandidate:
    theta: np.ndarray
    x: np.ndarray
    v: np.ndarray
    w: np.ndarray
    objective: float


def _constraint_rows(problem: PreProblem, pattern: ComplementarityPattern):
    n, m = problem.n, problem.m
    N = 2 * n + m
    th, xs, vs = slice(0, n), slice(n, 2 * n), slice(2 * n, N)
    eq, eq_rhs, ineq, ineq_rhs = [], [], [], []

    def unit(block_start, i, value=1.0):
        row = np.zeros(N)
        row[block_start + i] = value
        return row

    def w_row(i):
        row = np.zeros(N)
        row[th][i] = -1.0
        row[xs][i] = problem.P[i]
        row[vs] = problem.A[:, i]
        return row

    def g_row(j):
        row = np.zeros(N)
        row[xs] = problem.A[j]
        return row

    if problem.space.is_simplex:
        row = np.zeros(N)
        row[th] = 1.0
        eq.append(row)
        eq_rhs.append(1.0)
        for i in range(n):
            ineq.append(unit(0, i))
            ineq_rhs.append(0.0)
    else:
        for i in range(n):
            ineq.append(unit(0, i))
            ineq_rhs.append(problem.space.lo)
            ineq.append(unit(0, i, -1.0))
            ineq_rhs.append(-problem.space.hi)

    for i, branch in enumerate(pattern.active_x):
        x_row, w = unit(n, i), w_row(i)
        if branch is True:
            eq.append(x_row)
            eq_rhs.append(0.0)
            ineq.append(w)
            ineq_rhs.append(0.0)
        elif branch is False:
            eq.append(w)
            eq_rhs.append(0.0)
            ineq.append(x_row)
            ineq_rhs.append(0.0)
        else:
            ineq.extend([x_row, w])
            ineq_rhs.extend([0.0, 0.0])

    for j, branch in enumerate(pattern.active_g):
        v_row, g = unit(2 * n, j), g_row(j)
        if branch is True:
            eq.append(g)
            eq_rhs.append(problem.c[j])
            ineq.append(v_row)
            ineq_rhs.append(0.0)
        elif branch is False:
            eq.append(v_row)
            eq_rhs.append(0.0)
            ineq.append(-g)
            ineq_rhs.append(-problem.c[j])
        else:
            ineq.extend([v_row, -g])
            ineq_rhs.extend([0.0, -problem.c[j]])

    C = np.vstack(eq + ineq).T
    b = np.array(eq_rhs + ineq_rhs)
    return C, b, len(eq)


def solve_node(problem: PreProblem, pattern: ComplementarityPattern):
    """
    Solves the node QP of a (possibly partial) pattern.

    Args:
        problem (PreProblem): The update data.
        pattern (ComplementarityPattern): Fixed branches; free pairs are relaxed.

    Returns:
        PatternCandidate or None: The node optimum, None when the node is infeasible.
    """
    n, m = problem.n, problem.m
    hessian = np.concatenate([np.ones(n), np.full(n, 2.0 * problem.eta + MU_REG), np.full(m, MU_REG)])
    linear = np.concatenate([problem.theta_t, 2.0 * problem.eta * problem.y, np.zeros(m)])
    C, b, meq = _constraint_rows(problem, pattern)

    try:
        z = solve_qp(np.diag(hessian), linear, np.ascontiguousarray(C), b, meq)[0]
    except ValueError:
        return None

    theta, x, v = z[:n], z[n:2 * n], z[2 * n:]
    w = problem.P * x - theta + problem.A.T @ v
    return PatternCandidate(theta, x, v, w, problem.objective(theta, x))


def kkt_pattern_solve(pattern: ComplementarityPattern, problem: PreProblem):
    """
    The best (θ, x) consistent with a complete complementarity pattern.

    Fixing every pair turns the KKT conditions of the inner problem into
    linear equalities plus sign constraints, so any feasible point has
    x = x(θ; u) and the node QP is the restriction of the update to the pattern.

    Args:
        pattern (ComplementarityPattern): A complete pattern.
        problem (PreProblem): The update data.

    Returns:
        PatternCandidate or None: None when the pattern admits no KKT point.
    """
    if not pattern.is_complete:
        raise ValueError("kkt_pattern_solve needs every complementarity pair fixed")
    return solve_node(problem, pattern)


def enumerate_patterns(problem: PreProblem):
    """
    Exhaustive oracle: solves every complete pattern and keeps the best.

    Args:
        problem (PreProblem): The update data, with n + m ≤ 12.

    Returns:
        PatternCandidate: The optimum over all patterns.
    """
    n, m = problem.n, problem.m
    if n + m > MAX_ENUM_PAIRS:
        raise DimensionLimitError(f"pattern enumeration is capped at {MAX_ENUM_PAIRS} pairs, got {n + m}")

    best = None
    for bits in itertools.product((True, False), repeat=n + m):
        candidate = kkt_pattern_solve(ComplementarityPattern(bits[:n], bits[n:]), problem)
        if candidate is not None and (best is None or candidate.objective < best.objective):
            best = candidate
    return best
