"""
Operator-splitting solver for the separable quadratic program

    min ½ xᵀ diag(P) x − ⟨θ, x⟩   s.t.   A x ≤ c,  x ≥ 0

with an active-set polish step, plus a KKT residual diagnostic.

The splitting is the ADMM iteration on the constraint block C = [A; I] with
bounds l ≤ Cx ≤ u. Once the duals settle, the polish step solves the
equality-constrained QP on the guessed active set and keeps it when it is
primal feasible with correctly signed multipliers, which makes the returned
point exact to linear-solve precision.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import nnls

RHO = 0.1
SIGMA = 1e-6
ALPHA = 1.6
CHECK_EVERY = 10


@dataclass(frozen=True)
class QPResult:
    x: np.ndarray
    iterations: int
    converged: bool
    polished: bool
    primal_residual: float
    dual_residual: float


def _polish(P, q, C, l, u, y, delta=1e-9):
    lower = y < -delta
    upper = y > delta
    active = lower | upper
    n = P.shape[0]
    C_act = C[active]
    b_act = np.where(upper[active], u[active], l[active])
    k = C_act.shape[0]

    K = np.zeros((n + k, n + k))
    K[:n, :n] = np.diag(P)
    K[:n, n:] = C_act.T
    K[n:, :n] = C_act
    rhs = np.concatenate([-q, b_act])
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    x, nu = sol[:n], sol[n:]

    Cx = C @ x
    tol = 1e-10 * max(1.0, float(np.abs(u[np.isfinite(u)]).max(initial=1.0)))
    if np.any(Cx > u + tol) or np.any(Cx < l - tol):
        return None
    if np.any(nu[upper[active]] < -1e-10) or np.any(nu[lower[active]] > 1e-10):
        return None
    return np.maximum(x, 0.0)


def solve_nonneg_polytope_qp(P, theta, A, c, eps=1e-8, max_iter=50_000):
    """
    Solves min ½xᵀdiag(P)x − ⟨θ,x⟩ over {x ≥ 0, Ax ≤ c}.

    Args:
        P (numpy.ndarray): Positive diagonal of the Hessian.
        theta (numpy.ndarray): Linear coefficient (the objective has −θ).
        A (numpy.ndarray): Nonnegative m×n constraint matrix.
        c (numpy.ndarray): Positive right-hand side.
        eps (float): Primal and dual residual target.
        max_iter (int): Iteration cap.

    Returns:
        QPResult: The solution and its convergence diagnostics.
    """
    P = np.asarray(P, dtype=float)
    q = -np.asarray(theta, dtype=float)
    n = P.shape[0]

    row_norms = np.linalg.norm(A, axis=1)
    row_norms[row_norms == 0] = 1.0
    A_s = A / row_norms[:, None]
    c_s = c / row_norms

    C = np.vstack([A_s, np.eye(n)])
    l = np.concatenate([np.full(A.shape[0], -np.inf), np.zeros(n)])
    u = np.concatenate([c_s, np.full(n, np.inf)])

    factor = cho_factor(np.diag(P + SIGMA) + RHO * C.T @ C)
    x = np.zeros(n)
    z = np.zeros(C.shape[0])
    y = np.zeros(C.shape[0])
    last_active = None
    r_prim = r_dual = np.inf

    for it in range(1, max_iter + 1):
        x_tilde = cho_solve(factor, SIGMA * x - q + C.T @ (RHO * z - y))
        z_tilde = C @ x_tilde
        x = ALPHA * x_tilde + (1.0 - ALPHA) * x
        z_relaxed = ALPHA * z_tilde + (1.0 - ALPHA) * z
        z_next = np.clip(z_relaxed + y / RHO, l, u)
        y = y + RHO * (z_relaxed - z_next)
        z = z_next

        if it % CHECK_EVERY:
            continue
        r_prim = float(np.abs(C @ x - z).max())
        r_dual = float(np.abs(P * x + q + C.T @ y).max())

        active = tuple(np.flatnonzero(np.abs(y) > 1e-9))
        if active != last_active or (r_prim <= eps and r_dual <= eps):
            last_active = active
            polished = _polish(P, q, C, l, u, y)
            if polished is not None:
                return QPResult(polished, it, True, True, r_prim, r_dual)
        if r_prim <= eps and r_dual <= eps:
            return QPResult(np.maximum(x, 0.0), it, True, False, r_prim, r_dual)

    return QPResult(np.maximum(x, 0.0), max_iter, False, False, r_prim, r_dual)


def quad_kkt_residual(P, theta, A, c, x, tol=1e-9):
    """
    KKT residual of x for min ½xᵀdiag(P)x − ⟨θ,x⟩ over {x ≥ 0, Ax ≤ c}.

    Multipliers are recovered by nonnegative least squares restricted to the
    constraints active at x, so complementarity holds by construction and the
    residual measures stationarity plus primal infeasibility.

    Args:
        P, theta, A, c: Problem data (A, c may describe zero rows).
        x (numpy.ndarray): Candidate point.
        tol (float): Activity threshold, relative to the constraint scale.

    Returns:
        tuple: (residual, w, v) with w the multipliers of x ≥ 0 and v those of Ax ≤ c.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    m = A.shape[0]
    scale = max(1.0, float(np.abs(c).max(initial=1.0)))

    grad = P * x - np.asarray(theta, dtype=float)
    slack = c - A @ x
    at_zero = np.flatnonzero(x <= tol * max(1.0, float(np.abs(x).max(initial=1.0))))
    tight = np.flatnonzero(slack <= tol * scale)

    # grad + Aᵀv − w = 0  ⇔  [Aᵀ_tight, −I_zero] [v; w] = −grad
    M = np.hstack([A[tight].T, -np.eye(n)[:, at_zero]])
    v = np.zeros(m)
    w = np.zeros(n)
    if M.shape[1]:
        coef, _ = nnls(M, -grad)
        v[tight] = coef[:tight.size]
        w[at_zero] = coef[tight.size:]

    stationarity = float(np.abs(grad + A.T @ v - w).max(initial=0.0))
    infeasibility = max(float(max(-x.min(), 0.0)), float(np.max(-slack, initial=0.0)))
    return max(stationarity, infeasibility), w, v
