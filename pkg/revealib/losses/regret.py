"""Offline comparators, regret traces and the relations they must satisfy."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from ..domain import NoiseMode, ParameterPoint, ParameterSpace
from ..errors import ConfigurationError, InvariantViolation, UnsupportedModeError
from .functions import LOSS_KINDS, LossKind, LossRecord

REGRET_TOL = 1e-6


class Comparator(str, Enum):
    HINDSIGHT = "hindsight"
    TRUTH = "truth"


def _theta_true(theta_true):
    return np.asarray(theta_true.values if isinstance(theta_true, ParameterPoint) else theta_true, dtype=float)


def offline_min(loss_kind, history: List[LossRecord], space: ParameterSpace, theta_true,
                mode=NoiseMode.PERFECT, comparator=Comparator.HINDSIGHT):
    """
    The comparator term of the regret over a history of steps.

    With the hindsight comparator this is min over Θ of Σ_t ℓ_t(θ): 0 for ℓ^pre,
    ℓ^sub and ℓ^est under perfect information (attained at θ_true), and the
    linear program min ⟨θ − θ_true, Σ s_t⟩ for ℓ^sim. With the truth comparator
    it is Σ_t ℓ_t(θ_true).

    Args:
        loss_kind (LossKind or str): Which loss.
        history (list[LossRecord]): The steps so far.
        space (ParameterSpace): The learner's Θ.
        theta_true (ParameterPoint): The hidden parameter.
        mode (NoiseMode): Observation mode of the history.
        comparator (Comparator or str): hindsight or truth.

    Returns:
        float: The offline value.

    Raises:
        UnsupportedModeError: Exact hindsight minima of ℓ^pre, ℓ^sub, ℓ^est under noise.
    """
    kind, mode, comparator = LossKind(loss_kind), NoiseMode(mode), Comparator(comparator)
    if not history:
        return 0.0

    if comparator is Comparator.TRUTH:
        return float(sum(record.truth.get(kind, 0.0) for record in history))

    if kind is LossKind.SIM:
        total = np.sum([record.s_t for record in history], axis=0)
        return space.vertices_min(total) - float(np.dot(_theta_true(theta_true), total))
    if mode.is_perfect:
        return 0.0
    raise UnsupportedModeError(
        f"the hindsight minimum of loss '{kind.value}' under '{mode.value}' observations is a bilevel program"
    )


def prefix_offline_minima(records: List[LossRecord], space, theta_true, mode=NoiseMode.PERFECT,
                          comparator=Comparator.HINDSIGHT):
    """
    offline_min for every prefix 1..T at once.

    Minima that are not computable in the given mode come back as NaN.

    Returns:
        dict[LossKind, numpy.ndarray]: Per-prefix offline values.
    """
    mode, comparator = NoiseMode(mode), Comparator(comparator)
    T = len(records)
    minima = {}

    if comparator is Comparator.TRUTH:
        for kind in LOSS_KINDS:
            minima[kind] = np.cumsum([record.truth.get(kind, 0.0) for record in records])
        return minima

    prefix_s = np.cumsum([record.s_t for record in records], axis=0) if T else np.zeros((0, 0))
    theta = _theta_true(theta_true)
    minima[LossKind.SIM] = np.array([space.vertices_min(S) - float(np.dot(theta, S)) for S in prefix_s])
    for kind in (LossKind.PRE, LossKind.SUB, LossKind.EST):
        minima[kind] = np.zeros(T) if mode.is_perfect else np.full(T, np.nan)
    return minima


@dataclass
class RegretTrace:
    """
    Per-step losses and regrets of one learner run on one instance stream.

    ``attrue`` is the same run re-measured with y_t replaced by x(θ_true; u_t),
    present for noisy observation modes.
    """

    instance: int
    losses: Dict[LossKind, np.ndarray]
    truth_losses: Dict[LossKind, np.ndarray]
    cumulative: Dict[LossKind, np.ndarray]
    offline: Dict[LossKind, np.ndarray]
    avg_regret: Dict[LossKind, np.ndarray]
    step_ms: np.ndarray
    thetas: Optional[np.ndarray] = None
    mode: NoiseMode = NoiseMode.PERFECT
    comparator: Comparator = Comparator.HINDSIGHT
    attrue: Optional["RegretTrace"] = None
    diagnostic: Optional[str] = None
    meta: dict = field(default_factory=dict)

    @property
    def T(self):
        return self.step_ms.shape[0]

    @property
    def ok(self):
        return self.diagnostic is None

    def regret(self, kind):
        """R_t = cumulative loss minus the offline value, for every prefix t."""
        kind = LossKind(kind)
        return self.cumulative[kind] - self.offline[kind]

    def final_regret(self, kind):
        return float(self.regret(kind)[-1]) if self.T else 0.0


def build_regret_trace(records: List[LossRecord], offline_mins, instance=0, step_ms=None, thetas=None,
                       mode=NoiseMode.PERFECT, comparator=Comparator.HINDSIGHT):
    """
    Assembles cumulative sums and running average regrets from a run's records.

    Args:
        records (list[LossRecord]): One record per step, in order.
        offline_mins (dict): Per-loss offline value, per prefix (array of length T) or final (scalar).
        instance (int): Instance index.
        step_ms (array_like, optional): Learner update time per step.
        thetas (array_like, optional): The iterates θ_1..θ_T.
        mode (NoiseMode): Observation mode.
        comparator (Comparator): Comparator used for offline_mins.

    Returns:
        RegretTrace: The trace.
    """
    T = len(records)
    step_ms = np.zeros(T) if step_ms is None else np.asarray(step_ms, dtype=float)
    if step_ms.shape[0] != T:
        raise ConfigurationError(f"{T} loss records but {step_ms.shape[0]} step timings")

    steps = np.arange(1, T + 1, dtype=float)
    losses, truth_losses, cumulative, offline, avg_regret = {}, {}, {}, {}, {}
    for kind in LOSS_KINDS:
        losses[kind] = np.array([record.value(kind) for record in records], dtype=float)
        truth_losses[kind] = np.array([record.truth.get(kind, np.nan) for record in records], dtype=float)
        cumulative[kind] = np.cumsum(losses[kind])
        value = np.asarray(offline_mins.get(kind, np.nan), dtype=float)
        offline[kind] = np.broadcast_to(value, (T,)).copy() if value.ndim == 0 else value
        if offline[kind].shape[0] != T:
            raise ConfigurationError(f"offline minima for '{kind.value}' have length {offline[kind].shape[0]}, expected {T}")
        avg_regret[kind] = (cumulative[kind] - offline[kind]) / steps

    return RegretTrace(
        instance=instance,
        losses=losses,
        truth_losses=truth_losses,
        cumulative=cumulative,
        offline=offline,
        avg_regret=avg_regret,
        step_ms=step_ms,
        thetas=None if thetas is None else np.asarray(thetas, dtype=float),
        mode=NoiseMode(mode),
        comparator=Comparator(comparator),
    )


def _violations(lhs, rhs, tol):
    """Indices where lhs ≥ rhs fails by more than tol (scaled by magnitude)."""
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return np.flatnonzero(lhs < rhs - tol * scale)


def check_perfect_information(trace: RegretTrace, gamma=None, tol=REGRET_TOL):
    """
    Checks the regret relations that hold when y_t = x(θ_true; u_t).

    R^sim ≥ R^sub + R^est ≥ 0 and R^sub + R^est = Σ ℓ^sim_t(θ_t) at every prefix;
    with gamma (the strong convexity modulus of a continuous quadratic forward
    problem) also R^sub ≥ (γ/2)·R^pre.

    Raises:
        InvariantViolation: The first relation that fails, with its step.
    """
    r_sub, r_est, r_sim, r_pre = (trace.regret(k) for k in (LossKind.SUB, LossKind.EST, LossKind.SIM, LossKind.PRE))
    sim_sum = trace.cumulative[LossKind.SIM]

    checks = [
        ("R^sim ≥ R^sub + R^est", r_sim, r_sub + r_est),
        ("R^sub + R^est ≥ 0", r_sub + r_est, np.zeros_like(r_sub)),
        ("R^sub + R^est ≥ Σℓ^sim", r_sub + r_est, sim_sum),
        ("Σℓ^sim ≥ R^sub + R^est", sim_sum, r_sub + r_est),
    ]
    if gamma is not None:
        checks.append(("R^sub ≥ (γ/2)·R^pre", r_sub, 0.5 * gamma * r_pre))

    for name, lhs, rhs in checks:
        bad = _violations(lhs, rhs, tol)
        if bad.size:
            t = int(bad[0])
            raise InvariantViolation(
                f"instance {trace.instance}: {name} fails at t={t + 1} ({lhs[t]:.12g} vs {rhs[t]:.12g})"
            )


def check_suboptimal_feasible(trace: RegretTrace, tol=REGRET_TOL):
    """
    Checks the relations that survive when every y_t is feasible but suboptimal.

    ℓ^sub_t(θ_t) ≥ 0 for all t, Σℓ^est_t(θ_true) ≤ 0, and R^sim ≥ Σℓ^sim_t(θ_t),
    the last one being R^sim ≥ R^sub + R^est with the truth comparator.

    Raises:
        InvariantViolation: The first relation that fails.
    """
    l_sub = trace.losses[LossKind.SUB]
    bad = _violations(l_sub, np.zeros_like(l_sub), tol)
    if bad.size:
        raise InvariantViolation(f"instance {trace.instance}: ℓ^sub_t < 0 at t={int(bad[0]) + 1}")

    est_true = np.cumsum(trace.truth_losses[LossKind.EST])
    bad = _violations(np.zeros_like(est_true), est_true, tol)
    if bad.size:
        raise InvariantViolation(f"instance {trace.instance}: Σℓ^est(θ_true) > 0 at t={int(bad[0]) + 1}")

    bad = _violations(trace.regret(LossKind.SIM), trace.cumulative[LossKind.SIM], tol)
    if bad.size:
        raise InvariantViolation(f"instance {trace.instance}: R^sim < Σℓ^sim at t={int(bad[0]) + 1}")
