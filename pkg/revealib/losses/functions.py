"""
Loss functions of the inverse problem.

The learner only ever sees the ℓ^sim subgradient s_t = c(y_t) − c(x(θ_t; u_t)).
Everything that touches θ_true (the loss values themselves and the losses at
θ_true used as a comparator) is evaluator-side.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

from ..domain import Instance, Observation, ParameterPoint, c_map, eval_f
from ..forward import solve_forward_checked


class LossKind(str, Enum):
    PRE = "pre"
    SUB = "sub"
    EST = "est"
    SIM = "sim"


LOSS_KINDS = tuple(LossKind)


def _y(y):
    return y.y if isinstance(y, Observation) else np.asarray(y, dtype=float)


def _vec(theta):
    return np.asarray(theta.values if isinstance(theta, ParameterPoint) else theta, dtype=float).ravel()


@dataclass(frozen=True)
class LossRecord:
    """
    The four losses at θ_t for one step.

    ``truth`` holds the same four losses evaluated at θ = θ_true; ℓ^sim is
    always 0 there, the others are 0 only under perfect information.
    """

    t: int
    l_pre: float
    l_sub: float
    l_est: float
    l_sim: float
    s_t: np.ndarray
    x_pred: np.ndarray
    y: np.ndarray
    truth: Dict[LossKind, float] = field(default_factory=dict)

    def value(self, kind):
        return getattr(self, f"l_{LossKind(kind).value}")


def sim_subgradient(x_pred, y, utility):
    """The constant gradient c(y) − c(x_pred) of the linear loss ℓ^sim_t."""
    return c_map(_y(y), utility) - c_map(x_pred, utility)


def prediction_loss(theta, inst: Instance, y, x_theta=None):
    """ℓ^pre_t(θ) = ‖y − x(θ; u_t)‖²."""
    if x_theta is None:
        x_theta = solve_forward_checked(theta, inst).x
    diff = _y(y) - x_theta
    return float(np.dot(diff, diff))


def suboptimality_loss(theta, inst: Instance, y, x_theta=None):
    """ℓ^sub_t(θ) = f(y; θ, u_t) − f(x(θ; u_t); θ, u_t)."""
    if x_theta is None:
        x_theta = solve_forward_checked(theta, inst).x
    return eval_f(_y(y), theta, inst) - eval_f(x_theta, theta, inst)


def estimate_loss(theta, inst: Instance, y, theta_true, x_theta=None):
    """ℓ^est_t(θ) = f(x(θ; u_t); θ_true, u_t) − f(y; θ_true, u_t)."""
    if x_theta is None:
        x_theta = solve_forward_checked(theta, inst).x
    return eval_f(x_theta, theta_true, inst) - eval_f(_y(y), theta_true, inst)


def simple_loss(theta, s_t, theta_true):
    """ℓ^sim_t(θ) = ⟨θ − θ_true, s_t⟩, linear in θ."""
    return float(np.dot(_vec(theta) - _vec(theta_true), s_t))


def eval_losses(theta_t, inst: Instance, y, theta_true, x_pred=None, x_true=None):
    """
    Evaluates ℓ^pre, ℓ^sub, ℓ^est and ℓ^sim at θ_t for one step.

    Args:
        theta_t (ParameterPoint): The learner's current estimate.
        inst (Instance): The step.
        y (Observation or array_like): The revealed action.
        theta_true (ParameterPoint): The hidden parameter.
        x_pred (numpy.ndarray, optional): x(θ_t; u_t) when already solved.
        x_true (numpy.ndarray, optional): x(θ_true; u_t) when already solved.

    Returns:
        LossRecord: The losses, the subgradient and the comparator losses at θ_true.
    """
    y = _y(y)
    if x_pred is None:
        x_pred = solve_forward_checked(theta_t, inst).x
    if x_true is None:
        x_true = solve_forward_checked(theta_true, inst).x

    s_t = sim_subgradient(x_pred, y, inst.utility)
    truth = {
        LossKind.PRE: prediction_loss(theta_true, inst, y, x_true),
        LossKind.SUB: suboptimality_loss(theta_true, inst, y, x_true),
        LossKind.EST: estimate_loss(theta_true, inst, y, theta_true, x_true),
        LossKind.SIM: 0.0,
    }
    return LossRecord(
        t=inst.t,
        l_pre=prediction_loss(theta_t, inst, y, x_pred),
        l_sub=suboptimality_loss(theta_t, inst, y, x_pred),
        l_est=estimate_loss(theta_t, inst, y, theta_true, x_pred),
        l_sim=simple_loss(theta_t, s_t, theta_true),
        s_t=s_t,
        x_pred=np.asarray(x_pred, dtype=float),
        y=y,
        truth=truth,
    )
