"""
Random instance streams.

Every draw comes from a Philox generator keyed by (seed, instance, t), so a
stream does not depend on how many other instances were generated before it
or on which worker generated it. t = 0 holds the instance-level draws (θ_true
and P); the noise model uses the key (seed, instance, t, 1).
"""
import numpy as np

from ..domain import (
    Domain,
    DomainKind,
    Instance,
    InstanceStream,
    ParameterPoint,
    ParameterSpace,
    UtilityForm,
    UtilityKind,
)
from .config import GenConfig

PRICE_OFFSET = 100.0
PRICE_JITTER = 10
THETA_RANGE = (1.0, 1000.0)
P_RANGE = (1.0, 21.0)
INTERIOR_SLACK = (1.1, 2.0)


def stream_rng(seed, instance, t, *extra):
    """The generator for one (instance, step) cell."""
    sequence = np.random.SeedSequence(seed, spawn_key=(instance, t) + tuple(extra))
    return np.random.Generator(np.random.Philox(sequence))


def _prices(rng, theta_true):
    jitter = rng.integers(-PRICE_JITTER, PRICE_JITTER + 1, size=theta_true.shape[0])
    return theta_true + PRICE_OFFSET + jitter


def _utility(cfg: GenConfig, rng):
    if cfg.utility is UtilityKind.QUAD:
        P = rng.uniform(*P_RANGE, size=cfg.n)
        return UtilityForm.quad_diag(P / P.sum())
    return UtilityForm(cfg.utility)


def _domain(cfg: GenConfig, rng, theta_true, utility):
    if cfg.domain is DomainKind.POLYTOPE:
        A = np.vstack([_prices(rng, theta_true) for _ in range(cfg.m)])
        c = np.array([rng.uniform(1.0, row.sum()) for row in A])
        return Domain.polytope(A, c)

    prices = _prices(rng, theta_true)
    if cfg.domain is DomainKind.BIN_KNAPSACK:
        prices = np.round(prices)
    if cfg.interior:
        interior_spend = float(np.dot(prices, theta_true / utility.P))
        budget = interior_spend * rng.uniform(*INTERIOR_SLACK)
    else:
        budget = rng.uniform(1.0, prices.sum())
    return Domain(cfg.domain, prices=prices, budget=budget)


def gen_instance_stream(cfg: GenConfig, instance_index=0):
    """
    Generates one random instance stream.

    θ_true is uniform on [1, 1000]^n scaled to unit ℓ1 norm; P (quadratic
    utility) has diagonal entries uniform on [1, 21] scaled the same way. At
    every step p_t = θ_true + 100 + r_t with r_t uniform on the integers
    [−10, 10], rounded for binary knapsacks, and b_t is uniform on [1, Σp_t].
    Polytope rows are drawn like p_t and c_j is uniform on [1, Σ_i A_ji].

    Args:
        cfg (GenConfig): Generation parameters.
        instance_index (int): Which stream of the batch.

    Returns:
        InstanceStream: θ_true and the T steps.
    """
    rng = stream_rng(cfg.seed, instance_index, 0)
    theta = rng.uniform(*THETA_RANGE, size=cfg.n)
    theta_true = ParameterPoint(theta / theta.sum(), ParameterSpace.simplex())
    utility = _utility(cfg, rng)

    instances = []
    for t in range(1, cfg.T + 1):
        step_rng = stream_rng(cfg.seed, instance_index, t)
        instances.append(Instance(t, utility, _domain(cfg, step_rng, theta_true.values, utility)))
    return InstanceStream(theta_true, instances)


def interior_stream(cfg: GenConfig, instance_index=0):
    """
    A quadratic continuous-knapsack stream where P⁻¹θ_true is strictly feasible at every step.

    Budgets are drawn from ⟨p_t, P⁻¹θ_true⟩ times a factor uniform on [1.1, 2].
    """
    return gen_instance_stream(cfg.model_copy(update={"interior": True}), instance_index)


def obscuring_stream(T, theta_true=0.0, space=ParameterSpace.box(-3.0, 3.0), interval=(-1.0, 1.0)):
    """
    The scripted 1-D stream of an agent that hides its parameter.

    The agent minimizes x + θc(x) over the interval with c(0) = −1 and c(x) = 0
    elsewhere, so any θ ≥ 1 explains the action x = 0 and any θ < 1 the action −1.

    Args:
        T (int): Number of steps.
        theta_true (float): The hidden parameter.
        space (ParameterSpace): Θ, a box.
        interval (tuple): The action interval.

    Returns:
        InstanceStream: The stream.
    """
    utility = UtilityForm.custom_1d("obscuring")
    domain = Domain.interval(*interval)
    instances = [Instance(t, utility, domain) for t in range(1, T + 1)]
    return InstanceStream(ParameterPoint(np.array([theta_true]), space), instances)
