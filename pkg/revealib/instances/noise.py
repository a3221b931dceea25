"""Observation models: exact actions, additive uniform noise, and feasible but suboptimal agents."""
import numpy as np

from ..domain import NoiseMode, Observation
from ..errors import ConfigurationError
from .generator import stream_rng

SUBOPTIMAL_BETA_MAX = 0.2
NOISE_STREAM = 1


def noise_delta(true_actions):
    """δ = (1/T) Σ_t ‖x(θ_true; u_t)‖₂."""
    if not len(true_actions):
        return 0.0
    return float(np.mean([np.linalg.norm(x) for x in true_actions]))


def apply_noise(true_actions, mode, seed, instance=0, domains=None):
    """
    Turns the agent's optimal actions into observations.

    uniform-small adds per-coordinate noise uniform on [−δ/n, δ/n], uniform-large
    on [−δ, δ]. suboptimal-feasible reports (1 − β)x_t + βz_t with β uniform
    on [0, 0.2] and z_t a random feasible point of the step's domain.

    Args:
        true_actions (list[numpy.ndarray]): x(θ_true; u_t) for t = 1..T.
        mode (NoiseMode or str): The observation model.
        seed (int): Batch seed.
        instance (int): Instance index, for the per-step generator keys.
        domains (list[Domain], optional): Step domains; required for suboptimal-feasible.

    Returns:
        list[Observation]: One observation per step.
    """
    mode = NoiseMode(mode)
    if mode.is_perfect:
        return [Observation(np.array(x, dtype=float), mode) for x in true_actions]
    if mode is NoiseMode.SUBOPTIMAL and (domains is None or len(domains) != len(true_actions)):
        raise ConfigurationError("suboptimal-feasible noise needs the domain of every step")

    delta = noise_delta(true_actions)
    observations = []
    for t, x in enumerate(true_actions, start=1):
        x = np.asarray(x, dtype=float)
        rng = stream_rng(seed, instance, t, NOISE_STREAM)
        if mode is NoiseMode.SUBOPTIMAL:
            beta = rng.uniform(0.0, SUBOPTIMAL_BETA_MAX)
            y = (1.0 - beta) * x + beta * domains[t - 1].sample_feasible(rng)
        else:
            radius = delta / x.shape[0] if mode is NoiseMode.SMALL else delta
            y = x + rng.uniform(-radius, radius, size=x.shape[0])
        observations.append(Observation(y, mode))
    return observations
