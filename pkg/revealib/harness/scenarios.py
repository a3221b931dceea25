"""Scripted streams that replace random generation."""
from ..instances import GenConfig, obscuring_stream
from ..losses import Comparator
from ..oco import Algorithm
from .config import ExperimentConfig

OBSCURING_THETA0 = 3.0


def scenario_stream(cfg: ExperimentConfig, instance_index=0):
    """The scripted stream named by cfg.scenario."""
    if cfg.scenario == "obscuring":
        return obscuring_stream(cfg.gen.T)
    raise ValueError(f"unknown scenario '{cfg.scenario}'")


def scenario_defaults(cfg: ExperimentConfig, explicit=()):
    """
    Fills in what a scripted scenario implies unless the caller set it.

    The obscuring agent starts the learner at θ_1 = 3 with η_t = 1/t, runs a
    single stream, and compares against θ_true.

    Args:
        cfg (ExperimentConfig): The config with a scenario.
        explicit (iterable[str]): Field names the caller set on purpose.

    Returns:
        ExperimentConfig: The completed config.
    """
    if cfg.scenario != "obscuring":
        return cfg
    explicit = set(explicit)
    update = {}
    if "theta0" not in explicit and cfg.theta0 is None:
        update["theta0"] = (OBSCURING_THETA0,)
    if "schedule" not in explicit and cfg.schedule is None and not cfg.etas:
        update["etas"] = tuple(1.0 / t for t in range(1, cfg.gen.T + 1))
    if "comparator" not in explicit:
        update["comparator"] = Comparator.TRUTH
    if cfg.gen.instance_count != 1 and "instances" not in explicit:
        update["gen"] = cfg.gen.model_copy(update={"instance_count": 1, "n": 1})
    return cfg.model_copy(update=update)


def obscuring_config(T=10, algorithm=Algorithm.MD_EUCLID, **fields):
    """An ExperimentConfig running one learner against the obscuring agent for T steps."""
    cfg = ExperimentConfig(
        gen=GenConfig(n=1, m=1, T=T, instance_count=1),
        algorithm=algorithm,
        scenario="obscuring",
        **fields,
    )
    return scenario_defaults(cfg, explicit=fields)
