import os
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..domain import DomainKind, UtilityKind
from ..instances import GenConfig
from ..losses import Comparator
from ..oco import Algorithm, ScheduleKind, default_schedule_kind
from ..utils.config_utils import read_config, read_step_sizes

OUT_DIR_ENV = "REVEALIB_OUT_DIR"
SCENARIOS = ("obscuring",)
PRE_MAX_N = 15


def default_out_dir():
    return os.environ.get(OUT_DIR_ENV, "runs")


class ExperimentConfig(BaseModel):
    """
    One experiment: a batch of streams, the learner run on each, and where results go.

    schedule is one of paper, optimal, sqrt or file:<path>; None picks the
    learner's default. scenario replaces the random streams by a scripted one;
    stream replays saved streams instead, from one file for every instance or
    from a directory written with save_streams.
    """

    model_config = ConfigDict(frozen=True)

    gen: GenConfig = Field(default_factory=GenConfig)
    algorithm: Algorithm = Algorithm.MD_ENTROPY
    schedule: Optional[str] = None
    etas: Tuple[float, ...] = ()
    theta0: Optional[Tuple[float, ...]] = None
    comparator: Comparator = Comparator.HINDSIGHT
    scenario: Optional[str] = None
    stream: Optional[str] = None
    save_streams: bool = False
    out_dir: str = Field(default_factory=default_out_dir)
    plots: bool = False
    log_scale: bool = False
    jobs: int = Field(1, ge=1)
    timing: bool = True
    check_invariants: bool = True
    quiet: bool = False

    @field_validator("schedule")
    @classmethod
    def check_schedule(cls, value):
        if value is None or value.startswith("file:"):
            return value
        kinds = [kind.value for kind in ScheduleKind if kind is not ScheduleKind.CUSTOM]
        if value not in kinds:
            raise ValueError(f"schedule must be one of {', '.join(kinds)} or file:<path>, got '{value}'")
        return value

    @field_validator("scenario")
    @classmethod
    def check_scenario(cls, value):
        if value is not None and value not in SCENARIOS:
            raise ValueError(f"unknown scenario '{value}'; available: {', '.join(SCENARIOS)}")
        return value

    @model_validator(mode="after")
    def check_algorithm(self):
        if self.stream is not None and self.scenario is not None:
            raise ValueError("stream replay and a scripted scenario cannot be combined")
        if self.scenario is not None:
            if self.algorithm is Algorithm.MD_ENTROPY:
                raise ValueError("md-entropy needs the simplex; the scripted scenarios use a box parameter space")
            return self
        if self.stream is not None:
            return self
        if self.algorithm is Algorithm.IMPLICIT_PRE:
            gen = self.gen
            if gen.utility is not UtilityKind.QUAD or gen.domain not in (DomainKind.CONT_KNAPSACK, DomainKind.POLYTOPE):
                raise ValueError("implicit-pre needs the quad utility on a ck or cp domain")
            if gen.n > PRE_MAX_N:
                raise ValueError(f"implicit-pre is capped at n={PRE_MAX_N}, got n={gen.n}")
        if self.algorithm is Algorithm.MD_ENTROPY and self.gen.n < 2:
            raise ValueError("md-entropy needs n ≥ 2")
        return self

    def resolved_schedule(self):
        """(ScheduleKind, step table) with file schedules loaded."""
        if self.etas:
            return ScheduleKind.CUSTOM, tuple(self.etas)
        if self.schedule is None:
            return default_schedule_kind(self.algorithm), ()
        if self.schedule.startswith("file:"):
            return ScheduleKind.CUSTOM, tuple(read_step_sizes(self.schedule[len("file:"):]))
        return ScheduleKind(self.schedule), ()


def load_experiment_config(filename, **overrides):
    """
    Reads an ExperimentConfig from json, yaml or toml, applying overrides on top.

    Args:
        filename (str): The config file.
        **overrides: Top-level fields to replace; a ``gen`` dict is merged key by key.

    Returns:
        ExperimentConfig: The validated config.
    """
    data = read_config(filename) or {}
    if not isinstance(data, dict):
        raise ValueError(f"'{filename}' does not hold a config mapping")
    return build_config(data, **overrides)


def build_config(data=None, **overrides):
    data = dict(data or {})
    gen = dict(data.pop("gen", {}) or {})
    gen.update(overrides.pop("gen", {}) or {})
    data.update(overrides)
    data["gen"] = gen
    return ExperimentConfig.model_validate(data)
