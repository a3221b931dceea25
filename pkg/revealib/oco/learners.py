"""ℓ^sim mirror descent, the ℓ^sim and ℓ^pre implicit learners, and their play/update wrappers."""
from enum import Enum

import numpy as np

from ..bilevel import implicit_pre_step
from ..domain import Instance, ParameterPoint, ParameterSpace
from ..errors import ConfigurationError
from ..forward import solve_forward_checked
from ..losses import sim_subgradient
from .prox import Geometry, ProxSetup, project, prox_map
from .schedules import ScheduleKind, StepSchedule, step_value


class Algorithm(str, Enum):
    MD_ENTROPY = "md-entropy"
    MD_EUCLID = "md-euclid"
    IMPLICIT_SIM = "implicit-sim"
    IMPLICIT_PRE = "implicit-pre"


def md_step(theta_t: ParameterPoint, s_t, t, schedule: StepSchedule, setup: ProxSetup):
    """θ_{t+1} = Prox_{θ_t}(η_t s_t)."""
    return prox_map(theta_t, step_value(schedule, t) * np.asarray(s_t, dtype=float), setup)


def implicit_sim_step(theta_t: ParameterPoint, s_t, t, schedule: StepSchedule):
    """
    Exact minimizer of ½‖θ − θ_t‖² + η_t⟨θ, s_t⟩ over Θ.

    ℓ^sim is linear, so with the Euclidean distance the implicit update is the
    projection of θ_t − η_t s_t.
    """
    eta = step_value(schedule, t)
    return project(theta_t.values - eta * np.asarray(s_t, dtype=float), theta_t.space)


class OnlineLearner:
    """
    Holds θ_t across steps.

    play() returns the current estimate, predict() the learner's action
    x(θ_t; u_t), update() consumes the revealed action and moves to θ_{t+1}.
    """

    algorithm = None
    # whether x(θ_t; u_t) is part of the timed update
    times_prediction = True

    def __init__(self, theta0: ParameterPoint, schedule: StepSchedule):
        self.theta = theta0
        self.schedule = schedule
        self.t = 1

    def play(self):
        return self.theta

    def predict(self, inst: Instance):
        return solve_forward_checked(self.theta, inst)

    def update(self, inst: Instance, y, x_pred):
        self.theta = self._step(inst, np.asarray(y, dtype=float), np.asarray(x_pred, dtype=float))
        self.t += 1
        return self.theta

    def _step(self, inst, y, x_pred):
        raise NotImplementedError


class MirrorDescentLearner(OnlineLearner):
    def __init__(self, theta0, schedule, setup: ProxSetup):
        super().__init__(theta0, schedule)
        self.setup = setup
        self.algorithm = Algorithm.MD_ENTROPY if setup.geometry is Geometry.ENTROPY_SIMPLEX else Algorithm.MD_EUCLID

    def _step(self, inst, y, x_pred):
        s_t = sim_subgradient(x_pred, y, inst.utility)
        return md_step(self.theta, s_t, self.t, self.schedule, self.setup)


class ImplicitSimLearner(OnlineLearner):
    algorithm = Algorithm.IMPLICIT_SIM

    def _step(self, inst, y, x_pred):
        s_t = sim_subgradient(x_pred, y, inst.utility)
        return implicit_sim_step(self.theta, s_t, self.t, self.schedule)


class ImplicitPreLearner(OnlineLearner):
    algorithm = Algorithm.IMPLICIT_PRE
    times_prediction = False

    def _step(self, inst, y, x_pred):
        return implicit_pre_step(self.theta, step_value(self.schedule, self.t), inst, y)


def default_schedule_kind(algorithm):
    algorithm = Algorithm(algorithm)
    if algorithm in (Algorithm.MD_ENTROPY, Algorithm.MD_EUCLID):
        return ScheduleKind.OPTIMAL
    return ScheduleKind.SQRT


def learner_for(algorithm, space: ParameterSpace, p, T, G, schedule_kind=None, etas=(), theta0=None):
    """
    Builds a learner for one instance stream.

    Args:
        algorithm (Algorithm or str): md-entropy, md-euclid, implicit-sim or implicit-pre.
        space (ParameterSpace): Θ.
        p (int): Dimension of θ.
        T (int): Horizon, used by the constant schedules.
        G (float): Subgradient bound.
        schedule_kind (ScheduleKind or str, optional): Defaults to optimal for md, sqrt otherwise.
        etas (sequence[float]): Table for the custom schedule.
        theta0 (ParameterPoint, optional): θ_1; defaults to the center of Θ.

    Returns:
        OnlineLearner: The learner, positioned at θ_1.
    """
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.MD_ENTROPY:
        geometry = Geometry.ENTROPY_SIMPLEX
    elif space.is_simplex:
        geometry = Geometry.EUCLID_SIMPLEX
    else:
        geometry = Geometry.EUCLID_BOX
    if algorithm is Algorithm.MD_ENTROPY and not space.is_simplex:
        raise ConfigurationError("md-entropy needs the simplex parameter space")

    setup = ProxSetup.create(geometry, space, p, G)
    schedule = StepSchedule.for_setup(schedule_kind or default_schedule_kind(algorithm), setup, T, etas)
    theta0 = theta0 if theta0 is not None else setup.center

    if algorithm in (Algorithm.MD_ENTROPY, Algorithm.MD_EUCLID):
        return MirrorDescentLearner(theta0, schedule, setup)
    if algorithm is Algorithm.IMPLICIT_SIM:
        return ImplicitSimLearner(theta0, schedule)
    return ImplicitPreLearner(theta0, schedule)
