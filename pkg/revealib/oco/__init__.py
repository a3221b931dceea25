from .prox import INTERIOR_FLOOR, Geometry, ProxSetup, bregman, g_bound, project, project_simplex, prox_map
from .schedules import ScheduleKind, StepSchedule, step_value
from .learners import (
    Algorithm,
    ImplicitPreLearner,
    ImplicitSimLearner,
    MirrorDescentLearner,
    OnlineLearner,
    default_schedule_kind,
    implicit_sim_step,
    learner_for,
    md_step,
)
