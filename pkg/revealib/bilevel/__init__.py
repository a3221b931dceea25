from .patterns import (
    ComplementarityPattern,
    KktPoint,
    PatternCandidate,
    PreProblem,
    enumerate_patterns,
    kkt_pattern_solve,
    solve_node,
)
from .branch_and_bound import (
    MAX_PRE_DIM,
    NODE_LIMIT,
    PreStepResult,
    branch_and_bound,
    implicit_pre_solve,
    implicit_pre_step,
    pre_problem,
)
