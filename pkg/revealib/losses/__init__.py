from .functions import (
    LOSS_KINDS,
    LossKind,
    LossRecord,
    estimate_loss,
    eval_losses,
    prediction_loss,
    simple_loss,
    sim_subgradient,
    suboptimality_loss,
)
from .regret import (
    Comparator,
    RegretTrace,
    build_regret_trace,
    check_perfect_information,
    check_suboptimal_feasible,
    offline_min,
    prefix_offline_minima,
)
