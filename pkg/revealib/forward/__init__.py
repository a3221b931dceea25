from .solvers import (
    THETA_FLOOR,
    ForwardSolution,
    SolveStatus,
    kkt_residual,
    pick_with_tie_break,
    solve_binary_knapsack,
    solve_bilinear_knapsack,
    solve_ces_eq_knapsack,
    solve_cobb_douglas_knapsack,
    solve_custom_1d,
    solve_forward,
    solve_forward_checked,
    solve_quad_continuous,
)
from .brute_force import brute_force_forward
from .qp import QPResult, quad_kkt_residual, solve_nonneg_polytope_qp
