"""The decomposition f(x; θ, u) = f1(x; u) + ⟨θ, c(x)⟩ for every built-in utility form."""
import numpy as np

from ..errors import DomainError
from .types import Instance, ParameterPoint, UtilityForm, UtilityKind

# Cobb-Douglas logs are evaluated no closer to zero than this.
LOG_FLOOR = 1e-12


def _as_vector(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if not np.all(np.isfinite(x)):
        raise DomainError("c_map needs a finite x")
    return x


def _custom_c(x, name):
    if name == "obscuring":
        return np.where(x == 0.0, -1.0, 0.0)
    return x.copy()


def c_map(x, utility: UtilityForm, log_floor=LOG_FLOOR):
    """
    The vector c(x) paired with θ in the agent objective.

    Args:
        x (array_like): The action.
        utility (UtilityForm): The agent's utility form.
        log_floor (float): Cobb-Douglas coordinates below this are evaluated at the floor.

    Returns:
        numpy.ndarray: c(x), same length as θ.

    Raises:
        DomainError: x is not finite, or has a non-positive coordinate under Cobb-Douglas.
    """
    x = _as_vector(x)
    kind = utility.kind

    if kind in (UtilityKind.QUAD, UtilityKind.BILINEAR):
        return -x
    if kind is UtilityKind.CES:
        return x * x
    if kind is UtilityKind.COBB:
        if np.any(x <= 0):
            raise DomainError("Cobb-Douglas c(x) = -log x needs strictly positive x")
        return -np.log(np.maximum(x, log_floor))
    return _custom_c(x, utility.custom)


def f1(x, utility: UtilityForm):
    """The θ-free part of the objective."""
    x = _as_vector(x)
    if utility.kind is UtilityKind.QUAD:
        return 0.5 * float(np.dot(utility.P * x, x))
    if utility.kind is UtilityKind.CUSTOM_1D and utility.custom == "obscuring":
        return float(x[0])
    return 0.0


def eval_f(x, theta, inst: Instance):
    """
    Evaluates f(x; θ, u) = f1(x; u) + ⟨θ, c(x)⟩; the agent minimizes this.

    Args:
        x (array_like): The action.
        theta (ParameterPoint or array_like): The utility parameter.
        inst (Instance): The step whose utility form is used.

    Returns:
        float: The objective value.
    """
    theta = np.asarray(theta.values if isinstance(theta, ParameterPoint) else theta, dtype=float)
    if theta.ndim == 0:
        theta = theta[None]
    c = c_map(x, inst.utility)
    if theta.shape != c.shape:
        raise DomainError(f"theta has length {theta.shape[0]} but c(x) has length {c.shape[0]}")
    return f1(x, inst.utility) + float(np.dot(theta, c))
