"""Proximal setups on the simplex and the box, and the prox-mappings they induce."""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..domain import DomainKind, ParameterPoint, ParameterSpace, UtilityKind
from ..errors import ConfigurationError, NumericalGuardError
from ..forward import THETA_FLOOR

# entropy iterates are kept at least this far from the simplex boundary
INTERIOR_FLOOR = 1e-12


class Geometry(str, Enum):
    ENTROPY_SIMPLEX = "entropy-simplex"
    EUCLID_SIMPLEX = "euclid-simplex"
    EUCLID_BOX = "euclid-box"


@dataclass(frozen=True)
class ProxSetup:
    """
    A distance-generating function on Θ with its set widths.

    omega is max V(center, θ) over Θ and bounds the regret of mirror descent;
    omega_hat is max V(θ₁, θ₂) and bounds the implicit learners. The entropy
    geometry has no finite omega_hat.
    """

    geometry: Geometry
    space: ParameterSpace
    p: int
    omega: float
    omega_hat: float
    G: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "geometry", Geometry(self.geometry))
        if not (self.omega > 0 and self.omega_hat > 0 and self.G > 0):
            raise ConfigurationError(
                f"prox setup needs positive widths and G, got Ω={self.omega}, Ω̂={self.omega_hat}, G={self.G}"
            )

    @classmethod
    def create(cls, geometry, space: ParameterSpace, p, G=1.0):
        """
        Builds the setup for a geometry on Θ, computing Ω and Ω̂.

        Args:
            geometry (Geometry or str): The distance-generating function.
            space (ParameterSpace): Θ.
            p (int): Dimension of θ.
            G (float): Bound on the dual norm of the subgradients.

        Returns:
            ProxSetup: The setup.
        """
        geometry = Geometry(geometry)
        if geometry is Geometry.EUCLID_BOX:
            if space.is_simplex:
                raise ConfigurationError("euclid-box geometry needs a box parameter space")
            width = space.hi - space.lo
            return cls(geometry, space, p, 0.5 * p * (0.5 * width) ** 2, 0.5 * p * width ** 2, G)
        if not space.is_simplex:
            raise ConfigurationError(f"geometry '{geometry.value}' needs the simplex parameter space")
        if geometry is Geometry.ENTROPY_SIMPLEX:
            if p < 2:
                raise ConfigurationError("entropy geometry needs p ≥ 2")
            return cls(geometry, space, p, float(np.log(p)), np.inf, G)
        return cls(geometry, space, p, 0.5 * (1.0 - 1.0 / p), 1.0, G)

    @property
    def center(self):
        return self.space.center(self.p)


def project_simplex(v):
    """
    Euclidean projection onto the unit simplex by sorting.

    Args:
        v (array_like): The point to project.

    Returns:
        ParameterPoint: argmin ½‖θ − v‖² over the simplex.
    """
    v = np.asarray(v, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise NumericalGuardError("cannot project a non-finite vector")

    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.shape[0] + 1)
    rho = ind[u - css / ind > 0][-1]
    tau = css[rho - 1] / rho
    return ParameterPoint(np.maximum(v - tau, 0.0), ParameterSpace.simplex())


def project(v, space: ParameterSpace):
    """Euclidean projection onto Θ."""
    if space.is_simplex:
        return project_simplex(v)
    return ParameterPoint(np.clip(np.asarray(v, dtype=float), space.lo, space.hi), space)


def _entropy_step(theta, xi):
    logits = np.log(np.maximum(theta, INTERIOR_FLOOR)) - xi
    weights = np.exp(logits - logits.max())
    weights /= weights.sum()
    weights = np.maximum(weights, INTERIOR_FLOOR)
    return weights / weights.sum()


def prox_map(theta: ParameterPoint, xi, setup: ProxSetup):
    """
    Prox_θ(ξ) = argmin over θ' ∈ Θ of ⟨ξ, θ'⟩ + V_θ(θ').

    The entropy geometry gives the multiplicative update θ'_i ∝ θ_i·exp(−ξ_i);
    the Euclidean geometries give the projection of θ − ξ onto Θ.

    Args:
        theta (ParameterPoint): The current point.
        xi (array_like): The scaled subgradient.
        setup (ProxSetup): The proximal setup.

    Returns:
        ParameterPoint: The next point.
    """
    xi = np.asarray(xi, dtype=float).ravel()
    if not np.all(np.isfinite(xi)):
        raise NumericalGuardError("prox step received a non-finite direction")
    values = theta.values

    if setup.geometry is Geometry.ENTROPY_SIMPLEX:
        return ParameterPoint(_entropy_step(values, xi), setup.space)
    return project(values - xi, setup.space)


def bregman(theta_a, theta_b, geometry):
    """V_a(b) for the given geometry."""
    a = np.asarray(theta_a, dtype=float)
    b = np.asarray(theta_b, dtype=float)
    if Geometry(geometry) is Geometry.ENTROPY_SIMPLEX:
        a = np.maximum(a, INTERIOR_FLOOR)
        b_pos = np.maximum(b, INTERIOR_FLOOR)
        return float(np.sum(b * np.log(b_pos / a)))
    return 0.5 * float(np.dot(b - a, b - a))


def _c_abs_bound(inst):
    """Upper bound on ‖c(x)‖_∞ over the feasible set of one step."""
    dom, utility = inst.domain, inst.utility
    if utility.kind is UtilityKind.CUSTOM_1D:
        if utility.custom == "obscuring":
            return 1.0
        return max(abs(dom.lo), abs(dom.hi))

    upper = dom.coordinate_upper_bounds()
    if utility.kind in (UtilityKind.QUAD, UtilityKind.BILINEAR):
        return float(upper.max())
    if utility.kind is UtilityKind.CES:
        return float((upper ** 2).max())
    # Cobb-Douglas actions are x_i = θ'_i b/(p_i Σθ') with θ' floored and Σθ' ≤ 1 + n·floor
    if dom.kind is not DomainKind.CONT_KNAPSACK:
        raise ConfigurationError("Cobb-Douglas bounds need a continuous knapsack")
    lower = THETA_FLOOR * dom.budget / (dom.prices * (1.0 + dom.n * THETA_FLOOR))
    return float(max(np.abs(np.log(upper)).max(), np.abs(np.log(lower)).max()))


def g_bound(instances):
    """
    G = 2·max_t ‖c(x)‖_∞ bound over a stream's feasible sets.

    Args:
        instances (iterable[Instance]): The steps.

    Returns:
        float: A valid bound on ‖s_t‖_∞ for every step.
    """
    bound = max(_c_abs_bound(inst) for inst in instances)
    return 2.0 * bound
