"""Immutable domain types shared by every subpackage."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import DomainError

SIMPLEX_TOL = 1e-9
FEASIBILITY_TOL = 1e-8
CUSTOM_1D_FORMS = ("obscuring", "linear")


def _frozen_array(values, name, ndim=1):
    arr = np.array(values, dtype=float, ndmin=ndim)
    if arr.ndim != ndim:
        raise DomainError(f"'{name}' must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"'{name}' contains non-finite entries")
    arr.setflags(write=False)
    return arr


class SpaceKind(str, Enum):
    SIMPLEX = "simplex"
    BOX = "box"


@dataclass(frozen=True)
class ParameterSpace:
    """The learner's parameter domain Θ: the unit simplex or a box [lo, hi]^p."""

    kind: SpaceKind
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if self.kind is SpaceKind.BOX and not self.lo < self.hi:
            raise DomainError(f"box parameter space needs lo < hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def simplex(cls):
        return cls(SpaceKind.SIMPLEX)

    @classmethod
    def box(cls, lo, hi):
        return cls(SpaceKind.BOX, float(lo), float(hi))

    @property
    def is_simplex(self):
        return self.kind is SpaceKind.SIMPLEX

    def contains(self, values, tol=SIMPLEX_TOL):
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            return False
        if self.is_simplex:
            return bool(np.all(values >= -tol) and abs(values.sum() - 1.0) <= tol)
        return bool(np.all(values >= self.lo - tol) and np.all(values <= self.hi + tol))

    def center(self, p):
        """The ω-center: the uniform point of the simplex or the midpoint of the box."""
        if self.is_simplex:
            return ParameterPoint(np.full(p, 1.0 / p), self)
        return ParameterPoint(np.full(p, 0.5 * (self.lo + self.hi)), self)

    def vertices_min(self, direction):
        """min over Θ of ⟨θ, direction⟩ (a linear program with a closed form on both spaces)."""
        direction = np.asarray(direction, dtype=float)
        if direction.size == 0:
            return 0.0
        if self.is_simplex:
            return float(direction.min())
        return float(np.minimum(self.lo * direction, self.hi * direction).sum())


@dataclass(frozen=True)
class ParameterPoint:
    """A candidate θ in Θ. Constructing one validates the space invariants."""

    values: np.ndarray
    space: ParameterSpace = field(default_factory=ParameterSpace.simplex)

    def __post_init__(self):
        values = _frozen_array(self.values, "theta")
        if not self.space.contains(values):
            if self.space.is_simplex:
                raise DomainError(
                    f"theta is not on the unit simplex (min={values.min():.3e}, sum={values.sum():.12f})"
                )
            raise DomainError(f"theta leaves the box [{self.space.lo}, {self.space.hi}]")
        object.__setattr__(self, "values", values)

    @classmethod
    def on_simplex(cls, values, renormalize=True):
        """Builds a simplex point, clipping round-off negatives and renormalizing when asked."""
        values = np.asarray(values, dtype=float)
        if renormalize:
            values = np.clip(values, 0.0, None)
            values = values / values.sum()
        return cls(values, ParameterSpace.simplex())

    @property
    def p(self):
        return self.values.shape[0]

    def __len__(self):
        return self.p

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


class UtilityKind(str, Enum):
    QUAD = "quad"
    CES = "ces"
    BILINEAR = "bilinear"
    COBB = "cobb"
    CUSTOM_1D = "custom-1d"


@dataclass(frozen=True)
class UtilityForm:
    """
    Agent objective f(x; θ, u) = f1(x; u) + ⟨θ, c(x)⟩ (f2 ≡ 0 for every built-in form).

    quad      f = ½xᵀPx − ⟨θ, x⟩, P diagonal and positive
    ces       f = Σ θ_i x_i²   (ρ = 2 CES utility, as a minimization)
    bilinear  f = −⟨θ, x⟩
    cobb      f = −Σ θ_i log x_i
    custom-1d one of the enumerated 1-D forms in CUSTOM_1D_FORMS
    """

    kind: UtilityKind
    P: Optional[np.ndarray] = None
    custom: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", UtilityKind(self.kind))
        if self.kind is UtilityKind.QUAD:
            if self.P is None:
                raise DomainError("quadratic utility needs a diagonal P")
            P = _frozen_array(self.P, "P")
            if np.any(P <= 0):
                raise DomainError("quadratic utility needs P_ii > 0 for all i")
            object.__setattr__(self, "P", P)
        elif self.P is not None:
            raise DomainError(f"utility '{self.kind.value}' does not take a P matrix")
        if self.kind is UtilityKind.CUSTOM_1D and self.custom not in CUSTOM_1D_FORMS:
            raise DomainError(f"custom-1d form must be one of {CUSTOM_1D_FORMS}, got {self.custom!r}")

    @classmethod
    def quad_diag(cls, P):
        return cls(UtilityKind.QUAD, P=P)

    @classmethod
    def ces(cls):
        return cls(UtilityKind.CES)

    @classmethod
    def bilinear(cls):
        return cls(UtilityKind.BILINEAR)

    @classmethod
    def cobb_douglas(cls):
        return cls(UtilityKind.COBB)

    @classmethod
    def custom_1d(cls, name):
        return cls(UtilityKind.CUSTOM_1D, custom=name)

    @property
    def gamma(self):
        """Strong convexity modulus of f in x (quadratic form only)."""
        if self.kind is not UtilityKind.QUAD:
            raise DomainError(f"utility '{self.kind.value}' has no strong convexity modulus")
        return float(self.P.min())

    @property
    def tag(self):
        if self.kind is UtilityKind.CUSTOM_1D:
            return f"custom-1d:{self.custom}"
        return self.kind.value


class DomainKind(str, Enum):
    CONT_KNAPSACK = "ck"
    POLYTOPE = "cp"
    BIN_KNAPSACK = "bk"
    EQ_KNAPSACK = "eck"
    INTERVAL = "interval"


KNAPSACK_KINDS = (DomainKind.CONT_KNAPSACK, DomainKind.BIN_KNAPSACK, DomainKind.EQ_KNAPSACK)


@dataclass(frozen=True)
class Domain:
    """Agent feasible region X(u_t); its data is the signal u_t of one step."""

    kind: DomainKind
    prices: Optional[np.ndarray] = None
    budget: Optional[float] = None
    A: Optional[np.ndarray] = None
    c: Optional[np.ndarray] = None
    lo: Optional[float] = None
    hi: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", DomainKind(self.kind))
        if self.kind in KNAPSACK_KINDS:
            prices = _frozen_array(self.prices, "prices")
            if np.any(prices <= 0):
                raise DomainError("knapsack prices must be positive")
            budget = float(self.budget)
            if not budget > 0:
                raise DomainError("knapsack budget must be positive")
            if self.kind is DomainKind.BIN_KNAPSACK and not np.all(prices == np.round(prices)):
                raise DomainError("binary knapsack prices must be integers")
            object.__setattr__(self, "prices", prices)
            object.__setattr__(self, "budget", budget)
        elif self.kind is DomainKind.POLYTOPE:
            A = _frozen_array(self.A, "A", ndim=2)
            c = _frozen_array(self.c, "c")
            if A.shape[0] != c.shape[0]:
                raise DomainError(f"polytope has {A.shape[0]} rows but {c.shape[0]} right-hand sides")
            if np.any(A < 0) or np.any(c <= 0):
                raise DomainError("polytope data must be nonnegative with positive right-hand side")
            object.__setattr__(self, "A", A)
            object.__setattr__(self, "c", c)
        else:
            if self.lo is None or self.hi is None or not float(self.lo) < float(self.hi):
                raise DomainError("interval domain needs lo < hi")
            object.__setattr__(self, "lo", float(self.lo))
            object.__setattr__(self, "hi", float(self.hi))

    @classmethod
    def cont_knapsack(cls, prices, budget):
        return cls(DomainKind.CONT_KNAPSACK, prices=prices, budget=budget)

    @classmethod
    def polytope(cls, A, c):
        return cls(DomainKind.POLYTOPE, A=A, c=c)

    @classmethod
    def bin_knapsack(cls, prices, budget):
        return cls(DomainKind.BIN_KNAPSACK, prices=prices, budget=budget)

    @classmethod
    def eq_knapsack(cls, prices, budget):
        return cls(DomainKind.EQ_KNAPSACK, prices=prices, budget=budget)

    @classmethod
    def interval(cls, lo, hi):
        return cls(DomainKind.INTERVAL, lo=lo, hi=hi)

    @property
    def n(self):
        if self.kind is DomainKind.POLYTOPE:
            return self.A.shape[1]
        if self.kind is DomainKind.INTERVAL:
            return 1
        return self.prices.shape[0]

    @property
    def m(self):
        """Number of linear inequality rows (besides x ≥ 0)."""
        if self.kind is DomainKind.POLYTOPE:
            return self.A.shape[0]
        if self.kind in (DomainKind.CONT_KNAPSACK, DomainKind.BIN_KNAPSACK):
            return 1
        return 0

    @property
    def is_continuous(self):
        return self.kind is not DomainKind.BIN_KNAPSACK

    def constraint_matrix(self):
        """(A, c) of the inequality rows A x ≤ c; a knapsack is a single row."""
        if self.kind is DomainKind.POLYTOPE:
            return self.A, self.c
        if self.kind in (DomainKind.CONT_KNAPSACK, DomainKind.BIN_KNAPSACK):
            return self.prices[None, :], np.array([self.budget])
        raise DomainError(f"domain '{self.kind.value}' has no inequality rows")

    def coordinate_upper_bounds(self):
        """Per-coordinate upper bound on |x_i| over the domain."""
        if self.kind is DomainKind.INTERVAL:
            return np.array([max(abs(self.lo), abs(self.hi))])
        if self.kind is DomainKind.POLYTOPE:
            with np.errstate(divide="ignore"):
                ratios = np.where(self.A > 0, self.c[:, None] / self.A, np.inf)
            return ratios.min(axis=0)
        if self.kind is DomainKind.BIN_KNAPSACK:
            return np.ones(self.n)
        return self.budget / self.prices

    def feasibility_residual(self, x):
        """Largest constraint violation of x (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        if self.kind is DomainKind.INTERVAL:
            return float(max(self.lo - x[0], x[0] - self.hi, 0.0))
        residual = float(max(-x.min(), 0.0))
        if self.kind is DomainKind.POLYTOPE:
            residual = max(residual, float(np.max(self.A @ x - self.c, initial=0.0)))
        elif self.kind is DomainKind.EQ_KNAPSACK:
            residual = max(residual, abs(float(self.prices @ x) - self.budget))
        else:
            residual = max(residual, float(self.prices @ x) - self.budget)
        if self.kind is DomainKind.BIN_KNAPSACK:
            residual = max(residual, float(np.abs(x - np.round(x)).max(initial=0.0)))
        return residual

    def is_feasible(self, x, tol=FEASIBILITY_TOL):
        return self.feasibility_residual(x) <= tol

    def sample_feasible(self, rng):
        """
        Draws a random feasible point of a convex domain.

        Args:
            rng (numpy.random.Generator): Source of randomness.

        Returns:
            numpy.ndarray: A point of the domain.
        """
        if self.kind is DomainKind.INTERVAL:
            return np.array([rng.uniform(self.lo, self.hi)])
        if self.kind is DomainKind.BIN_KNAPSACK:
            raise DomainError("binary knapsack is not convex; no feasible mixing point")
        direction = rng.dirichlet(np.ones(self.n))
        if self.kind is DomainKind.EQ_KNAPSACK:
            return self.budget * direction / self.prices
        scale = rng.uniform(0.0, 1.0)
        if self.kind is DomainKind.CONT_KNAPSACK:
            return scale * self.budget * direction / self.prices
        step = float(np.min(self.c / (self.A @ direction)))
        return scale * step * direction


@dataclass(frozen=True)
class Instance:
    """One step of the stream: the forward problem at signal u_t."""

    t: int
    utility: UtilityForm
    domain: Domain

    def __post_init__(self):
        if self.utility.kind is UtilityKind.QUAD and self.utility.P.shape[0] != self.domain.n:
            raise DomainError(f"P has size {self.utility.P.shape[0]} but the domain has n={self.domain.n}")
        is_1d = self.utility.kind is UtilityKind.CUSTOM_1D
        if is_1d != (self.domain.kind is DomainKind.INTERVAL):
            raise DomainError("custom-1d utilities pair with interval domains and only with them")

    @property
    def n(self):
        return self.domain.n

    @property
    def p(self):
        return self.n


class NoiseMode(str, Enum):
    PERFECT = "perfect"
    SMALL = "uniform-small"
    LARGE = "uniform-large"
    SUBOPTIMAL = "suboptimal-feasible"

    @property
    def is_perfect(self):
        return self is NoiseMode.PERFECT


@dataclass(frozen=True)
class Observation:
    """The learner's view y_t of the agent's action."""

    y: np.ndarray
    noise_mode: NoiseMode = NoiseMode.PERFECT

    def __post_init__(self):
        object.__setattr__(self, "y", _frozen_array(self.y, "y"))
        object.__setattr__(self, "noise_mode", NoiseMode(self.noise_mode))
