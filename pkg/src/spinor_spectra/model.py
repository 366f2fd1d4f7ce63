"""Shared domain types, unit conventions and restriction checks.

Units: hbar = 1 throughout; the rest mass ``M`` and light speed ``c`` stay
explicit.  The energy-dependent coupling that multiplies every potential term
after the S = V reduction is ``eta = (epsilon + M c^2) / c^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import singledispatch
from typing import TYPE_CHECKING, Callable

import numpy as np

if TYPE_CHECKING:
    from .radial import RadialEnergyResult

# absolute slack on closed-interval restrictions (values produced by root solves)
RESTRICTION_SLACK = 1e-12


class SpectraError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SpectraError, ValueError):
    """Raised when an input breaks a parameter restriction."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NoAdmissibleBranch(ValidationError):
    pass


class ConvergenceError(SpectraError):
    """A root search or self-consistent loop failed to settle."""

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan or []


class DomainError(SpectraError, ValueError):
    pass


class RadialKind(str, Enum):
    COULOMB = "coulomb"
    OSCILLATOR = "oscillator"


class Family(str, Enum):
    F1 = "f1"
    F2 = "f2"
    F3 = "f3"


def _coerce_enum(obj, name, enum):
    # accept plain strings; unknown values are left for validate to report
    try:
        object.__setattr__(obj, name, enum(getattr(obj, name)))
    except ValueError:
        pass


@dataclass(frozen=True)
class Constants:
    M: float = 1.0
    c: float = 1.0

    @property
    def rest_energy(self) -> float:
        return self.M * self.c**2

    def eta(self, epsilon: float) -> float:
        """Coupling (epsilon + M c^2) / c^2."""
        return (epsilon + self.rest_energy) / self.c**2


@dataclass(frozen=True)
class RadialSpec:
    """Radial potential plus quantum numbers.

    ``strength`` is V0*lambda for the Coulomb kind and K for the oscillator.
    ``l`` is real: the coupled problem fixes it from the separation constant.
    """

    kind: RadialKind
    strength: float
    n_r: int = 0
    l: float = 0.0

    def __post_init__(self):
        _coerce_enum(self, "kind", RadialKind)

    @classmethod
    def coulomb(cls, v0lambda, n_r=0, l=0.0):
        return cls(RadialKind.COULOMB, float(v0lambda), n_r, float(l))

    @classmethod
    def oscillator(cls, k, n_r=0, l=0.0):
        return cls(RadialKind.OSCILLATOR, float(k), n_r, float(l))


@dataclass(frozen=True)
class AngularSpec:
    """Angular family and its coefficients.

    For ``Family.F3`` the ``beta`` field holds the imaginary coefficient b,
    so the ring function uses beta = i*b.
    """

    family: Family
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    m: int = 0
    n_theta: int = 0

    def __post_init__(self):
        _coerce_enum(self, "family", Family)

    @property
    def beta_value(self) -> complex | float:
        if self.family is Family.F3:
            return 1j * self.beta
        return self.beta


@dataclass(frozen=True)
class AngularSolution:
    family: Family
    n_theta: int
    s: float
    lam: complex
    rho: float
    eta: float


@dataclass(frozen=True)
class GridFunction:
    abscissae: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.abscissae, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.ndim != 1 or x.shape != v.shape:
            raise ValueError("abscissae and values must be 1-D of equal length")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise ValueError("abscissae must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        object.__setattr__(self, "abscissae", x)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.abscissae.size


@dataclass(frozen=True)
class BoundState:
    epsilon: float
    rho: float
    l_effective: float
    radial: RadialSpec
    angular: AngularSpec
    solution: AngularSolution
    energy: "RadialEnergyResult"
    constants: Constants = field(default_factory=Constants)
    converged: bool = True
    iterations: int = 0


def rho_to_l(rho: float) -> float:
    """Root l >= -1/2 of l(l+1) = rho."""
    disc = 1.0 + 4.0 * rho
    if disc < 0.0:
        if disc > -1e-13:
            disc = 0.0
        else:
            raise DomainError(f"rho = {rho!r} < -1/4 has no real l")
    root = math.sqrt(disc)
    # 2 rho / (1 + root) avoids cancellation for small rho
    return 2.0 * rho / (1.0 + root)


def ring_function(spec: AngularSpec, beta=None) -> Callable:
    """The angular part f(theta) of the potential f(theta) / (2 r^2).

    ``beta`` overrides the (possibly imaginary) coefficient of the spec.
    """
    a, g = spec.alpha, spec.gamma
    b = spec.beta_value if beta is None else beta
    if spec.family is Family.F1:
        def f(th):
            c = np.cos(th)
            return (g + b * c + a * c**2) / np.sin(th) ** 2
    elif spec.family is Family.F2:
        def f(th):
            c2 = np.cos(th) ** 2
            return (g + b * c2 + a * c2**2) / (np.sin(th) ** 2 * c2)
    else:
        def f(th):
            ct = 1.0 / np.tan(th)
            return g + b * ct + a * ct**2
    return f


def radial_potential(spec: RadialSpec) -> Callable:
    """V(r): -V0*lambda / (2 r) or K r^2."""
    if spec.kind is RadialKind.COULOMB:
        return lambda r: -0.5 * spec.strength / r
    return lambda r: spec.strength * r**2


@singledispatch
def validate(obj) -> list[str]:
    """Return the list of violated restrictions; empty means valid."""
    raise TypeError(f"cannot validate {type(obj).__name__}")


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


@validate.register
def _(const: Constants) -> list[str]:
    out = []
    if not const.M >= 0:
        out.append("M >= 0 required")
    if not const.c > 0:
        out.append("c > 0 required")
    return out


@validate.register
def _(spec: RadialSpec) -> list[str]:
    out = []
    if not isinstance(spec.kind, RadialKind):
        out.append("unknown radial kind")
        return out
    if not _is_int(spec.n_r) or spec.n_r < 0:
        out.append("n_r >= 0 integer required")
    if not math.isfinite(spec.l):
        out.append("finite l required")
    if spec.kind is RadialKind.COULOMB:
        if not spec.strength > 0:
            out.append("v0lambda > 0 required")
        if not spec.l > -1.0:
            out.append("l > -1 required")
    else:
        if not spec.strength > 0:
            out.append("k > 0 required")
        if not spec.l > -1.5:
            out.append("l > -3/2 required")
    return out


@validate.register
def _(spec: AngularSpec) -> list[str]:
    out = []
    if not isinstance(spec.family, Family):
        out.append("family must be one of F1, F2, F3")
        return out
    if not _is_int(spec.m):
        out.append("integer m required")
    if not _is_int(spec.n_theta) or spec.n_theta < 0:
        out.append("n_theta >= 0 integer required")
    for name in ("alpha", "beta", "gamma"):
        if not math.isfinite(getattr(spec, name)):
            out.append(f"finite {name} required")
    return out


@validate.register
def _(sol: AngularSolution) -> list[str]:
    out = []
    s, lam, n = sol.s, complex(sol.lam), sol.n_theta
    eps = RESTRICTION_SLACK
    if sol.family is Family.F1:
        if abs(lam.imag) > eps:
            out.append("F1: real lambda required")
        if not s > 3.0 / 8.0:
            out.append("F1: s > 3/8 required")
        if not lam.real > -(s + 0.25):
            out.append("F1: lambda > -(s+1/4) required")
        # closed at the top: lambda = s - 1/2 keeps Theta finite (free m = 0 case)
        if not lam.real <= s - 0.5 + eps:
            out.append("F1: lambda <= s-1/2 required")
    elif sol.family is Family.F2:
        if abs(lam.imag) > eps:
            out.append("F2: real lambda required")
        if not s > -0.5:
            out.append("F2: s > -1/2 required")
        if not lam.real > 0.5:
            out.append("F2: lambda > 1/2 required")
    elif sol.family is Family.F3:
        if abs(lam.real) > eps:
            out.append("F3: Re lambda = 0 required")
        if not (n - 1 < s < n - 0.5):
            out.append("F3: n_theta-1 < s < n_theta-1/2 required")
        sn = s - n
        if not abs(lam.imag) < abs(sn * (sn + 1)):
            out.append("F3: |Im lambda| < |(s-n)(s-n+1)| required")
    else:
        out.append("family must be one of F1, F2, F3")
    if not sol.rho + 0.25 >= -eps:
        out.append("rho >= -1/4 required")
    return out


@validate.register
def _(state: BoundState) -> list[str]:
    from .angular import energy_upper_bound

    out = validate(state.solution)
    mc2 = state.constants.rest_energy
    if state.radial.kind is RadialKind.COULOMB:
        if not abs(state.epsilon) < mc2:
            out.append("Coulomb: |epsilon| < Mc^2 required")
    elif not state.epsilon > mc2:
        out.append("oscillator: epsilon > Mc^2 required")
    spec = state.angular
    if (spec.family is Family.F3 and spec.alpha > spec.gamma) or (
        spec.family is not Family.F3 and spec.alpha > 0
    ):
        bound = energy_upper_bound(spec, state.solution, state.constants)
        if not state.epsilon <= bound + RESTRICTION_SLACK * max(1.0, abs(bound)):
            out.append("epsilon <= family energy bound required")
    return out


def require_valid(obj) -> None:
    problems = validate(obj)
    if problems:
        raise ValidationError("; ".join(problems), problems)
