"""Angular families f1/f2/f3: parameter solves, Theta(theta), Phi(phi), bounds.

Each family maps the reduced angular equation

    H'' + [-(m^2 - 1/4) csc^2 - eta f(theta) + rho + 1/4] H = 0,
    Theta = H / sqrt(sin theta),

onto an exactly solvable trigonometric model with parameters (s, lambda).
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .model import (
    RESTRICTION_SLACK,
    AngularSolution,
    AngularSpec,
    Constants,
    Family,
    GridFunction,
    NoAdmissibleBranch,
    ValidationError,
    require_valid,
    ring_function,
    validate,
)
from .special import jacobi

THETA_DOMAINS = {
    Family.F1: (0.0, math.pi),
    Family.F2: (0.0, 0.5 * math.pi),
    Family.F3: (0.0, math.pi),
}


def theta_domain(family: Family) -> tuple[float, float]:
    return THETA_DOMAINS[family]


def _quadratic_roots(a, b, c):
    """Real roots of a x^2 + b x + c, cancellation-free; None if complex."""
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if q == 0.0:
        return (0.0, 0.0)
    return (q / a, c / q)


def _solve_f1(spec, eta):
    a_rel = eta * (spec.gamma + spec.alpha) + spec.m**2 - 0.25
    b_rel = -eta * spec.beta
    # t = (2s - 1)^2 solves t^2 - (4A + 1) t + 4 B^2 = 0
    roots = _quadratic_roots(1.0, -(4 * a_rel + 1), 4 * b_rel**2)
    if roots is None:
        raise NoAdmissibleBranch(
            "F1: negative discriminant in the (s, lambda) quadratic",
            ["F1: negative discriminant"])
    candidates = []
    for t in sorted(set(roots)):
        if t < 0:
            continue
        for sign in (1.0, -1.0):
            s = 0.5 * (1.0 + sign * math.sqrt(t))
            u = 2 * s - 1
            if u != 0.0:
                lams = [b_rel / u]
            elif b_rel == 0.0 and a_rel + 0.25 >= 0:
                root = math.sqrt(a_rel + 0.25)
                lams = [root, -root]
            else:
                lams = []
            for lam in lams:
                candidates.append((s, lam))
    return candidates


def _f1_pick(spec, eta, candidates):
    admissible = []
    for s, lam in candidates:
        rho = (s + spec.n_theta) ** 2 - eta * spec.alpha - 0.25
        sol = AngularSolution(Family.F1, spec.n_theta, s, complex(lam), rho, eta)
        if not validate(sol):
            admissible.append(sol)
    if not admissible:
        raise NoAdmissibleBranch(
            "F1: no (s, lambda) branch satisfies s > 3/8, -(s+1/4) < lambda <= s-1/2",
            ["F1: no admissible (s, lambda) branch"])

    # prefer the branch regular at both poles (s + lambda >= 1/2), then smallest s
    def key(sol):
        regular = sol.s + sol.lam.real >= 0.5 - RESTRICTION_SLACK
        return (not regular, sol.s, abs(sol.lam))

    return min(admissible, key=key)


def solve_angular_params(const: Constants, spec: AngularSpec, eta: float) -> AngularSolution:
    """Solve the family's parameter relations for (s, lambda) and rho at coupling eta."""
    require_valid(spec)
    if not eta > 0:
        raise ValidationError(f"eta = {eta!r} must be positive", ["eta > 0 required"])
    n, m2 = spec.n_theta, spec.m**2
    if spec.family is Family.F1:
        sol = _f1_pick(spec, eta, _solve_f1(spec, eta))
    elif spec.family is Family.F2:
        disc_s = 1 + 4 * eta * spec.gamma
        disc_l = 1 + 4 * (eta * (spec.gamma + spec.beta + spec.alpha) + m2 - 0.25)
        if disc_s < 0 or disc_l < 0:
            raise NoAdmissibleBranch("F2: complex s or lambda", ["F2: no real (s, lambda)"])
        s = 0.5 * (1 + math.sqrt(disc_s))
        lam = 0.5 * (1 + math.sqrt(disc_l))
        rho = (lam + s + 2 * n) ** 2 - eta * spec.alpha - 0.25
        sol = AngularSolution(Family.F2, n, s, complex(lam), rho, eta)
    else:
        c_s = eta * spec.alpha + m2 - 0.25
        disc = 1 + 4 * c_s
        lam = complex(0.0, -0.5 * eta * spec.beta)
        sol = None
        if disc >= 0:
            for s in (0.5 * (-1 - math.sqrt(disc)), 0.5 * (-1 + math.sqrt(disc))):
                if n - 1 < s < n - 0.5:
                    sn = s - n
                    rho = (eta * (spec.gamma - spec.alpha) + sn**2
                           - (lam**2).real / sn**2 - 0.25)
                    sol = AngularSolution(Family.F3, n, s, lam, rho, eta)
                    break
        if sol is None:
            raise NoAdmissibleBranch(
                f"F3: no root of s(s+1) = {c_s:.6g} in ({n - 1}, {n - 0.5})",
                ["F3: n_theta-1 < s < n_theta-1/2 required"])
    if sol.rho < -0.25 - RESTRICTION_SLACK:
        raise ValidationError(f"rho = {sol.rho!r} below -1/4", ["rho >= -1/4 required"])
    problems = validate(sol)
    if problems:
        raise NoAdmissibleBranch("; ".join(problems), problems)
    return sol


def _interior_theta(family, theta):
    th = np.asarray(theta, dtype=float)
    lo, hi = theta_domain(family)
    if np.any(th <= lo) or np.any(th >= hi):
        raise ValidationError(
            f"theta samples must lie strictly inside ({lo}, {hi})", ["theta out of domain"])
    return th


def angular_wavefunction(sol: AngularSolution, spec: AngularSpec, theta_samples) -> GridFunction:
    """Theta(theta) for the solved family (complex values; real for F1/F2)."""
    th = _interior_theta(sol.family, theta_samples)
    s, lam, n = sol.s, complex(sol.lam), sol.n_theta
    if sol.family is Family.F1:
        lr = lam.real
        one_minus = 2 * np.sin(0.5 * th) ** 2
        one_plus = 2 * np.cos(0.5 * th) ** 2
        poly = jacobi(n, s - lr - 0.5, s + lr - 0.5, np.cos(th))
        vals = (one_minus ** (0.5 * (s - lr)) * one_plus ** (0.5 * (s + lr)) * poly
                / np.sqrt(np.sin(th)))
    elif sol.family is Family.F2:
        lr = lam.real
        poly = jacobi(n, lr - 0.5, s - 0.5, np.cos(2 * th))
        vals = 2 ** (0.5 * (lr + s)) * np.sin(th) ** (lr - 0.5) * np.cos(th) ** s * poly
    else:
        sn = s - n
        shift = 1j * lam / sn
        phase = cmath.exp(1j * math.pi * sn / 2)  # (-1)^((s-n)/2), principal branch
        poly = jacobi(n, sn + shift, sn - shift, -1j / np.tan(th))
        vals = (phase * (1.0 / np.sin(th)) ** (sn + 0.5) * np.exp(lam * th / sn) * poly)
    return GridFunction(th, vals)


def reduced_angular_ode(spec: AngularSpec, sol: AngularSolution):
    """Residual of H'' + [-(m^2-1/4) csc^2 - eta f + rho + 1/4] H, H = Theta sqrt(sin)."""
    f = ring_function(spec)
    m2 = spec.m**2

    def residual(th, h, h2):
        return h2 + (-(m2 - 0.25) / np.sin(th) ** 2 - sol.eta * f(th) + sol.rho + 0.25) * h

    return residual


def azimuthal(m: int, phi_samples) -> GridFunction:
    """Phi(phi) = exp(i m phi) / sqrt(2 pi)."""
    phi = np.asarray(phi_samples, dtype=float)
    return GridFunction(phi, np.exp(1j * m * phi) / math.sqrt(2 * math.pi))


def energy_upper_bound(spec: AngularSpec, sol: AngularSolution, const: Constants) -> float:
    """Largest epsilon compatible with rho + 1/4 >= 0 at the solved (s, lambda)."""
    s, lam, n = sol.s, complex(sol.lam), sol.n_theta
    c2, mc2 = const.c**2, const.rest_energy
    if spec.family is Family.F1:
        if spec.alpha == 0:
            raise ZeroDivisionError("F1 bound needs alpha != 0")
        return c2 * (s + n) ** 2 / spec.alpha - mc2
    if spec.family is Family.F2:
        if spec.alpha == 0:
            raise ZeroDivisionError("F2 bound needs alpha != 0")
        return c2 * (lam.real + s + 2 * n) ** 2 / spec.alpha - mc2
    if spec.alpha == spec.gamma:
        raise ZeroDivisionError("F3 bound needs alpha != gamma")
    sn = s - n
    return c2 * (sn**2 - (lam**2).real / sn**2) / (spec.alpha - spec.gamma) - mc2


def forward_residuals(spec: AngularSpec, sol: AngularSolution) -> dict[str, float]:
    """Mismatch of each parameter relation when (s, lambda) are substituted back."""
    eta, s, lam, n, m2 = sol.eta, sol.s, complex(sol.lam), sol.n_theta, spec.m**2
    if spec.family is Family.F1:
        lr = lam.real
        return {
            "casimir": eta * (spec.gamma + spec.alpha) + m2 - 0.25 - (lr**2 + s**2 - s),
            "coupling": -eta * spec.beta - lr * (2 * s - 1),
            "energy": eta * spec.alpha + sol.rho + 0.25 - (s + n) ** 2,
        }
    if spec.family is Family.F2:
        lr = lam.real
        return {
            "casimir": eta * (spec.gamma + spec.beta + spec.alpha) + m2 - 0.25 - lr * (lr - 1),
            "coupling": eta * spec.gamma - s * (s - 1),
            "energy": eta * spec.alpha + sol.rho + 0.25 - (lr + s + 2 * n) ** 2,
        }
    sn = s - n
    return {
        "casimir": eta * spec.alpha + m2 - 0.25 - s * (s + 1),
        "coupling": abs(eta * spec.beta_value + 2 * lam),
        "energy": (eta * (spec.gamma - spec.alpha) - (sol.rho + 0.25)
                   - ((lam**2).real / sn**2 - sn**2)),
    }
