"""Closed-form radial energies and wavefunctions (Coulomb and oscillator)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .model import (
    ConvergenceError,
    Constants,
    GridFunction,
    RadialKind,
    RadialSpec,
    ValidationError,
    require_valid,
)
from .special import laguerre


@dataclass(frozen=True)
class RadialEnergyResult:
    epsilon: float
    tau: float = math.nan
    omega: float = math.nan
    k_scale: float = math.nan
    nr_effective: int = 0


def principal_number(spec: RadialSpec) -> float:
    """N = n_r + l + 1 of the Coulomb spectrum."""
    return spec.n_r + spec.l + 1.0


def oscillator_level(spec: RadialSpec) -> float:
    """2 n_r + l + 3/2, the oscillator level in units of omega."""
    return 2 * spec.n_r + spec.l + 1.5


def solve_oscillator_cubic(const: Constants, rhs: float) -> float:
    """Unique real root epsilon > Mc^2 of (eps - Mc^2)^2 (eps + Mc^2) = rhs."""
    mc2 = const.rest_energy
    if not rhs > 0:
        raise ValueError("cubic right-hand side must be positive")

    def cubic(eps):
        return (eps - mc2) ** 2 * (eps + mc2) - rhs

    lo, hi = mc2, mc2 + rhs ** (1.0 / 3.0) + 1.0
    if cubic(lo) >= 0 or cubic(hi) <= 0:
        raise ConvergenceError(f"cubic bracket [{lo}, {hi}] does not straddle a root")
    return bisect(cubic, lo, hi, xtol=1e-300, rtol=1e-14, maxiter=400)


def radial_energy(const: Constants, spec: RadialSpec) -> RadialEnergyResult:
    require_valid(const)
    require_valid(spec)
    mc2, c = const.rest_energy, const.c
    if spec.kind is RadialKind.COULOMB:
        n_prin = principal_number(spec)
        tau = spec.strength / (2.0 * c * n_prin)
        eps = mc2 * (1.0 - tau**2) / (1.0 + tau**2)
        e2 = const.eta(eps) * spec.strength
        return RadialEnergyResult(
            epsilon=eps, tau=tau, k_scale=e2 / (2.0 * n_prin), nr_effective=spec.n_r)
    level = oscillator_level(spec)
    eps = solve_oscillator_cubic(const, 8.0 * spec.strength * c**2 * level**2)
    omega = math.sqrt(8.0 * spec.strength * (eps + mc2)) / c
    return RadialEnergyResult(epsilon=eps, omega=omega, nr_effective=spec.n_r)


def radial_wavefunction(const: Constants, spec: RadialSpec, energy: RadialEnergyResult,
                        r_samples) -> GridFunction:
    """Non-normalized u(r); phi = u(r) Theta(theta) Phi(phi) / r."""
    require_valid(spec)
    r = np.asarray(r_samples, dtype=float)
    if np.any(r <= 0):
        raise ValidationError("radial samples must be positive", ["r > 0 required"])
    if spec.kind is RadialKind.COULOMB:
        x = 2.0 * energy.k_scale * r
        u = x ** (spec.l + 1) * np.exp(-0.5 * x) * laguerre(spec.n_r, 2 * spec.l + 1, x)
    else:
        x = 0.5 * energy.omega * r**2
        u = x ** (0.5 * (spec.l + 1)) * np.exp(-0.5 * x) * laguerre(spec.n_r, spec.l + 0.5, x)
    return GridFunction(r, u)


def radial_ode(const: Constants, spec: RadialSpec, energy: RadialEnergyResult):
    """Residual of u'' + [E - rho/r^2 - 2 eta V(r)] u for the given state."""
    eta = const.eta(energy.epsilon)
    e_nr = (energy.epsilon**2 - const.rest_energy**2) / const.c**2
    rho = spec.l * (spec.l + 1)
    if spec.kind is RadialKind.COULOMB:
        def coupling(r):
            return eta * spec.strength / r
    else:
        def coupling(r):
            return -2.0 * eta * spec.strength * r**2

    def residual(r, u, u2):
        return u2 + (e_nr - rho / r**2 + coupling(r)) * u

    return residual
