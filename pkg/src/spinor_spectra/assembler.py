"""Self-consistent coupling of the angular and radial problems, spinor assembly."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .angular import angular_wavefunction, azimuthal, solve_angular_params
from .model import (
    AngularSpec,
    BoundState,
    ConvergenceError,
    Constants,
    GridFunction,
    RadialKind,
    RadialSpec,
    ValidationError,
    require_valid,
    rho_to_l,
)
from .radial import radial_energy, radial_wavefunction

log = logging.getLogger(__name__)

__all__ = ["GridFunction", "SpinorSample", "solve_coupled", "assemble_spinor",
           "lower_spinor", "normalize"]

MIN_MESH = 5


@dataclass(frozen=True)
class SpinorSample:
    """Upper factors (u, Theta, Phi) and the lower spinor on an (r, theta) mesh.

    The upper spinor is phi = u Theta Phi / r times the spin-up basis vector;
    ``lower`` has shape (2, n_r, n_theta), one plane per spinor component.
    """

    radial: GridFunction
    angular: GridFunction
    azimuthal: GridFunction
    lower: np.ndarray
    epsilon: float


class _Coupling:
    """epsilon -> radial energy at the rho fixed by the angular solve at eta(epsilon)."""

    def __init__(self, const, kind, strength, angular, n_r):
        self.const, self.kind, self.strength = const, RadialKind(kind), strength
        self.angular, self.n_r = angular, n_r

    def __call__(self, eps):
        sol = solve_angular_params(self.const, self.angular, self.const.eta(eps))
        l = rho_to_l(sol.rho)
        spec = RadialSpec(self.kind, self.strength, self.n_r, l)
        return radial_energy(self.const, spec), sol, spec


def _build_state(const, coupling, eps, iterations, converged=True):
    energy, sol, spec = coupling(eps)
    return BoundState(
        epsilon=energy.epsilon, rho=sol.rho, l_effective=spec.l, radial=spec,
        angular=coupling.angular, solution=sol, energy=energy, constants=const,
        converged=converged, iterations=iterations)


def _scan_window(const, kind):
    mc2 = const.rest_energy
    if kind is RadialKind.COULOMB:
        return -mc2 * (1 - 1e-9), mc2
    return mc2 * (1 + 1e-12) + 1e-12, mc2 + 1.0


def _bisection_solve(const, coupling, n_scan=200):
    lo, hi = _scan_window(const, coupling.kind)
    table = []

    def g(eps):
        return coupling(eps)[0].epsilon - eps

    def sample(grid):
        for eps in grid:
            try:
                table.append((float(eps), g(eps)))
            except ValidationError as exc:
                table.append((float(eps), str(exc)))

    sample(np.linspace(lo, hi, n_scan))
    if coupling.kind is RadialKind.OSCILLATOR:
        width = hi - lo
        while width < 1e6:
            last = [v for _, v in table if isinstance(v, float)]
            if last and last[-1] < 0:
                break
            width *= 4
            sample(np.linspace(table[-1][0], lo + width, n_scan // 4)[1:])
    numeric = [(e, v) for e, v in table if isinstance(v, float)]
    for (e0, v0), (e1, v1) in zip(numeric, numeric[1:]):
        if v0 == 0:
            return e0
        if v0 * v1 < 0:
            return brentq(g, e0, e1, xtol=1e-14, rtol=1e-14)
    raise ConvergenceError("no sign change of the coupling residual g(epsilon)", table)


def solve_coupled(const: Constants, kind, strength: float, angular: AngularSpec,
                  n_r: int = 0, *, method: str = "auto", damping: float = 0.5,
                  tol: float = 1e-10, max_iter: int = 200) -> BoundState:
    """Bound state with epsilon = radial_energy(n_r, l(rho(epsilon))).

    ``method`` is "fixed_point", "bisection" or "auto" (fixed point, then the
    scanned bisection if that fails).  The first fixed-point step is taken
    undamped; later ones use ``damping``.
    """
    require_valid(const)
    require_valid(angular)
    kind = RadialKind(kind)
    require_valid(RadialSpec(kind, strength, n_r, 0.0))
    coupling = _Coupling(const, kind, strength, angular, n_r)
    if method not in ("auto", "fixed_point", "bisection"):
        raise ValueError(f"unknown method {method!r}")

    if method in ("auto", "fixed_point"):
        mc2 = const.rest_energy
        eps = mc2 if kind is RadialKind.COULOMB else mc2 + 1.0
        try:
            for it in range(max_iter):
                step = coupling(eps)[0].epsilon - eps
                if abs(step) <= tol:
                    return _build_state(const, coupling, eps, it)
                eps += step if it == 0 else damping * step
            failure = f"fixed point did not settle in {max_iter} iterations"
        except ValidationError as exc:
            if method == "fixed_point":
                raise
            failure = f"fixed point left the admissible region: {exc}"
        if method == "fixed_point":
            raise ConvergenceError(failure)
        log.info("%s; falling back to bisection", failure)

    eps = _bisection_solve(const, coupling)
    return _build_state(const, coupling, eps, 0)


def lower_spinor(const: Constants, epsilon: float, upper, r_mesh, theta_mesh,
                 phi: float, m: int) -> np.ndarray:
    """chi = c sigma.P phi / (epsilon + M c^2) for phi = F(r, theta) e^{i m phi} (1, 0)^T.

    ``upper`` holds the sampled F(r, theta) e^{i m phi} on the mesh; derivatives
    are second-order finite differences.
    """
    r = np.asarray(r_mesh, dtype=float)
    th = np.asarray(theta_mesh, dtype=float)
    if r.size < MIN_MESH or th.size < MIN_MESH:
        raise ValueError(f"mesh too coarse: need >= {MIN_MESH} points per dimension")
    F = np.asarray(upper, dtype=complex)
    d_r = np.gradient(F, r, axis=0, edge_order=2)
    d_th = np.gradient(F, th, axis=1, edge_order=2)
    R, T = np.meshgrid(r, th, indexing="ij")
    sin, cos = np.sin(T), np.cos(T)
    dz = cos * d_r - sin * d_th / R
    dplus = np.exp(1j * phi) * (sin * d_r + cos * d_th / R - m * F / (R * sin))
    scale = -1j * const.c / (epsilon + const.rest_energy)
    return scale * np.stack([dz, dplus])


_WEIGHTS = {"dr": lambda x: np.ones_like(x), "sin": np.sin, "dphi": lambda x: np.ones_like(x)}


def normalize(g: GridFunction, weight: str = "dr") -> GridFunction:
    """Scale g so the trapezoid integral of |g|^2 * weight is 1.

    ``weight`` is "dr", "sin" (sin(theta) d theta) or "dphi".
    """
    if weight not in _WEIGHTS:
        raise ValueError(f"weight must be one of {sorted(_WEIGHTS)}")
    if np.any(np.isnan(g.values)):
        raise ValueError("cannot normalize NaN values")
    norm2 = np.trapezoid(np.abs(g.values) ** 2 * _WEIGHTS[weight](g.abscissae), g.abscissae)
    if not norm2 > 0:
        raise ValueError("cannot normalize a zero-norm function")
    return GridFunction(g.abscissae, g.values / math.sqrt(norm2))


def assemble_spinor(const: Constants, bound: BoundState, r_mesh, theta_mesh,
                    phi: float) -> SpinorSample:
    """Normalized upper factors and the lower spinor on the (r, theta) mesh at fixed phi."""
    if not bound.converged:
        raise ConvergenceError("cannot assemble an unconverged bound state")
    u = normalize(radial_wavefunction(const, bound.radial, bound.energy, r_mesh), "dr")
    theta = normalize(angular_wavefunction(bound.solution, bound.angular, theta_mesh), "sin")
    az = azimuthal(bound.angular.m, [phi])
    upper = np.outer(u.values / u.abscissae, theta.values) * az.values[0]
    chi = lower_spinor(const, bound.epsilon, upper, u.abscissae, theta.abscissae, phi,
                       bound.angular.m)
    return SpinorSample(u, theta, az, chi, bound.epsilon)
