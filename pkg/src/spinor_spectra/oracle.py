"""Independent numerical checks: finite-difference eigenvalues and friends.

Nothing here touches the closed forms.  Eigenvalues of -u'' + V u come from a
3-point discretization turned into a symmetric tridiagonal matrix and located
by Sturm-sequence bisection.

Inverse-square endpoints (centrifugal, csc^2, sec^2 terms) are not truncated:
with Frobenius exponents (A, B) supplied, u = g v with g = (x-a)^A (b-x)^B and
the problem -(g^2 v')' + (V - g''/g) g^2 v = E g^2 v is discretized by cell-
centred finite volumes.  That selects the u ~ (x-a)^A solution exactly,
including the critical case A = 1/2 where plain truncation converges only
logarithmically.  A regular Dirichlet endpoint has exponent 1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numba
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import simpson
from scipy.optimize import brentq

from .angular import theta_domain
from .model import (
    AngularSpec,
    ConvergenceError,
    Constants,
    DomainError,
    Family,
    GridFunction,
    RadialKind,
    RadialSpec,
    radial_potential,
    ring_function,
)

log = logging.getLogger(__name__)

MIN_POINTS = 50
RADIAL_POINTS = 4000
ANGULAR_POINTS = 4000
RADIAL_DECAY_LENGTHS = 40.0
GAUSSIAN_EXPONENT = 50.0


@dataclass(frozen=True)
class Discretization:
    """Grid for -u'' + V u = E u on (a, b).

    ``exponents=None`` gives the plain Dirichlet problem on the truncated
    interval [a + offsets[0], b - offsets[1]] with ``n_points`` interior nodes.
    Otherwise ``n_points`` cells carry the weighted scheme described in the
    module docstring.
    """

    domain: tuple
    n_points: int = 4000
    offsets: tuple = (0.0, 0.0)
    exponents: tuple | None = None

    def __post_init__(self):
        if self.n_points < MIN_POINTS:
            raise ValueError(f"n_points must be >= {MIN_POINTS}")
        if not self.spacing > 0:
            raise ValueError("empty discretization interval")

    @property
    def interval(self):
        a, b = self.domain
        return a + self.offsets[0], b - self.offsets[1]

    @property
    def spacing(self) -> float:
        lo, hi = self.interval
        if self.exponents is None:
            return (hi - lo) / (self.n_points + 1)
        return (hi - lo) / self.n_points

    def refined(self, factor=2):
        return Discretization(self.domain, self.n_points * factor, self.offsets, self.exponents)


class RichardsonEstimate(NamedTuple):
    coarse: float
    fine: float
    extrapolated: float


def principal_exponent(coeff: float) -> float:
    """Larger root a of a(a-1) = coeff, the square-integrable branch for coeff >= -1/4."""
    disc = 0.25 + coeff
    if disc < 0:
        if disc > -1e-13:
            disc = 0.0
        else:
            raise DomainError(f"inverse-square coefficient {coeff} < -1/4: no bound states")
    return 0.5 + math.sqrt(disc)


def tridiagonal(potential: Callable, disc: Discretization):
    """Diagonal, off-diagonal and nodes of the symmetrized FD operator."""
    lo, hi = disc.interval
    n, h = disc.n_points, disc.spacing
    if disc.exponents is None:
        x = lo + h * np.arange(1, n + 1)
        v = np.asarray(potential(x))
        diag = 2.0 / h**2 + v
        off = np.full(n - 1, -1.0 / h**2)
    else:
        a, b = disc.domain
        ea, eb = disc.exponents
        x = lo + h * (np.arange(n) + 0.5)
        faces = lo + h * np.arange(n + 1)

        def log_g2(y):
            with np.errstate(divide="ignore"):
                return 2 * ea * np.log(y - a) + 2 * eb * np.log(b - y)

        lw, lp = log_g2(x), log_g2(faces)
        shift = lw.max()
        lw, lp = lw - shift, lp - shift
        lp[0] = lp[-1] = -np.inf  # no flux through either end
        t, u = x - a, b - x
        g2_over_g = ea * (ea - 1) / t**2 + eb * (eb - 1) / u**2 - 2 * ea * eb / (t * u)
        v = np.asarray(potential(x))
        diag = (np.exp(lp[:-1] - lw) + np.exp(lp[1:] - lw)) / h**2 + (v - g2_over_g)
        off = -np.exp(lp[1:-1] - 0.5 * (lw[:-1] + lw[1:])) / h**2
    if not np.all(np.isfinite(diag)):
        raise ValueError("potential is not finite on the grid")
    return diag, off, x


@numba.njit(cache=True)
def _count_below(d, e2, x, pivmin):
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, d.shape[0]):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect(d, e2, index, lo, hi, tol, pivmin):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _count_below(d, e2, mid, pivmin) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _pivmin(e2):
    return 1e-290 * max(1.0, float(e2.max()) if e2.size else 1.0)


def sturm_count(diag, off, x: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal (diag, off) below x."""
    diag = np.ascontiguousarray(diag, dtype=float)
    e2 = np.ascontiguousarray(np.asarray(off, dtype=float) ** 2)
    return int(_count_below(diag, e2, float(x), _pivmin(e2)))


def tridiagonal_eigenvalue(diag, off, index: int, tol: float = 1e-12) -> float:
    """index-th (0-based, ascending) eigenvalue by Sturm bisection."""
    diag = np.ascontiguousarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    if not 0 <= index < diag.size:
        raise IndexError("eigenvalue index out of range")
    radius = np.zeros_like(diag)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo, hi = float((diag - radius).min()), float((diag + radius).max())
    scale = max(abs(lo), abs(hi), 1.0)
    lo, hi = lo - 1e-12 * scale, hi + 1e-12 * scale
    e2 = np.ascontiguousarray(off**2)
    return float(_bisect(diag, e2, index, lo, hi, tol, _pivmin(e2)))


def _complex_eigenvalue(potential, disc, index):
    diag, off, _ = tridiagonal(potential, disc)
    if disc.n_points <= 1200:
        mat = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
        vals = np.linalg.eigvals(mat)
        return complex(vals[np.argsort(vals.real)][index])
    # locate on a coarse grid, then shift-invert on the requested one
    coarse = Discretization(disc.domain, 600, disc.offsets, disc.exponents)
    guess = _complex_eigenvalue(potential, coarse, index)
    mat = sp.diags([off, diag, off], [-1, 0, 1], format="csc")
    vals = spla.eigs(mat, k=1, sigma=guess, which="LM", return_eigenvectors=False)
    return complex(vals[0])


def fd_eigen(potential: Callable, disc: Discretization, index: int = 0):
    """index-th eigenvalue of -u'' + V u on the grid.

    Real potentials go through Sturm bisection.  A complex potential gives a
    complex-symmetric matrix; its eigenvalues are ordered by real part and the
    (complex) index-th one is returned.
    """
    diag, off, _ = tridiagonal(potential, disc)
    if np.iscomplexobj(diag):
        return _complex_eigenvalue(potential, disc, index)
    return tridiagonal_eigenvalue(diag, off, index)


def fd_eigen_richardson(potential: Callable, disc: Discretization, index: int = 0):
    """Eigenvalue on grids n and 2n plus the h^2 Richardson extrapolation."""
    coarse = fd_eigen(potential, disc, index)
    fine = fd_eigen(potential, disc.refined(2), index)
    return RichardsonEstimate(coarse, fine, (4 * fine - coarse) / 3)


# --- relativistic radial oracle -------------------------------------------

def _radial_eigen(const, kind, strength, l, n_r, eps, r_max, n_points, delta):
    eta = const.eta(eps)
    rho = l * (l + 1)
    vrad = radial_potential(RadialSpec(kind, strength))

    def potential(r):
        return rho / r**2 + 2 * eta * vrad(r)

    disc = Discretization((0.0, r_max), n_points, (delta, 0.0), (l + 1.0, 1.0))
    return fd_eigen_richardson(potential, disc, n_r).extrapolated


def _default_rmax(const, kind, strength, l, n_r, eps):
    eta = max(const.eta(eps), 1e-12)
    if kind is RadialKind.COULOMB:
        e_nr = (eps**2 - const.rest_energy**2) / const.c**2
        if e_nr < 0:
            kappa = math.sqrt(-e_nr)
        else:  # hydrogen-like scale for the starting grid
            kappa = eta * strength / (2 * (n_r + l + 1))
        return RADIAL_DECAY_LENGTHS / kappa
    omega = math.sqrt(8 * strength * eta)
    return math.sqrt(4 * GAUSSIAN_EXPONENT / omega)


def self_consistent_eig(const: Constants, kind: RadialKind, strength: float, l: float,
                        n_r: int, *, n_points: int = RADIAL_POINTS, r_max: float | None = None,
                        delta: float = 0.0, ftol: float = 1e-8) -> float:
    """epsilon with E_{n_r}(epsilon) = (epsilon^2 - M^2 c^4) / c^2.

    E_{n_r}(epsilon) is the FD eigenvalue of -u'' + [l(l+1)/r^2 + 2 eta V(r)] u.
    Without ``r_max`` the box is sized from a first solve and re-solved.
    """
    kind = RadialKind(kind)
    mc2, c2 = const.rest_energy, const.c**2

    def solve(rmax):
        def F(eps):
            return _radial_eigen(const, kind, strength, l, n_r, eps, rmax, n_points, delta) \
                - (eps**2 - mc2**2) / c2

        if kind is RadialKind.COULOMB:
            lo, hi = -mc2 * (1 - 1e-9), mc2 * (1 - 1e-12)
        else:
            lo, hi = mc2, mc2 + 1.0
        f_lo, f_hi = F(lo), F(hi)
        scan = [(lo, f_lo), (hi, f_hi)]
        if kind is RadialKind.OSCILLATOR:
            while f_hi > 0 and hi < 1e8 * (1 + mc2):
                hi = mc2 + 2 * (hi - mc2)
                f_hi = F(hi)
                scan.append((hi, f_hi))
        if not f_lo > 0 > f_hi:
            raise ConvergenceError("no sign change of the self-consistency function", scan)
        root = brentq(F, lo, hi, xtol=1e-14, rtol=1e-13, maxiter=200)
        if abs(F(root)) > ftol * max(1.0, mc2**2 / c2):
            raise ConvergenceError(f"residual at root too large: {F(root)!r}", scan)
        return root

    if r_max is not None:
        return solve(r_max)
    start = mc2 if kind is RadialKind.COULOMB else mc2 + 1.0
    rmax = _default_rmax(const, kind, strength, l, n_r, start)
    first = solve(rmax)
    rmax = max(rmax, _default_rmax(const, kind, strength, l, n_r, first))
    log.debug("self_consistent_eig: r_max = %g after first pass", rmax)
    return solve(rmax)


# --- angular oracle --------------------------------------------------------

def endpoint_coefficients(spec: AngularSpec, eta: float, beta=None):
    """Coefficients of the inverse-square terms of the reduced angular potential.

    Read off from (m^2 - 1/4) csc^2 + eta f(theta) at the two ends of the
    family's domain.
    """
    m2 = spec.m**2 - 0.25
    b = (spec.beta_value if beta is None else beta).real
    if spec.family is Family.F1:
        # csc^2 -> 1/t^2 at both poles; csc cot -> +1/t^2 at 0, -1/t^2 at pi
        base = m2 + eta * (spec.gamma + spec.alpha)
        return base + eta * b, base - eta * b
    if spec.family is Family.F2:
        return m2 + eta * (spec.gamma + spec.beta + spec.alpha), eta * spec.gamma
    base = m2 + eta * spec.alpha
    return base, base


def angular_eigen(spec: AngularSpec, eta: float, *, real_form: bool = False,
                  n_points: int = ANGULAR_POINTS) -> RichardsonEstimate:
    """FD estimate of the n_theta-th eigenvalue (= rho + 1/4) of the reduced angular problem.

    ``real_form`` replaces the imaginary f3 coefficient i*b by the real b.
    """
    beta = spec.beta if (real_form and spec.family is Family.F3) else None
    f = ring_function(spec, beta)
    m2 = spec.m**2 - 0.25

    def potential(th):
        return m2 / np.sin(th) ** 2 + eta * f(th)

    ca, cb = endpoint_coefficients(spec, eta, beta)
    disc = Discretization(theta_domain(spec.family), n_points,
                          exponents=(principal_exponent(ca), principal_exponent(cb)))
    return fd_eigen_richardson(potential, disc, spec.n_theta)


# --- generic checks --------------------------------------------------------

def ode_residual(solution: GridFunction, equation: Callable) -> float:
    """Max interior residual / max(1, max|solution|), 5-point second derivative."""
    x, y = solution.abscissae, solution.values
    if x.size < 7:
        raise ValueError("ode_residual needs at least 7 samples")
    steps = np.diff(x)
    h = steps.mean()
    if np.max(np.abs(steps - h)) > 1e-9 * h:
        raise ValueError("ode_residual needs uniform abscissae")
    d2 = (-y[4:] + 16 * y[3:-1] - 30 * y[2:-2] + 16 * y[1:-3] - y[:-4]) / (12 * h**2)
    inner = y[2:-2]
    res = np.asarray(equation(x[2:-2], inner, d2))
    return float(np.max(np.abs(res)) / max(1.0, float(np.max(np.abs(inner)))))


def quadrature(f: Callable, a: float, b: float, n: int = 1000) -> float:
    """Composite Simpson rule with n (even) panels."""
    if n < 2 or n % 2:
        raise ValueError("Simpson's rule needs an even n >= 2")
    x = np.linspace(a, b, n + 1)
    return float(simpson(np.asarray(f(x)), x=x))


def node_count(g: GridFunction) -> int:
    """Strict sign changes of Re g, ignoring samples below 1e-12 max|g|."""
    if len(g) < 3:
        raise ValueError("node_count needs at least 3 samples")
    v = g.values.real
    keep = np.abs(v) > 1e-12 * np.max(np.abs(g.values))
    signs = np.sign(v[keep])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))
