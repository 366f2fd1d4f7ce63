"""Verification suite: each check compares a closed form with an independent route.

Checks return a :class:`CheckResult`; tolerances are fixed here, ``tol`` only
overrides the energy-match tolerance of the oracle comparisons.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_genlaguerre

from . import oracle
from .angular import (
    angular_wavefunction,
    energy_upper_bound,
    forward_residuals,
    reduced_angular_ode,
    solve_angular_params,
    theta_domain,
)
from .assembler import solve_coupled
from .model import (
    AngularSolution,
    AngularSpec,
    Constants,
    Family,
    GridFunction,
    RadialKind,
    RadialSpec,
    ValidationError,
    validate,
)
from .radial import (
    oscillator_level,
    radial_energy,
    radial_ode,
    radial_wavefunction,
    solve_oscillator_cubic,
)
from .special import jacobi, jacobi_series, laguerre, laguerre_series

ENERGY_TOL = 1e-5
RESIDUAL_TOL = 1e-6
ROUND_TRIP_TOL = 1e-12
SERIES_TOL = 1e-10
ORTHO_TOL = 1e-6
RUNTIME_LIMIT = 60.0
# finer than 1e-3: the F3 factors blow up at the poles, which inflates stencil error
ANGULAR_STEP = 2.5e-4
SEED = 7

UNIT = Constants()


@dataclass
class CheckResult:
    key: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"[{status}] {self.key} {self.name}: {self.detail} ({self.seconds:.1f}s)"


# worked angular parameter sets: (spec, eta)
WORKED_ANGULAR = [
    (AngularSpec(Family.F1, alpha=0.5, beta=0.0, gamma=0.5, m=0, n_theta=0), 2.0),
    (AngularSpec(Family.F1, n_theta=0), 1.0),
    (AngularSpec(Family.F1, n_theta=1), 1.0),
    (AngularSpec(Family.F2, alpha=0.5, beta=-0.5, gamma=2.0, m=0, n_theta=0), 1.0),
    (AngularSpec(Family.F3, alpha=0.0625, beta=0.2, gamma=0.0, m=0, n_theta=0), 1.0),
]

# parameter sets used for the reference plots
PLOTTED_RADIAL = {
    "coulomb l=-0.5": RadialSpec.coulomb(1.0, 0, -0.5),
    "coulomb l=1": RadialSpec.coulomb(1.0, 0, 1.0),
    "oscillator l=0": RadialSpec.oscillator(1.0, 0, 0.0),
    "oscillator l=1": RadialSpec.oscillator(1.0, 0, 1.0),
}
PLOTTED_ANGULAR = {
    "f1 s=1 lambda=-0.5": (Family.F1, 1.0, -0.5),
    "f1 s=1.5 lambda=-1": (Family.F1, 1.5, -1.0),
    "f2 s=-0.2 lambda=0.6": (Family.F2, -0.2, 0.6),
    "f2 s=1 lambda=0.55": (Family.F2, 1.0, 0.55),
}
PLOTTED_F3 = {"f3 s=9.5 lambda=0.1i": (9.5, 0.1j), "f3 s=9.5 lambda=1i": (9.5, 1.0j)}


def coulomb_oracle_grid(tol=ENERGY_TOL):
    worst, rows = 0.0, []
    for v0l in (0.2, 1.0, 2.0):
        for l in (-0.5, 0.0, 1.0):
            for n_r in (0, 1, 2):
                closed = radial_energy(UNIT, RadialSpec.coulomb(v0l, n_r, l)).epsilon
                numeric = oracle.self_consistent_eig(UNIT, RadialKind.COULOMB, v0l, l, n_r)
                err = abs(closed - numeric)
                rows.append((v0l, l, n_r, closed, numeric))
                worst = max(worst, err)
    return worst <= tol * UNIT.rest_energy, f"max |closed - oracle| = {worst:.2e}", rows


def oscillator_oracle_grid(tol=ENERGY_TOL):
    worst_sq, worst_printed = 0.0, 0.0
    for k in (0.125, 1.0, 5.0):
        for l in (0.0, 1.0):
            for n_r in (0, 1):
                spec = RadialSpec.oscillator(k, n_r, l)
                numeric = oracle.self_consistent_eig(UNIT, RadialKind.OSCILLATOR, k, l, n_r)
                squared = radial_energy(UNIT, spec).epsilon
                level = oscillator_level(spec)
                printed = solve_oscillator_cubic(UNIT, 8 * k * UNIT.c**2 * level)
                worst_sq = max(worst_sq, abs(squared - numeric))
                worst_printed = max(worst_printed, abs(printed - numeric))
    ok = worst_sq <= tol * UNIT.rest_energy and worst_printed > 1e-2 * UNIT.rest_energy
    return ok, f"squared form max err {worst_sq:.2e}; printed form max err {worst_printed:.2e}"


def angular_oracle_sets(tol=ENERGY_TOL):
    worst, notes = 0.0, []
    for spec, eta in WORKED_ANGULAR:
        sol = solve_angular_params(UNIT, spec, eta)
        target = sol.rho + 0.25
        est = oracle.angular_eigen(spec, eta).extrapolated
        rel = abs(est - target) / abs(target)
        worst = max(worst, rel)
        label = f"{spec.family.value}/n={spec.n_theta}"
        if spec.family is Family.F3:
            lam_real = -eta * spec.beta / 2
            sn = sol.s - sol.n_theta
            real_target = eta * (spec.gamma - spec.alpha) + sn**2 - lam_real**2 / sn**2
            real_est = oracle.angular_eigen(spec, eta, real_form=True).extrapolated
            real_rel = abs(real_est - real_target) / abs(real_target)
            worst = max(worst, real_rel)
            notes.append(f"{label} complex {rel:.1e}, real-form {real_rel:.1e}")
        else:
            notes.append(f"{label} {rel:.1e}")
    return worst <= tol, f"max rel err {worst:.2e} [" + "; ".join(notes) + "]"


def _uniform(lo, hi, h=1e-3):
    n = int(round((hi - lo) / h))
    return np.linspace(lo, hi, n + 1)


def residual_cases():
    """(label, GridFunction, equation) for every closed form checked."""
    cases = []
    for l in (-0.5, 0.0, 1.0):
        for n_r in (0, 1, 2):
            spec = RadialSpec.coulomb(1.0, n_r, l)
            en = radial_energy(UNIT, spec)
            g = radial_wavefunction(UNIT, spec, en, _uniform(0.1, 30.0))
            cases.append((f"coulomb l={l} n_r={n_r}", g, radial_ode(UNIT, spec, en)))
    for l in (0.0, 1.0):
        for n_r in (0, 1, 2):
            spec = RadialSpec.oscillator(1.0, n_r, l)
            en = radial_energy(UNIT, spec)
            g = radial_wavefunction(UNIT, spec, en, _uniform(0.05, 6.0))
            cases.append((f"oscillator l={l} n_r={n_r}", g, radial_ode(UNIT, spec, en)))
    angular = []
    for n in (0, 1, 2):
        angular.append((AngularSpec(Family.F1, 0.3, 0.4, 0.2, 1, n), 1.7))
        angular.append((AngularSpec(Family.F1, 0.5, 0.0, 0.5, 0, n), 2.0))
        angular.append((AngularSpec(Family.F2, 0.5, -0.5, 2.0, 0, n), 1.0))
        angular.append((AngularSpec(Family.F2, 0.2, 0.3, 0.7, 1, n), 1.4))
    angular.append((AngularSpec(Family.F3, 0.0625, 0.2, 0.0, 0, 0), 1.0))
    angular.append((AngularSpec(Family.F3, 0.6, 0.2, 0.1, 0, 1), 1.0))
    for spec, eta in angular:
        sol = solve_angular_params(UNIT, spec, eta)
        lo, hi = theta_domain(spec.family)
        th = _uniform(lo + 0.05, hi - 0.05, ANGULAR_STEP)
        theta = angular_wavefunction(sol, spec, th)
        h = GridFunction(th, theta.values * np.sqrt(np.sin(th)))
        cases.append((f"{spec.family.value} m={spec.m} n={spec.n_theta}", h,
                      reduced_angular_ode(spec, sol)))
    return cases


def closed_form_residuals(tol=RESIDUAL_TOL):
    worst, where = 0.0, ""
    for label, g, eq in residual_cases():
        r = oracle.ode_residual(g, eq)
        if r > worst:
            worst, where = r, label
    return worst <= tol, f"max relative residual {worst:.2e} ({where})"


def node_cases():
    cases = []
    for l in (-0.5, 0.0, 1.0, 2.0):
        for n_r in (0, 1, 2):
            spec = RadialSpec.coulomb(1.0, n_r, l)
            en = radial_energy(UNIT, spec)
            r = np.linspace(1e-3, 60.0 / en.k_scale, 20000)
            cases.append((f"coulomb l={l}", n_r, radial_wavefunction(UNIT, spec, en, r)))
            spec = RadialSpec.oscillator(1.0, n_r, l)
            en = radial_energy(UNIT, spec)
            r = np.linspace(1e-3, math.sqrt(400 / en.omega), 20000)
            cases.append((f"oscillator l={l}", n_r, radial_wavefunction(UNIT, spec, en, r)))
    for n in (0, 1, 2):
        for m in (0, 1, 2):
            for spec, eta in ((AngularSpec(Family.F1, 0.3, 0.4, 0.2, m, n), 1.7),
                              (AngularSpec(Family.F1, 0.0, 0.0, 0.0, m, n), 1.0),
                              (AngularSpec(Family.F2, 0.5, -0.5, 2.0, m, n), 1.0)):
                sol = solve_angular_params(UNIT, spec, eta)
                lo, hi = theta_domain(spec.family)
                th = np.linspace(lo, hi, 20002)[1:-1]
                cases.append((f"{spec.family.value} m={m}", n,
                              angular_wavefunction(sol, spec, th)))
    return cases


def node_counts():
    bad = [f"{label} n={n} got {oracle.node_count(g)}"
           for label, n, g in node_cases() if oracle.node_count(g) != n]
    total = len(node_cases())
    return not bad, f"{total - len(bad)}/{total} node counts match" + (
        "; " + ", ".join(bad) if bad else "")


def free_reduction(tol=ROUND_TRIP_TOL):
    worst = 0.0
    for m in range(-3, 4):
        for n in range(4):
            for eta in (0.3, 1.0, 2.7):
                sol = solve_angular_params(UNIT, AngularSpec(Family.F1, m=m, n_theta=n), eta)
                big_l = n + abs(m)
                worst = max(worst, abs(sol.rho - big_l * (big_l + 1)))
    return worst <= tol, f"max |rho - L(L+1)| = {worst:.1e}"


def _random_admissible(family, rng):
    m = int(rng.integers(-2, 3))
    n = int(rng.integers(0, 4))
    eta = float(rng.uniform(0.2, 3.0))
    alpha = float(rng.uniform(-1.0, 1.0))
    if family is Family.F1:
        s = float(rng.uniform(0.5, 3.0))
        lam = float(rng.uniform(-(s + 0.25), s - 0.5))
        gamma = (lam**2 + s**2 - s - m * m + 0.25) / eta - alpha
        beta = -lam * (2 * s - 1) / eta
    elif family is Family.F2:
        s = float(rng.uniform(0.5, 3.0))
        lam = float(rng.uniform(0.55, 3.0))
        gamma = s * (s - 1) / eta
        beta = (lam * (lam - 1) - m * m + 0.25) / eta - gamma - alpha
    else:
        s = float(rng.uniform(n - 0.99, n - 0.51))
        alpha = (s * (s + 1) - m * m + 0.25) / eta
        sn = s - n
        beta = float(rng.uniform(-0.99, 0.99)) * 2 * abs(sn * (sn + 1)) / eta
        gamma = float(rng.uniform(-1.0, 1.0))
    return AngularSpec(family, alpha, beta, gamma, m, n), eta


def _admissible_draw(family, rng):
    # redraw until rho >= -1/4 holds as well
    while True:
        spec, eta = _random_admissible(family, rng)
        try:
            return spec, eta, solve_angular_params(UNIT, spec, eta)
        except ValidationError:
            continue


def parameter_round_trips(tol=ROUND_TRIP_TOL, count=100):
    rng = np.random.default_rng(SEED)
    worst, done = 0.0, {}
    for family in Family:
        for _ in range(count):
            spec, eta, sol = _admissible_draw(family, rng)
            scale = max(1.0, (abs(sol.s) + abs(sol.lam) + sol.n_theta) ** 2)
            res = max(abs(v) for v in forward_residuals(spec, sol).values()) / scale
            worst = max(worst, res)
        done[family.value] = count
    return worst <= tol, f"{sum(done.values())} solves, max scaled mismatch {worst:.1e}"


def _solution(family, s, lam, n=0):
    return AngularSolution(family, n, s, complex(lam), 0.0, 1.0)


def restriction_enforcement():
    problems = []
    expected = [
        (RadialSpec.coulomb(1.0, 0, -1.0), "l > -1 required"),
        (_solution(Family.F2, 1.0, 0.4), "F2: lambda > 1/2 required"),
        (_solution(Family.F3, 1.0, 0.1j, n=1), "F3: n_theta-1 < s < n_theta-1/2 required"),
        (_solution(Family.F3, 0.0, 0.1j, n=0), "F3: n_theta-1 < s < n_theta-1/2 required"),
    ]
    for obj, message in expected:
        if message not in validate(obj):
            problems.append(f"missing '{message}'")
    for label, spec in PLOTTED_RADIAL.items():
        if validate(spec):
            problems.append(f"{label} rejected: {validate(spec)}")
    for label, (fam, s, lam) in PLOTTED_ANGULAR.items():
        if validate(_solution(fam, s, lam)):
            problems.append(f"{label} rejected: {validate(_solution(fam, s, lam))}")
    # s = 9.5 lies on the open boundary of every F3 window, so no n_theta admits it
    for label, (s, lam) in PLOTTED_F3.items():
        admitted = [n for n in range(25) if not validate(_solution(Family.F3, s, lam, n))]
        if admitted:
            problems.append(f"{label} unexpectedly admitted for n_theta={admitted}")
    detail = "; ".join(problems) if problems else (
        f"named violations raised; {len(PLOTTED_RADIAL) + len(PLOTTED_ANGULAR)} plotted sets "
        f"accepted; both s = 9.5 f3 sets lie outside every n_theta window")
    return not problems, detail


def special_functions(tol=SERIES_TOL, ortho_tol=ORTHO_TOL):
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(0, 9))
        a, b = rng.uniform(-0.9, 5.0, size=2)
        x = rng.uniform(-1.0, 1.0, size=5)
        ref = jacobi_series(n, a, b, x)
        worst = max(worst, float(np.max(np.abs(jacobi(n, a, b, x) - ref)
                                        / np.maximum(1, np.abs(ref)))))
        p, q = rng.uniform(-0.9, 3.0), rng.uniform(-3.0, 3.0)
        z = 1j * rng.uniform(-5.0, 5.0, size=5)
        ref = jacobi_series(n, p + 1j * q, p - 1j * q, z)
        worst = max(worst, float(np.max(np.abs(jacobi(n, p + 1j * q, p - 1j * q, z) - ref)
                                        / np.maximum(1, np.abs(ref)))))
        x = rng.uniform(0.0, 20.0, size=5)
        ref = laguerre_series(n, a, x)
        # L(-x) sums the absolute series terms: the scale of its rounding error
        scale = np.maximum(1, np.abs(laguerre_series(n, a, -x)))
        worst = max(worst, float(np.max(np.abs(laguerre(n, a, x) - ref) / scale)))
    ortho = 0.0
    for alpha in (0.5, 2.5):
        nodes, weights = roots_genlaguerre(40, alpha)
        vals = [laguerre(k, alpha, nodes) for k in range(5)]
        gram = np.array([[np.sum(weights * vi * vj) for vj in vals] for vi in vals])
        diag = np.sqrt(np.outer(np.diag(gram), np.diag(gram)))
        off = np.abs(gram - np.diag(np.diag(gram))) / diag
        ortho = max(ortho, float(off.max()))
    ok = worst <= tol and ortho <= ortho_tol
    return ok, f"recurrence vs series {worst:.1e}; orthogonality off-diagonal {ortho:.1e}"


BOUND_CASES = [
    ("coulomb", 0.2, AngularSpec(Family.F1, alpha=0.01), 0),
    ("coulomb", 1.0, AngularSpec(Family.F1, alpha=0.3, beta=0.2, gamma=0.1, m=1, n_theta=1), 1),
    ("coulomb", 2.0, AngularSpec(Family.F1, alpha=0.1, beta=-0.1, gamma=0.0, m=2, n_theta=0), 2),
    ("coulomb", 1.0, AngularSpec(Family.F2, alpha=0.5, beta=0.1, gamma=0.3, m=1), 1),
    ("coulomb", 0.5, AngularSpec(Family.F2, alpha=0.2, beta=0.0, gamma=1.0, m=0, n_theta=1), 0),
    ("coulomb", 1.0, AngularSpec(Family.F3, alpha=0.05, beta=0.02), 0),
    ("oscillator", 0.125, AngularSpec(Family.F1, alpha=0.2, beta=0.1, gamma=0.1, m=1), 0),
    ("oscillator", 1.0, AngularSpec(Family.F1, alpha=0.2, beta=0.1, gamma=0.1, m=1,
                                    n_theta=1), 1),
    ("oscillator", 0.5, AngularSpec(Family.F2, alpha=0.3, beta=0.2, gamma=0.5, m=1), 0),
    ("oscillator", 0.125, AngularSpec(Family.F3, alpha=0.05, beta=0.02), 0),
]


def energy_bounds():
    bad = []
    for kind, strength, spec, n_r in BOUND_CASES:
        state = solve_coupled(UNIT, kind, strength, spec, n_r)
        problems = validate(state)
        bound = energy_upper_bound(spec, state.solution, UNIT)
        if problems or not state.converged or state.epsilon > bound:
            bad.append(f"{kind}/{spec.family.value}: {problems}")
    return not bad, (f"{len(BOUND_CASES)} converged states satisfy bounds"
                     if not bad else "; ".join(bad))


@dataclass(frozen=True)
class Criterion:
    key: str
    name: str
    suite: str
    run: Callable
    uses_tol: bool = False
    time_limit: float | None = None


CRITERIA = [
    Criterion("C1", "Coulomb closed form vs oracle", "radial",
              lambda tol: coulomb_oracle_grid(tol)[:2], True, RUNTIME_LIMIT),
    Criterion("C2", "oscillator cubic adjudication", "radial",
              oscillator_oracle_grid, True, RUNTIME_LIMIT),
    Criterion("C3", "angular eigenvalue match", "angular", angular_oracle_sets, True),
    Criterion("C4", "closed-form ODE residuals", "residual", closed_form_residuals),
    Criterion("C5", "node counts", "residual", node_counts),
    Criterion("C6", "free-angular reduction", "angular", free_reduction),
    Criterion("C7", "parameter-relation round trips", "angular", parameter_round_trips),
    Criterion("C8", "restriction enforcement", "model", restriction_enforcement),
    Criterion("C9", "special functions", "special", special_functions),
    Criterion("C10", "energy-bound consistency", "coupled", energy_bounds),
]

SUITES = ("all",) + tuple(sorted({c.suite for c in CRITERIA}))


def run_check(criterion: Criterion, tol: float = ENERGY_TOL) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = criterion.run(tol) if criterion.uses_tol else criterion.run()
    except Exception as exc:  # a crashing check is a failing check
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if criterion.time_limit is not None and elapsed > criterion.time_limit:
        passed = False
        detail += f"; exceeded {criterion.time_limit:.0f}s"
    return CheckResult(criterion.key, criterion.name, bool(passed), detail, elapsed)


def run_suite(suite: str = "all", tol: float = ENERGY_TOL) -> list[CheckResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    return [run_check(c, tol) for c in CRITERIA if suite in ("all", c.suite)]
