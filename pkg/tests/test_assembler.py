import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spinor_spectra.assembler import (
    assemble_spinor,
    lower_spinor,
    normalize,
    solve_coupled,
)
from spinor_spectra.model import (
    AngularSpec,
    Constants,
    ConvergenceError,
    Family,
    GridFunction,
    NoAdmissibleBranch,
    RadialSpec,
    validate,
)
from spinor_spectra.radial import radial_energy
from spinor_spectra.angular import energy_upper_bound

UNIT = Constants()


def coulomb_eps(v0l, n_prin, c=1.0, mc2=1.0):
    tau = v0l / (2 * c * n_prin)
    return mc2 * (1 - tau**2) / (1 + tau**2)


def test_free_ground_state():
    state = solve_coupled(UNIT, "coulomb", 0.2, AngularSpec(Family.F1))
    assert state.rho == 0 and state.l_effective == 0
    assert state.epsilon == pytest.approx(0.98019802, abs=1e-8)
    assert state.iterations == 1
    assert state.converged


def test_free_p_state():
    state = solve_coupled(UNIT, "coulomb", 0.2, AngularSpec(Family.F1, m=1))
    assert state.rho == pytest.approx(2.0)
    assert state.l_effective == pytest.approx(1.0)
    assert state.epsilon == pytest.approx(coulomb_eps(0.2, 2), rel=1e-12)


def test_small_alpha_shifts_energy():
    free = solve_coupled(UNIT, "coulomb", 0.2, AngularSpec(Family.F1))
    spec = AngularSpec(Family.F1, alpha=0.01)
    state = solve_coupled(UNIT, "coulomb", 0.2, spec)
    assert abs(state.epsilon - free.epsilon) > 1e-4
    sol = state.solution
    assert state.epsilon <= (sol.s + sol.n_theta) ** 2 / 0.01 - 1.0
    assert validate(state) == []


STATES = [
    ("coulomb", 0.2, AngularSpec(Family.F1, alpha=0.01), 0),
    ("coulomb", 1.0, AngularSpec(Family.F1, 0.3, 0.2, 0.1, 1, 1), 1),
    ("coulomb", 1.0, AngularSpec(Family.F2, 0.5, 0.1, 0.3, 1), 1),
    ("coulomb", 1.0, AngularSpec(Family.F3, alpha=0.05, beta=0.02), 0),
    ("oscillator", 0.125, AngularSpec(Family.F1, 0.2, 0.1, 0.1, 1), 0),
    ("oscillator", 0.5, AngularSpec(Family.F2, 0.3, 0.2, 0.5, 1), 0),
    ("oscillator", 0.125, AngularSpec(Family.F3, alpha=0.05, beta=0.02), 0),
]


@pytest.mark.parametrize("kind, strength, spec, n_r", STATES)
def test_fixed_point_agrees_with_bisection(kind, strength, spec, n_r):
    fp = solve_coupled(UNIT, kind, strength, spec, n_r, method="fixed_point")
    bis = solve_coupled(UNIT, kind, strength, spec, n_r, method="bisection")
    assert abs(fp.epsilon - bis.epsilon) <= 1e-8


@pytest.mark.parametrize("kind, strength, spec, n_r", STATES)
def test_self_consistency_residual(kind, strength, spec, n_r):
    state = solve_coupled(UNIT, kind, strength, spec, n_r)
    again = radial_energy(UNIT, RadialSpec(state.radial.kind, strength, n_r,
                                           state.l_effective)).epsilon
    assert abs(again - state.epsilon) <= 1e-9
    assert validate(state) == []
    if spec.alpha > 0:
        assert state.epsilon <= energy_upper_bound(spec, state.solution, UNIT)


@pytest.mark.parametrize("m", [-2, -1, 0, 1, 2])
@pytest.mark.parametrize("n_theta", [0, 1, 2])
@pytest.mark.parametrize("n_r", [0, 1, 2])
def test_spherical_harmonic_reduction(m, n_theta, n_r):
    state = solve_coupled(UNIT, "coulomb", 1.0, AngularSpec(Family.F1, m=m, n_theta=n_theta), n_r)
    big_l = n_theta + abs(m)
    assert state.l_effective == pytest.approx(big_l, abs=1e-10)
    assert state.epsilon == pytest.approx(coulomb_eps(1.0, n_r + big_l + 1), abs=1e-10)


def test_units_enter_through_eta():
    const = Constants(M=2.0, c=1.5)
    state = solve_coupled(const, "coulomb", 0.7, AngularSpec(Family.F1, m=1))
    assert state.epsilon == pytest.approx(coulomb_eps(0.7, 2, 1.5, const.rest_energy), rel=1e-12)


def test_no_bracket_reports_scan():
    with pytest.raises(ConvergenceError) as exc:
        solve_coupled(UNIT, "coulomb", 1.0, AngularSpec(Family.F2, gamma=-10.0),
                      method="bisection")
    assert len(exc.value.scan) > 0


def test_fixed_point_propagates_restriction_error():
    with pytest.raises(NoAdmissibleBranch):
        solve_coupled(UNIT, "coulomb", 1.0, AngularSpec(Family.F2, gamma=-10.0),
                      method="fixed_point")


def test_unknown_method():
    with pytest.raises(ValueError):
        solve_coupled(UNIT, "coulomb", 1.0, AngularSpec(Family.F1), method="newton")


R = np.linspace(0.5, 5.0, 41)
TH = np.linspace(0.2, 2.9, 31)


def upper_field(m=1):
    rr, tt = np.meshgrid(R, TH, indexing="ij")
    return np.exp(-rr) * np.sin(tt) ** abs(m) * (1 + 0.3 * np.cos(tt))


def test_zero_upper_gives_zero_lower():
    chi = lower_spinor(UNIT, 0.9, np.zeros((R.size, TH.size)), R, TH, 0.3, 1)
    assert chi.shape == (2, R.size, TH.size)
    assert np.all(chi == 0)


def test_lower_linear_in_upper():
    f = upper_field()
    a = lower_spinor(UNIT, 0.9, f, R, TH, 0.3, 1)
    b = lower_spinor(UNIT, 0.9, 2.5 * f, R, TH, 0.3, 1)
    assert np.allclose(b, 2.5 * a, rtol=1e-12, atol=1e-13 * np.abs(b).max())


def test_lower_inverse_in_energy():
    f = upper_field()
    eps = 0.9
    a = lower_spinor(UNIT, eps, f, R, TH, 0.3, 1)
    b = lower_spinor(UNIT, 2 * (eps + 1) - 1, f, R, TH, 0.3, 1)
    assert np.allclose(b, 0.5 * a, rtol=1e-12, atol=1e-13 * np.abs(a).max())


def test_lower_matches_analytic_radial_derivative():
    spec = RadialSpec.coulomb(1.0)
    k = radial_energy(UNIT, spec).k_scale
    r = np.linspace(0.5, 3.0, 2501)
    th = np.linspace(0.3, 2.8, 7)
    upper = np.outer(2 * k * np.exp(-k * r), np.ones_like(th))  # u(r)/r for n_r = l = 0
    eps = 0.6
    chi = lower_spinor(UNIT, eps, upper, r, th, 0.0, 0)
    expected = (-1j / (eps + 1)) * np.outer(-2 * k**2 * np.exp(-k * r), np.cos(th))
    assert np.allclose(chi[0], expected, rtol=1e-5, atol=1e-9)


def test_mesh_too_coarse():
    with pytest.raises(ValueError):
        lower_spinor(UNIT, 0.9, np.ones((4, 6)), R[:4], TH[:6], 0.0, 0)


def test_normalize_examples():
    x = np.linspace(0, 1, 11)
    assert np.allclose(normalize(GridFunction(x, np.ones(11))).values, 1.0)
    x2 = np.linspace(0, 2, 11)
    assert np.allclose(normalize(GridFunction(x2, 3 * np.ones(11))).values, 1 / math.sqrt(2))


def weighted_norm(g, weight):
    w = np.sin(g.abscissae) if weight == "sin" else 1.0
    return np.trapezoid(np.abs(g.values) ** 2 * w, g.abscissae)


@given(arrays(np.float64, 20, elements=st.floats(-5, 5)), st.sampled_from(["dr", "sin", "dphi"]))
def test_normalize_idempotent(values, weight):
    x = np.linspace(0.1, 3.0, 20)
    g = GridFunction(x, values)
    if weighted_norm(g, weight) < 1e-12:
        return
    once = normalize(g, weight)
    assert weighted_norm(once, weight) == pytest.approx(1.0, rel=1e-12)
    assert np.allclose(normalize(once, weight).values, once.values, rtol=1e-10, atol=1e-12)


def test_normalize_errors():
    x = np.linspace(0, 1, 5)
    with pytest.raises(ValueError):
        normalize(GridFunction(x, np.zeros(5)))
    with pytest.raises(ValueError):
        normalize(GridFunction(x, np.ones(5)), weight="dtheta")


def test_assemble_spinor():
    state = solve_coupled(UNIT, "coulomb", 1.0, AngularSpec(Family.F1, alpha=0.2, m=1))
    r = np.linspace(0.05, 30, 300)
    th = np.linspace(0.05, math.pi - 0.05, 120)
    sample = assemble_spinor(UNIT, state, r, th, 0.4)
    assert sample.lower.shape == (2, r.size, th.size)
    assert np.trapezoid(np.abs(sample.radial.values) ** 2, r) == pytest.approx(1.0)
    assert np.trapezoid(np.abs(sample.angular.values) ** 2 * np.sin(th), th) == pytest.approx(1.0)
    assert np.all(np.isfinite(sample.lower))
    assert sample.epsilon == state.epsilon


def test_assemble_rejects_unconverged():
    import dataclasses
    state = solve_coupled(UNIT, "coulomb", 1.0, AngularSpec(Family.F1))
    with pytest.raises(ConvergenceError):
        assemble_spinor(UNIT, dataclasses.replace(state, converged=False),
                        np.linspace(0.1, 1, 6), np.linspace(0.1, 3, 6), 0.0)
