"""Generalized Laguerre and Jacobi polynomials.

The recurrence evaluators are the production path; the ``*_series`` functions
are direct hypergeometric sums kept as independent references.  Jacobi
evaluation runs in complex arithmetic so that conjugate-pair parameters and
imaginary arguments (the f3 angular family) go through the same code.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SERIES_MAX_DEGREE = 12
_DEGENERATE = 1e-14


class DegenerateRecurrenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PolyEval:
    value: complex
    degree: int
    condition_hint: float


def _check_degree(n):
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n!r}")
    return int(n)


def laguerre(n, alpha, x):
    """L_n^alpha(x) by the three-term recurrence."""
    n = _check_degree(n)
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def _jacobi_recurrence(n, a, b, x):
    prev = np.ones_like(x)
    if n == 0:
        return prev, 1.0
    cur = 0.5 * (a - b) + 0.5 * (a + b + 2) * x
    hint = max(1.0, float(np.max(np.abs(cur))))
    for k in range(2, n + 1):
        s = 2 * k + a + b
        denom = 2 * k * (k + a + b) * (s - 2)
        if abs(denom) < _DEGENERATE * max(1.0, abs(s) ** 3):
            raise DegenerateRecurrenceError(
                f"vanishing recurrence coefficient at k={k} for a={a}, b={b}")
        c1 = (s - 1) * (s * (s - 2) * x + a * a - b * b)
        c2 = 2 * (k + a - 1) * (k + b - 1) * s
        prev, cur = cur, (c1 * cur - c2 * prev) / denom
        hint = max(hint, float(np.max(np.abs(cur))))
    return cur, hint


def jacobi(n, a, b, x):
    """P_n^(a,b)(x) for complex a, b, x.

    Falls back to the explicit sum when the recurrence degenerates and
    n <= SERIES_MAX_DEGREE.
    """
    return jacobi_eval(n, a, b, x).value


def jacobi_eval(n, a, b, x) -> PolyEval:
    n = _check_degree(n)
    a, b = complex(a), complex(b)
    xs = np.asarray(x, dtype=complex)
    try:
        value, hint = _jacobi_recurrence(n, a, b, xs)
    except DegenerateRecurrenceError:
        if n > SERIES_MAX_DEGREE:
            raise
        value = jacobi_series(n, a, b, xs)
        hint = max(1.0, float(np.max(np.abs(value))))
    return PolyEval(value=value, degree=n, condition_hint=hint)


def _binom(z, j):
    """Generalized binomial coefficient C(z, j) for complex z, integer j >= 0."""
    out = 1.0 + 0j
    for i in range(j):
        out *= (z - i) / (i + 1)
    return out


def _series_guard(n):
    n = _check_degree(n)
    if n > SERIES_MAX_DEGREE:
        raise OverflowError(f"series evaluation limited to n <= {SERIES_MAX_DEGREE}")
    return n


def laguerre_series(n, alpha, x):
    """sum_k C(n+alpha, n-k) (-x)^k / k!"""
    n = _series_guard(n)
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for k in range(n + 1):
        total = total + _binom(n + alpha, n - k).real * (-x) ** k / math.factorial(k)
    return total


def jacobi_series(n, a, b, x):
    """sum_k C(n+a, n-k) C(n+b, k) ((x-1)/2)^k ((x+1)/2)^(n-k)"""
    n = _series_guard(n)
    x = np.asarray(x, dtype=complex)
    lo, hi = 0.5 * (x - 1), 0.5 * (x + 1)
    total = np.zeros_like(x)
    for k in range(n + 1):
        total = total + _binom(n + a, n - k) * _binom(n + b, k) * lo**k * hi ** (n - k)
    return total
