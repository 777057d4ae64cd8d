"""Independent reference computations used to cross-check the main pipeline.

None of these share code with the quadrature, theta or jet machinery: the
arithmetic-geometric mean gives elliptic periods, q-expansions of Eisenstein
series give the j-invariant, and central finite differences give derivatives.
"""
from __future__ import annotations

import cmath
import itertools
import math

import numpy as np


def agm(a: complex, b: complex, tol: float = 1e-16, max_iter: int = 60) -> complex:
    """Arithmetic-geometric mean with the 'right' square-root choice at each step."""
    a, b = complex(a), complex(b)
    for _ in range(max_iter):
        a1 = (a + b) / 2
        b1 = cmath.sqrt(a * b)
        if abs(a1 - b1) > abs(a1 + b1):
            b1 = -b1
        a, b = a1, b1
        if abs(a - b) <= tol * abs(a):
            return a
    raise ArithmeticError("AGM did not converge")


def tau_agm_real(roots) -> complex:
    """tau of y^2 = (x-e1)(x-e2)(x-e3) with real e1 > e2 > e3 from two AGMs."""
    e3, e2, e1 = sorted(float(np.real(r)) for r in roots)
    return 1j * agm(math.sqrt(e1 - e3), math.sqrt(e1 - e2)) / agm(math.sqrt(e1 - e3), math.sqrt(e2 - e3))


def reduce_tau(tau: complex, max_iter: int = 100) -> complex:
    """Representative of tau in the standard SL(2,Z) fundamental domain."""
    tau = complex(tau)
    for _ in range(max_iter):
        tau -= round(tau.real)
        if abs(tau) < 1 - 1e-14:
            tau = -1 / tau
        else:
            return tau
    return tau


def _divisor_power_sum(n: int, k: int) -> int:
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def j_from_tau(tau: complex, terms: int = 60) -> complex:
    """Klein j via E4 and E6 q-expansions (tau should be reduced first)."""
    q = cmath.exp(2j * math.pi * tau)
    e4 = 1 + 240 * sum(_divisor_power_sum(n, 3) * q ** n for n in range(1, terms))
    e6 = 1 - 504 * sum(_divisor_power_sum(n, 5) * q ** n for n in range(1, terms))
    return 1728 * e4 ** 3 / (e4 ** 3 - e6 ** 2)


def j_from_cubic(l0: complex, l1: complex, l2: complex) -> complex:
    """j-invariant of y^2 = x^3 + l2 x^2 + l1 x + l0."""
    p = l1 - l2 * l2 / 3
    q = 2 * l2 ** 3 / 27 - l2 * l1 / 3 + l0
    return 1728 * 4 * p ** 3 / (4 * p ** 3 + 27 * q ** 2)


_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
}


def _central(fun, z0, alpha, h):
    grid = [sorted(_STENCILS[a].items()) for a in alpha]
    total = 0j
    for combo in itertools.product(*grid):
        w = 1.0
        z = z0.copy()
        for d, (k, c) in enumerate(combo):
            w *= c
            z[d] += k * h
        total += w * fun(z)
    return total / h ** sum(alpha)


def fd_derivative(fun, z0, alpha, h: float = 1e-3, levels: int = 1) -> complex:
    """Central finite difference of ``fun`` (vector argument) with Richardson steps.

    Each level halves ``h`` and cancels the next even power of the step.
    """
    z0 = np.asarray(z0, dtype=complex)
    table = [_central(fun, z0, alpha, h / 2 ** k) for k in range(levels + 1)]
    for lev in range(1, levels + 1):
        f = 4 ** lev
        table = [(f * table[k + 1] - table[k]) / (f - 1) for k in range(len(table) - 1)]
    return complex(table[0])
