"""Truncated multivariate Taylor series (jets) in g <= 2 variables.

A jet of order K stores Taylor coefficients ``c[alpha]`` for total degree
``|alpha| <= K``; partial derivatives are ``alpha! * c[alpha]``.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def multi_indices(g: int, order: int) -> list[tuple[int, ...]]:
    """All multi-indices of total degree <= order, graded then lexicographic."""
    out = []
    for d in range(order + 1):
        for a in itertools.product(range(d + 1), repeat=g):
            if sum(a) == d:
                out.append(a)
    return sorted(out, key=lambda a: (sum(a), tuple(-x for x in a)))


def factorial(alpha) -> int:
    return math.prod(math.factorial(a) for a in alpha)


class Jet:
    __slots__ = ("g", "order", "c")

    def __init__(self, g: int, order: int, c: np.ndarray | None = None):
        self.g, self.order = g, order
        shape = (order + 1,) * g
        self.c = np.zeros(shape, dtype=complex) if c is None else c
        if c is not None:
            self.c = self.c * _mask(g, order)

    @classmethod
    def constant(cls, g, order, value):
        j = cls(g, order)
        j.c[(0,) * g] = value
        return j

    @classmethod
    def from_derivatives(cls, g, order, derivs: dict) -> "Jet":
        j = cls(g, order)
        for alpha, v in derivs.items():
            j.c[alpha] = v / factorial(alpha)
        return j

    @classmethod
    def polynomial(cls, g, order, const, linear, quad=None) -> "Jet":
        """const + linear . h + h^T quad h / 2 (quad symmetric)."""
        j = cls.constant(g, order, const)
        if order < 1:
            return j
        for i in range(g):
            e = [0] * g
            e[i] = 1
            j.c[tuple(e)] += linear[i]
        if quad is not None and order >= 2:
            for i in range(g):
                for k in range(g):
                    e = [0] * g
                    e[i] += 1
                    e[k] += 1
                    j.c[tuple(e)] += 0.5 * quad[i][k]
        return j

    def copy(self) -> "Jet":
        return Jet(self.g, self.order, self.c.copy())

    @property
    def value(self) -> complex:
        return complex(self.c[(0,) * self.g])

    def deriv(self, alpha) -> complex:
        return complex(self.c[tuple(alpha)] * factorial(alpha))

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.g, self.order, self.c + other.c)
        out = self.copy()
        out.c[(0,) * self.g] += other
        return out

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.g, self.order, -self.c)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.g, self.order, self.c * other)
        K = self.order
        out = np.zeros_like(self.c)
        for alpha in multi_indices(self.g, K):
            a = self.c[alpha]
            if a == 0:
                continue
            target = tuple(slice(ai, K + 1) for ai in alpha)
            source = tuple(slice(0, K + 1 - ai) for ai in alpha)
            out[target] += a * other.c[source]
        return Jet(self.g, K, out)

    __rmul__ = __mul__

    def _nilpotent(self):
        r = self.copy()
        r.c[(0,) * self.g] = 0
        return r

    def exp(self) -> "Jet":
        c0 = self.value
        r = self._nilpotent()
        total = Jet.constant(self.g, self.order, 1.0)
        term = Jet.constant(self.g, self.order, 1.0)
        for k in range(1, self.order + 1):
            term = term * r * (1.0 / k)
            total = total + term
        return total * np.exp(c0)

    def log(self) -> "Jet":
        c0 = self.value
        if c0 == 0:
            raise ZeroDivisionError("log of a jet with zero constant term")
        r = self._nilpotent() * (1.0 / c0)
        total = Jet.constant(self.g, self.order, np.log(c0))
        power = Jet.constant(self.g, self.order, 1.0)
        for k in range(1, self.order + 1):
            power = power * r
            total = total + power * ((-1) ** (k + 1) / k)
        return total


_MASKS: dict = {}


def _mask(g, order):
    key = (g, order)
    if key not in _MASKS:
        idx = np.indices((order + 1,) * g).sum(axis=0)
        _MASKS[key] = (idx <= order).astype(float)
    return _MASKS[key]
