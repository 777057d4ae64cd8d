"""Monic odd-degree hyperelliptic curves ``y**2 = f(x)`` of genus 1 or 2.

Coefficients are stored constant term first, ``lambdas[k]`` multiplies
``x**k`` and the leading coefficient is exactly one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateCurve, SheetAmbiguity

TOL_ON_CURVE = 1e-10
TOL_ROOT = 1e-12
MIN_ROOT_SEPARATION = 1e-8


def _horner(coeffs: Sequence[complex], x):
    acc = 0.0 + 0.0j
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _polish_roots(coeffs: np.ndarray, roots: np.ndarray, iters: int = 50) -> np.ndarray:
    dcoeffs = coeffs[1:] * np.arange(1, len(coeffs))
    out = roots.astype(complex).copy()
    for i, r in enumerate(out):
        for _ in range(iters):
            fr = _horner(coeffs, r)
            dfr = _horner(dcoeffs, r)
            if dfr == 0:
                break
            step = fr / dfr
            r = r - step
            if abs(step) <= 1e-17 * max(1.0, abs(r)):
                break
        out[i] = r
    return out


@dataclass(frozen=True)
class BranchData:
    """Finite branch points sorted lexicographically plus the cut pairing.

    ``pairing`` lists index pairs into ``finite_branch_points``; the last pair
    uses ``None`` for the point at infinity.
    """

    finite_branch_points: tuple[complex, ...]
    pairing: tuple[tuple[int, int | None], ...]

    @property
    def min_separation(self) -> float:
        e = np.asarray(self.finite_branch_points)
        d = np.abs(e[:, None] - e[None, :])
        d[np.diag_indices_from(d)] = np.inf
        return float(d.min())


@dataclass(frozen=True)
class Curve:
    genus: int
    lambdas: tuple[complex, ...]
    branch: BranchData = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.genus not in (1, 2):
            raise ValueError(f"genus must be 1 or 2, got {self.genus}")
        lam = tuple(complex(c) for c in self.lambdas)
        if len(lam) != 2 * self.genus + 2:
            raise ValueError(
                f"genus {self.genus} needs {2 * self.genus + 2} coefficients "
                f"(odd-degree monic model), got {len(lam)}")
        if lam[-1] != 1:
            raise ValueError("leading coefficient must be exactly 1")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "branch", _compute_branch(lam))

    @property
    def degree(self) -> int:
        return 2 * self.genus + 1

    def lam(self, k: int) -> complex:
        """Coefficient of x**k, zero outside the stored range."""
        if 0 <= k < len(self.lambdas):
            return self.lambdas[k]
        return 0j

    def to_json(self) -> str:
        return json.dumps({"genus": self.genus,
                           "lambdas": [[c.real, c.imag] for c in self.lambdas]})

    @classmethod
    def from_json(cls, text: str) -> "Curve":
        data = json.loads(text)
        return cls(int(data["genus"]), tuple(complex(re, im) for re, im in data["lambdas"]))

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> "Curve":
        roots = list(roots)
        if len(roots) not in (3, 5):
            raise ValueError("need 3 or 5 finite branch points")
        coeffs = np.poly(np.asarray(roots, dtype=complex))[::-1]
        coeffs[-1] = 1.0
        return cls((len(roots) - 1) // 2, tuple(complex(c) for c in coeffs))


@dataclass(frozen=True)
class CurvePoint:
    kind: str
    x: complex = 0j
    y: complex = 0j

    @classmethod
    def infinity(cls) -> "CurvePoint":
        return cls("infinity")

    @classmethod
    def affine(cls, curve: Curve, x: complex, y: complex) -> "CurvePoint":
        x, y = complex(x), complex(y)
        fx = eval_f(curve, x)
        if abs(y * y - fx) > TOL_ON_CURVE * (1 + abs(fx)):
            raise ValueError(f"point ({x}, {y}) is not on the curve: |y^2 - f(x)| = {abs(y*y - fx):.3e}")
        return cls("affine", x, y)

    @property
    def is_infinity(self) -> bool:
        return self.kind == "infinity"

    def involution(self) -> "CurvePoint":
        if self.is_infinity:
            return self
        return CurvePoint("affine", self.x, -self.y)


def eval_f(curve: Curve | Sequence[complex], x):
    """f(x) by Horner's rule, highest coefficient first.

    Accepts a curve or a bare coefficient sequence (constant term first), so
    singular polynomials can be evaluated too.
    """
    return _horner(getattr(curve, "lambdas", curve), x)


def _compute_branch(lambdas: tuple[complex, ...]) -> BranchData:
    coeffs = np.asarray(lambdas, dtype=complex)
    # numpy.roots works from the companion matrix eigenvalues
    raw = np.roots(coeffs[::-1])
    roots = _polish_roots(coeffs, raw)
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    for r in roots:
        if abs(_horner(coeffs, r)) > 1e-9 * scale * max(1.0, abs(r)) ** len(coeffs):
            raise DegenerateCurve(f"root polishing failed at {r}")
    d = np.abs(roots[:, None] - roots[None, :])
    d[np.diag_indices_from(d)] = np.inf
    if d.min() < MIN_ROOT_SEPARATION:
        raise DegenerateCurve(f"repeated roots (separation {d.min():.2e})")
    order = sorted(range(len(roots)), key=lambda i: (roots[i].real, roots[i].imag))
    sorted_roots = tuple(complex(roots[i]) for i in order)
    n = len(sorted_roots)
    pairing = tuple((k, k + 1) for k in range(0, n - 1, 2)) + ((n - 1, None),)
    return BranchData(sorted_roots, pairing)


def branch_points(curve: Curve) -> BranchData:
    return curve.branch


def y_on_segment(curve: Curve, a: complex, y_a: complex, xs) -> np.ndarray:
    """Analytic continuation of y from (a, y_a) along straight segments a -> x.

    Uses ``y(x) = y_a * prod_j sqrt((x - e_j) / (a - e_j))`` with principal
    roots, which is continuous on any straight segment from ``a`` that does
    not pass through a branch point.
    """
    xs = np.asarray(xs, dtype=complex)
    out = np.full(xs.shape, complex(y_a))
    for e in curve.branch.finite_branch_points:
        out = out * np.sqrt((xs - e) / (a - e))
    return out


def continue_y(curve: Curve, path: Sequence[complex], y_start: complex,
               max_depth: int = 40) -> complex:
    """Follow y along a sampled path, taking the square root nearest the last value.

    Consecutive samples are bisected until ``|dy| / |y| < 0.1`` per step.
    """
    path = [complex(p) for p in path]
    y = complex(y_start)
    f0 = eval_f(curve, path[0])
    if abs(y * y - f0) > TOL_ON_CURVE * (1 + abs(f0)):
        raise ValueError("y_start is not a square root of f(path[0])")

    def step(a: complex, b: complex, y: complex, depth: int) -> complex:
        r = np.sqrt(complex(eval_f(curve, b)))
        d_plus, d_minus = abs(r - y), abs(r + y)
        if abs(d_plus - d_minus) <= 1e-10 * max(abs(y), abs(r)):
            if depth >= max_depth:
                raise SheetAmbiguity(f"cannot decide the sheet at x={b}")
            mid = 0.5 * (a + b)
            return step(mid, b, step(a, mid, y, depth + 1), depth + 1)
        cand = r if d_plus < d_minus else -r
        if abs(cand - y) > 0.1 * abs(y) and depth < max_depth:
            mid = 0.5 * (a + b)
            return step(mid, b, step(a, mid, y, depth + 1), depth + 1)
        return cand

    for a, b in zip(path[:-1], path[1:]):
        if a != b:
            y = step(a, b, y, 0)
    return y


def random_curve(seed: int, genus: int = 2) -> Curve:
    """Deterministic curve whose finite branch points are well separated.

    Roots are drawn uniformly from the disc of radius 3 and kept only if they
    are at least 0.5 apart from every previous root.
    """
    rng = np.random.default_rng(seed)
    n = 2 * genus + 1
    roots: list[complex] = []
    while len(roots) < n:
        r = 3.0 * np.sqrt(rng.uniform())
        phi = rng.uniform(0.0, 2.0 * np.pi)
        z = complex(r * np.cos(phi), r * np.sin(phi))
        if all(abs(z - w) >= 0.5 for w in roots):
            roots.append(z)
    return Curve.from_roots(roots)


def random_point(curve: Curve, rng: np.random.Generator, radius: float = 2.5,
                 min_branch_distance: float = 0.3) -> CurvePoint:
    """Affine point with x uniform in a disc, away from the branch points."""
    e = np.asarray(curve.branch.finite_branch_points)
    while True:
        r = radius * np.sqrt(rng.uniform())
        phi = rng.uniform(0.0, 2.0 * np.pi)
        x = complex(r * np.cos(phi), r * np.sin(phi))
        if np.min(np.abs(x - e)) < min_branch_distance:
            continue
        y = np.sqrt(complex(eval_f(curve, x)))
        if rng.uniform() < 0.5:
            y = -y
        return CurvePoint("affine", x, complex(y))
