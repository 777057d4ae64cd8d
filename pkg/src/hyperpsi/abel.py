"""Abel map from the point at infinity, the embedding of the curve, and
lattice reduction on the Jacobian.

Near infinity the odd model has the local parameter ``s`` with ``x = 1/s^2``,
``y = s^-(2g+1) sqrt(F(s))`` and ``F(s) = prod_j (1 - e_j s^2)``, so

    x^(k-1) dx / (2y) = -s^(2g-2k) ds / sqrt(F(s))

is regular at ``s = 0``.  A path to ``P`` first runs radially in the s-chart
from 0 out to a circle enclosing every branch point, then follows straight
segments in x, detouring around branch points that come too close.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .curve import Curve, CurvePoint, y_on_segment
from .errors import NoConvergence, PathNearBranch
from .periods import PeriodData

GL_RTOL = 1e-13
GL_MAX_NODES = 2 ** 12


@lru_cache(maxsize=None)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


@dataclass(frozen=True)
class DivisorPair:
    p1: CurvePoint
    p2: CurvePoint


@dataclass(frozen=True)
class JacPoint:
    u: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.u)):
            raise ValueError("Jacobian point has non-finite coordinates")


@dataclass(frozen=True)
class AbelPath:
    """How the path from infinity to a point is routed.

    ``angle_offset`` rotates the direction in which the path enters from
    infinity; ``waypoints`` are extra x-values visited in order before the
    target; ``detour_sign`` picks the side used when passing a branch point.
    """

    angle_offset: float = 0.0
    waypoints: tuple[complex, ...] = ()
    detour_sign: int = 1


DEFAULT_PATH = AbelPath()


def _gauss_legendre(fun, a: complex, b: complex, rtol: float = GL_RTOL, n0: int = 16):
    """Integrate a vector-valued analytic ``fun(x)`` over the straight segment a -> b."""
    def rule(n):
        t, w = _leggauss(n)
        xs = a + (b - a) * (t + 1) / 2
        return (fun(xs) * w[None, :]).sum(axis=1) * (b - a) / 2

    n = n0
    prev = rule(n)
    while True:
        n *= 2
        cur = rule(n)
        diff = np.max(np.abs(cur - prev))
        if diff <= rtol * max(1.0, np.max(np.abs(cur))):
            return cur
        if n >= GL_MAX_NODES:
            raise NoConvergence(f"Gauss-Legendre did not converge on [{a}, {b}]: {diff:.2e}")
        prev = cur


def _margin(curve: Curve) -> float:
    return 0.1 * curve.branch.min_separation


def _split_for_branch_points(curve: Curve, a: complex, b: complex, sign: int,
                             depth: int = 0) -> list[complex]:
    """Polyline from a to b (inclusive) keeping a margin from every branch point."""
    r = _margin(curve)
    d = b - a
    if abs(d) == 0:
        return [a, b]
    t_hat = d / abs(d)
    for e in curve.branch.finite_branch_points:
        s = ((e - a) * t_hat.conjugate()).real
        if s <= 0 or s >= abs(d):
            continue
        off = ((e - a) * t_hat.conjugate()).imag
        if abs(off) >= r:
            continue
        if depth > 8:
            raise PathNearBranch(f"cannot route around branch point {e}")
        # pass on the side the segment already lies on (or detour_sign if through e)
        side = -np.sign(off) if off != 0 else sign
        nrm = 1j * t_hat * side
        q1 = e - 1.5 * r * t_hat + 1.5 * r * nrm
        q2 = e + 1.5 * r * t_hat + 1.5 * r * nrm
        out = []
        for u, v in ((a, q1), (q1, q2), (q2, b)):
            piece = _split_for_branch_points(curve, u, v, sign, depth + 1)
            out.extend(piece if not out else piece[1:])
        return out
    return [a, b]


def _s_chart(curve: Curve, s_end: complex):
    """Integrals of du_k from infinity to s_end and the y value reached there."""
    g = curve.genus
    roots = np.asarray(curve.branch.finite_branch_points)

    def fun(ss):
        sqrtF = np.ones_like(ss)
        for e in roots:
            sqrtF = sqrtF * np.sqrt(1 - e * ss * ss)
        return np.array([-(ss ** (2 * g - 2 * k)) / sqrtF for k in range(1, g + 1)])

    vals = _gauss_legendre(fun, 0j, s_end)
    sqrtF_end = np.prod([np.sqrt(1 - e * s_end * s_end) for e in roots])
    y_end = s_end ** (-(2 * g + 1)) * sqrtF_end
    return vals, complex(y_end)


def _x_piece(curve: Curve, a: complex, y_a: complex, b: complex):
    g = curve.genus

    def fun(xs):
        ys = y_on_segment(curve, a, y_a, xs)
        return np.array([xs ** (k - 1) / (2 * ys) for k in range(1, g + 1)])

    vals = _gauss_legendre(fun, a, b)
    y_b = complex(y_on_segment(curve, a, y_a, np.array([b]))[0])
    return vals, y_b


def abel_point(curve: Curve, p: CurvePoint, path: AbelPath = DEFAULT_PATH) -> np.ndarray:
    """``int_infinity^P (du_1, ..., du_g)`` along the routed path."""
    g = curve.genus
    if p.is_infinity:
        return np.zeros(g, dtype=complex)
    roots = np.asarray(curve.branch.finite_branch_points)
    dist = np.min(np.abs(p.x - roots))
    if dist < 1e-6 * max(1.0, np.max(np.abs(roots))):
        raise PathNearBranch(f"target x={p.x} sits on a branch point")
    R = 2.0 * max(1.0, float(np.max(np.abs(roots)))) + 1.0
    if abs(p.x) >= R and not path.waypoints and path.angle_offset == 0.0:
        # far out: the s-chart alone reaches P
        total, y = _s_chart(curve, 1.0 / np.sqrt(p.x))
        return _match_sheet(total, y, p)
    phi = (np.angle(p.x) if p.x != 0 else 0.0) + path.angle_offset
    x_m = R * np.exp(1j * phi)
    s_m = 1.0 / np.sqrt(x_m)
    total, y = _s_chart(curve, s_m)
    stops = [x_m, *path.waypoints, p.x]
    x = x_m
    for target in stops[1:]:
        poly = _split_for_branch_points(curve, x, target, path.detour_sign)
        for a, b in zip(poly[:-1], poly[1:]):
            vals, y = _x_piece(curve, a, y, b)
            total = total + vals
        x = target
    return _match_sheet(total, y, p)


def _match_sheet(total: np.ndarray, y: complex, p: CurvePoint) -> np.ndarray:
    if abs(y - p.y) > abs(y + p.y):
        # the mirrored path (s -> -s) ends on the other sheet and negates everything
        total, y = -total, -y
    if abs(y - p.y) > 1e-8 * max(1.0, abs(p.y)):
        raise PathNearBranch(f"sheet tracking ended at y={y}, expected {p.y}")
    return total


def abel(curve: Curve, periods: PeriodData | None, d: DivisorPair,
         path1: AbelPath = DEFAULT_PATH, path2: AbelPath = DEFAULT_PATH) -> JacPoint:
    u = abel_point(curve, d.p1, path1) + abel_point(curve, d.p2, path2)
    return JacPoint(u)


def embed(curve: Curve, periods: PeriodData | None, p: CurvePoint,
          path: AbelPath = DEFAULT_PATH) -> JacPoint:
    return JacPoint(abel_point(curve, p, path))


def lattice_basis(periods: PeriodData) -> np.ndarray:
    """Columns 2 omega'_j then 2 omega''_j."""
    return np.hstack([2 * periods.omega1, 2 * periods.omega2])


def reduce_lattice(periods: PeriodData, u) -> tuple[JacPoint, np.ndarray]:
    """Subtract the lattice vector nearest in period coordinates."""
    u = np.asarray(getattr(u, "u", u), dtype=complex)
    L = lattice_basis(periods)
    real_sys = np.vstack([L.real, L.imag])
    coords = np.linalg.solve(real_sys, np.concatenate([u.real, u.imag]))
    n = np.floor(coords + 0.5).astype(int)
    return JacPoint(u - L @ n), n


def normalized_abel(periods: PeriodData, u) -> np.ndarray:
    u = np.asarray(getattr(u, "u", u), dtype=complex)
    return np.linalg.solve(periods.omega1, u)
