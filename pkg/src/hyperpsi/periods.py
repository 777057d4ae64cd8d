"""Homology basis, period matrices and second-kind periods.

Cycles are built from the chain of straight segments joining consecutive
branch points (sorted by real part).  The lift of a segment ``[e_k, e_{k+1}]``
travelled on one sheet and back on the other is a closed cycle ``c_k``; its
integral is twice the segment integral, which is evaluated by Gauss-Chebyshev
quadrature because the Chebyshev weight absorbs both inverse square-root
endpoint singularities.

Adjacent chain cycles meet transversally at their shared branch point, and the
sign of that intersection is read off from the local coordinate
``zeta = sqrt(x - e)``.  The chain is then reoriented so that
``<c_k, c_{k+1}> = +1`` and combined into a symplectic basis

    alpha_1 = c_1, alpha_2 = c_3, beta_1 = c_2 + c_4, beta_2 = c_4

(genus one uses ``alpha = c_1, beta = c_2``).
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .curve import BranchData, Curve
from .errors import CutCrossing, IllConditioned, NoConvergence
from .report import ResidualReport

QUAD_RTOL = 1e-11
QUAD_FAIL_TOL = 1e-8
QUAD_MAX_NODES = 2 ** 14


class DifferentialKind(enum.Enum):
    FIRST1 = "first1"
    FIRST2 = "first2"
    SECOND1 = "second1"
    SECOND2 = "second2"


def differential_numerator(curve: Curve, kind: DifferentialKind) -> np.ndarray:
    """Coefficients (constant first) of the numerator p with the form p(x) dx / (2y).

    First kind: ``x**(j-1)``.  Second kind:
    ``sum_{k=j}^{2g+1-j} (k+1-j) lambda_{k+1+j} x**k``, which for genus two is
    ``lambda_3 x + 2 lambda_4 x^2 + 3 x^3`` and ``x^2``.
    """
    g = curve.genus
    idx = {DifferentialKind.FIRST1: ("first", 1), DifferentialKind.FIRST2: ("first", 2),
           DifferentialKind.SECOND1: ("second", 1), DifferentialKind.SECOND2: ("second", 2)}
    family, j = idx[kind]
    if j > g:
        raise ValueError(f"{kind.value} does not exist in genus {g}")
    p = np.zeros(2 * g + 1, dtype=complex)
    if family == "first":
        p[j - 1] = 1.0
    else:
        for k in range(j, 2 * g + 2 - j):
            p[k] += (k + 1 - j) * curve.lam(k + 1 + j)
    return p


def _numerator_table(curve: Curve) -> np.ndarray:
    """Rows: du_1..du_g, dr_1..dr_g."""
    g = curve.genus
    kinds = [DifferentialKind.FIRST1, DifferentialKind.FIRST2][:g] + \
            [DifferentialKind.SECOND1, DifferentialKind.SECOND2][:g]
    return np.array([differential_numerator(curve, k) for k in kinds])


@dataclass(frozen=True)
class ChainSegment:
    """Segment between two branch points with the sheet fixed at its midpoint.

    On the segment ``y = i h sqrt(1 - t^2) G(x)`` where ``x = mid + h t`` and
    ``G`` is the continuation of ``G_mid`` (a square root of the cofactor of f).
    """

    start: complex
    end: complex
    others: tuple[complex, ...]
    g_mid: complex
    sign: int = 1

    @property
    def mid(self) -> complex:
        return 0.5 * (self.start + self.end)

    @property
    def half(self) -> complex:
        return 0.5 * (self.end - self.start)

    def cofactor_root(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=complex)
        out = np.full(xs.shape, self.g_mid, dtype=complex)
        m = self.mid
        for e in self.others:
            out = out * np.sqrt((xs - e) / (m - e))
        return out

    def y(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        xs = self.mid + self.half * ts
        return self.sign * 1j * self.half * np.sqrt(1 - ts * ts) * self.cofactor_root(xs)


@dataclass(frozen=True)
class HomologyBasis:
    """Symplectic basis expressed through the oriented chain cycles.

    ``alpha[j]`` and ``beta[j]`` map chain indices to integer coefficients.
    ``chain_intersections`` is the antisymmetric matrix ``<c_k, c_l>`` found
    from the local geometry at shared branch points.
    """

    segments: tuple[ChainSegment, ...]
    alpha: tuple[tuple[int, ...], ...]
    beta: tuple[tuple[int, ...], ...]
    chain_intersections: np.ndarray

    @property
    def genus(self) -> int:
        return len(self.alpha)

    def cycles(self) -> list[tuple[int, ...]]:
        """alpha_1, beta_1, alpha_2, beta_2 ordering."""
        out = []
        for a, b in zip(self.alpha, self.beta):
            out += [a, b]
        return out

    def intersection_matrix(self) -> np.ndarray:
        """Intersection numbers in the order (alpha_1, beta_1, ..., alpha_g, beta_g)."""
        cyc = np.array(self.cycles(), dtype=int)
        return cyc @ self.chain_intersections @ cyc.T

    def flipped(self, which: str, j: int) -> "HomologyBasis":
        """Same basis with one cycle reversed, e.g. ``flipped("alpha", 0)``."""
        alpha, beta = list(self.alpha), list(self.beta)
        target = alpha if which == "alpha" else beta
        target[j] = tuple(-c for c in target[j])
        return replace(self, alpha=tuple(alpha), beta=tuple(beta))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return np.sign(((b - a).conjugate() * (c - a)).imag)
    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    return o1 * o2 < 0 and o3 * o4 < 0


def _chain_is_simple(points) -> bool:
    n = len(points) - 1
    for i in range(n):
        for j in range(i + 2, n):
            if _segments_cross(points[i], points[i + 1], points[j], points[j + 1]):
                return False
    return True


def _nearest_neighbour_chain(points):
    remaining = list(points[1:])
    chain = [points[0]]
    while remaining:
        last = chain[-1]
        k = min(range(len(remaining)), key=lambda i: abs(remaining[i] - last))
        chain.append(remaining.pop(k))
    return chain


def _local_direction(seg: ChainSegment, at_end: bool, c_local: complex) -> complex:
    """Unit vector in the zeta = sqrt(x - e) chart of sheet + near an endpoint."""
    t = 1.0 if at_end else -1.0
    x = seg.end if at_end else seg.start
    v = seg.sign * 1j * seg.half * seg.cofactor_root(np.array([x]))[0] / c_local
    return v / abs(v)


def build_homology(branch: BranchData) -> HomologyBasis:
    roots = list(branch.finite_branch_points)
    chain = roots
    if not _chain_is_simple(chain):
        chain = _nearest_neighbour_chain(roots)
        if not _chain_is_simple(chain):
            raise CutCrossing("could not find a non-crossing chain of branch cuts")
    segs = []
    for a, b in zip(chain[:-1], chain[1:]):
        others = tuple(e for e in roots if e != a and e != b)
        m = 0.5 * (a + b)
        g_mid = np.sqrt(np.prod([m - e for e in others]))
        segs.append(ChainSegment(a, b, others, complex(g_mid)))

    # orient consecutive cycles so that <c_k, c_{k+1}> = +1
    n = len(segs)
    for k in range(n - 1):
        e = segs[k].end
        fprime = np.prod([e - r for r in roots if r != e])
        c_local = np.sqrt(fprime)
        v1 = -_local_direction(segs[k], True, c_local)
        v2 = _local_direction(segs[k + 1], False, c_local)
        cross = (v1.conjugate() * v2).imag
        if abs(cross) < 1e-12:
            raise CutCrossing("adjacent chain cycles are tangent at a branch point")
        if cross < 0:
            segs[k + 1] = replace(segs[k + 1], sign=-segs[k + 1].sign)
    K = np.zeros((n, n), dtype=int)
    for k in range(n - 1):
        K[k, k + 1], K[k + 1, k] = 1, -1

    if n == 2:
        alpha, beta = ((1, 0),), ((0, 1),)
    else:
        alpha = ((1, 0, 0, 0), (0, 0, 1, 0))
        beta = ((0, 1, 0, 1), (0, 0, 0, 1))
    return HomologyBasis(tuple(segs), alpha, beta, K)


def _segment_integrals(seg: ChainSegment, numerators: np.ndarray, n: int) -> np.ndarray:
    """Integral over the segment of p(x) dx / (2y) for every row p of ``numerators``."""
    k = np.arange(1, n + 1)
    t = np.cos((2 * k - 1) * np.pi / (2 * n))
    xs = seg.mid + seg.half * t
    # dx/(2y) = h dt / (2 i h sqrt(1-t^2) G) ; the 1/sqrt(1-t^2) is the Chebyshev weight
    base = 1.0 / (2j * seg.sign * seg.cofactor_root(xs))
    powers = xs[None, :] ** np.arange(numerators.shape[1])[:, None]
    vals = numerators @ powers
    return (np.pi / n) * (vals * base[None, :]).sum(axis=1)


def segment_integrals(seg: ChainSegment, numerators: np.ndarray,
                      rtol: float = QUAD_RTOL, n0: int = 16) -> np.ndarray:
    n = n0
    prev = _segment_integrals(seg, numerators, n)
    while True:
        n *= 2
        cur = _segment_integrals(seg, numerators, n)
        diff = np.max(np.abs(cur - prev))
        if diff <= rtol * max(np.max(np.abs(cur)), 1e-300):
            return cur
        if n >= QUAD_MAX_NODES:
            if diff > QUAD_FAIL_TOL * np.max(np.abs(cur)):
                raise NoConvergence(f"segment quadrature disagreement {diff:.2e} at {n} nodes")
            return cur
        prev = cur


def integrate_differential(curve: Curve, kind: DifferentialKind, cycle,
                           basis: HomologyBasis | None = None) -> complex:
    """Integral of ``kind`` over a cycle given as chain coefficients."""
    basis = basis or build_homology(curve.branch)
    p = differential_numerator(curve, kind)[None, :]
    total = 0j
    for coeff, seg in zip(cycle, basis.segments):
        if coeff:
            total += 2 * coeff * segment_integrals(seg, p)[0]
    return complex(total)


@dataclass(frozen=True)
class PeriodData:
    """Half periods: ``2 omega1 = [oint_{alpha_j} du_i]`` and likewise for the rest."""

    omega1: np.ndarray
    omega2: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    tau: np.ndarray
    gamma_sq: complex | None = None

    @property
    def genus(self) -> int:
        return self.omega1.shape[0]

    def to_json(self) -> str:
        def enc(m):
            return [[[complex(v).real, complex(v).imag] for v in row] for row in m]
        return json.dumps({
            "omega1": enc(self.omega1), "omega2": enc(self.omega2),
            "eta1": enc(self.eta1), "eta2": enc(self.eta2), "tau": enc(self.tau),
            "gamma_sq": None if self.gamma_sq is None else [self.gamma_sq.real, self.gamma_sq.imag],
        })

    @classmethod
    def from_json(cls, text: str) -> "PeriodData":
        d = json.loads(text)

        def dec(m):
            return np.array([[complex(re, im) for re, im in row] for row in m])
        gs = d.get("gamma_sq")
        return cls(dec(d["omega1"]), dec(d["omega2"]), dec(d["eta1"]), dec(d["eta2"]),
                   dec(d["tau"]), None if gs is None else complex(*gs))


def cycle_matrices(curve: Curve, basis: HomologyBasis) -> tuple[np.ndarray, np.ndarray]:
    """Half-integrals over alpha and beta cycles, rows du_1..du_g, dr_1..dr_g."""
    nums = _numerator_table(curve)
    seg_vals = np.array([segment_integrals(s, nums) for s in basis.segments]).T
    A = seg_vals @ np.array(basis.alpha, dtype=float).T
    B = seg_vals @ np.array(basis.beta, dtype=float).T
    return A, B


@lru_cache(maxsize=64)
def _compute_periods_cached(curve: Curve) -> PeriodData:
    basis = build_homology(curve.branch)
    A, B = cycle_matrices(curve, basis)
    g = curve.genus
    omega1, eta1 = A[:g], A[g:]
    omega2, eta2 = B[:g], B[g:]
    if np.linalg.cond(omega1) > 1e8:
        raise IllConditioned(f"cond(omega') = {np.linalg.cond(omega1):.2e}")
    tau = np.linalg.solve(omega1, omega2)
    return PeriodData(omega1, omega2, eta1, eta2, tau)


def compute_periods(curve: Curve) -> PeriodData:
    return _compute_periods_cached(curve)


def legendre_residual(p: PeriodData) -> np.ndarray:
    """``omega'^T eta'' - eta'^T omega'' - (pi i / 2) I``, zero for consistent data."""
    g = p.genus
    m = p.omega1.T @ p.eta2 - p.eta1.T @ p.omega2
    return m - 0.5j * np.pi * np.eye(g)


def check_period_sanity(p: PeriodData) -> list[ResidualReport]:
    sym = float(np.max(np.abs(p.tau - p.tau.T)))
    eig = np.linalg.eigvalsh(0.5 * (p.tau.imag + p.tau.imag.T))
    leg = float(np.max(np.abs(legendre_residual(p))) / (np.pi / 2))
    return [
        ResidualReport.gate("periods", "tau_symmetry", "Eq. 2-6", {}, sym, 1e-9),
        ResidualReport.gate("periods", "im_tau_positive", "Eq. 2-6", {},
                            float(max(0.0, 1e-6 - eig.min())), 0.0),
        ResidualReport.gate("periods", "legendre_relation", "Eq. 2-5/2-9", {}, leg, 1e-8),
    ]
