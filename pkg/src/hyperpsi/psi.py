"""psi-function sequences and the identities they satisfy.

Genus 2, on the embedded curve (u = iota(P)):

    psi_n(u) = sigma(n u) / sigma_2(u)^(n^2),   psi_0 = psi_1 = 0,

and on the whole Jacobian ``Psi_n`` is the same quotient without the
restriction.  Genus 1 uses ``psi_n = sigma(n u) / sigma(u)^(n^2)``.

Values grow like ``exp(c n^2)``, so sequences are stored as complex logs and
every identity is evaluated as a signed sum of monomials scaled by the
largest one.  An exact zero is stored as ``None``.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .abel import AbelPath, DEFAULT_PATH, embed, reduce_lattice
from .curve import CurvePoint, eval_f
from .errors import DegeneratePoint, NearLattice, SingularFit
from .kleinian import (SigmaContext, log_sigma, q_fn, q_jet, sigma_log_jet,
                       sigma_relative, wp_jet)

DEGENERATE_TOL = 1e-8
NEAR_LATTICE_TOL = 1e-6
SINGULAR_FIT_TOL = 1e-10
LIMIT_X2 = (1e2, 1e3, 1e4)

FLAVORS = ("psi_on_curve", "Psi_on_J", "Phi_on_J", "elliptic")

LogValue = complex | None


@dataclass(frozen=True)
class PsiSequence:
    """``values`` holds log psi_k for k = 0..N (None for an exact zero).

    ``defect`` records, for indices that are zero by definition, how small
    the numerically evaluated sigma actually was (relative to its series
    scale).
    """

    flavor: str
    base: object
    logs: tuple
    defect: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.logs) - 1

    def log_value(self, k: int) -> LogValue:
        if abs(k) > self.N:
            raise IndexError(f"index {k} beyond sequence bound {self.N}")
        lv = self.logs[abs(k)]
        if k < 0 and lv is not None:
            # sigma is odd and the denominator depends on k^2 only
            lv = lv + 1j * math.pi
        return lv

    def value(self, k: int) -> complex:
        lv = self.log_value(k)
        return 0j if lv is None else complex(cmath.exp(lv))

    def ratio(self, num, den) -> complex:
        """``prod psi_num / prod psi_den`` formed in log space (no overflow)."""
        top = [self.log_value(k) for k in num]
        bot = [self.log_value(k) for k in den]
        if any(b is None for b in bot):
            raise DegeneratePoint("division by a vanishing psi value")
        if any(t is None for t in top):
            return 0j
        return complex(cmath.exp(sum(top) - sum(bot)))


def _safe_log(z: complex) -> LogValue:
    if z == 0 or not np.isfinite(z):
        return None
    return cmath.log(z)


def _log_sigma_or_none(ctx: SigmaContext, u) -> LogValue:
    v = log_sigma(ctx, u)
    return None if not np.isfinite(v.real) else v


def _log_sigma2(ctx: SigmaContext, u) -> complex:
    ls, jet, abs_scale = sigma_log_jet(ctx, u, 1)
    d2 = jet.deriv((0, 1))
    scale = abs_scale * 2 * math.pi * float(np.linalg.norm(ctx.A, 2))
    if abs(d2) < DEGENERATE_TOL * scale:
        raise DegeneratePoint("sigma_2 vanishes at this point")
    return ls + cmath.log(d2)


def check_affine_point(p: CurvePoint) -> None:
    if p.is_infinity:
        raise DegeneratePoint("the point at infinity has no psi sequence")
    if abs(p.y) < DEGENERATE_TOL * (1 + abs(p.x)) ** 2.5:
        raise DegeneratePoint(f"y = {p.y} is (nearly) zero: a branch point")


def psi_sequence_g2(ctx: SigmaContext, p: CurvePoint, N: int,
                    path: AbelPath = DEFAULT_PATH, u=None) -> PsiSequence:
    """psi_0..psi_N at u = iota(P), with psi_0 = psi_1 = 0 by definition."""
    check_affine_point(p)
    u = embed(ctx.curve, ctx.periods, p, path).u if u is None else np.asarray(u, dtype=complex)
    l2 = _log_sigma2(ctx, u)
    logs: list[LogValue] = [None, None]
    for k in range(2, N + 1):
        ls = _log_sigma_or_none(ctx, k * u)
        logs.append(None if ls is None else ls - k * k * l2)
    defect = {0: 0.0, 1: sigma_relative(ctx, u)}
    return PsiSequence("psi_on_curve", p, tuple(logs[:N + 1]), defect)


def psi_sequence_jacobian(ctx: SigmaContext, u, N: int, flavor: str = "Psi_on_J") -> PsiSequence:
    """Psi_k = sigma(k u) / sigma_2(u)^(k^2) or Phi_k = sigma(k u) / sigma(u)^(k^2) on J."""
    u = np.asarray(getattr(u, "u", u), dtype=complex)
    if flavor == "Psi_on_J":
        den = _log_sigma2(ctx, u)
    elif flavor == "Phi_on_J":
        den = _log_sigma_or_none(ctx, u)
        if den is None:
            raise DegeneratePoint("sigma(u) vanishes")
    else:
        raise ValueError(f"unknown flavor {flavor}")
    logs: list[LogValue] = [None]
    for k in range(1, N + 1):
        ls = _log_sigma_or_none(ctx, k * u)
        logs.append(None if ls is None else ls - k * k * den)
    return PsiSequence(flavor, u, tuple(logs))


def psi_sequence_elliptic(ctx: SigmaContext, u, N: int) -> PsiSequence:
    """Genus-1 psi_k = sigma(k u) / sigma(u)^(k^2), so psi_1 = 1 exactly."""
    if ctx.genus != 1:
        raise ValueError("elliptic sequence needs a genus-1 context")
    u = np.atleast_1d(np.asarray(getattr(u, "u", u), dtype=complex))
    red, _ = reduce_lattice(ctx.periods, u)
    if np.linalg.norm(red.u) < NEAR_LATTICE_TOL * np.linalg.norm(ctx.periods.omega1):
        raise NearLattice("u is within tolerance of a lattice point")
    l1 = _log_sigma_or_none(ctx, u)
    logs: list[LogValue] = [None, 0j]
    for k in range(2, N + 1):
        ls = _log_sigma_or_none(ctx, k * u)
        logs.append(None if ls is None else ls - k * k * l1)
    return PsiSequence("elliptic", u, tuple(logs[:N + 1]))


def psi_g2(ctx: SigmaContext, p: CurvePoint, n: int) -> complex:
    if n < 0:
        raise ValueError("n must be non-negative")
    return psi_sequence_g2(ctx, p, max(n, 1)).value(n)


def psi_elliptic(ctx: SigmaContext, u, n: int) -> complex:
    return psi_sequence_elliptic(ctx, u, max(abs(n), 1)).value(n)


# --- signed monomial sums -------------------------------------------------------

def relative_combination(terms) -> float:
    """``|sum sign * prod psi_k| / max |prod psi_k|`` for terms ``(sign, [log psi ...])``.

    Zero monomials drop out; if every monomial is zero the residual is 0.
    """
    logs = []
    for sign, factors in terms:
        if any(f is None for f in factors):
            continue
        logs.append((sign, sum(factors)))
    if not logs:
        return 0.0
    top = max(l.real for _, l in logs)
    total = sum(s * cmath.exp(l - top) for s, l in logs)
    return abs(total)


def _det3_terms(entry):
    """Signed monomials of a 3x3 determinant whose entries are factor lists."""
    out = []
    for perm in itertools.permutations(range(3)):
        inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
        factors = []
        for i in range(3):
            factors.extend(entry(i, perm[i]))
        out.append((-1 if inv % 2 else 1, factors))
    return out


def recursion_monomials_g2(seq: PsiSequence, m: int, n: int):
    L = seq.log_value
    lhs = (1, [L(2), L(2), L(m), L(n), L(n + m), L(m - n)])

    def entry(i, j):
        return [L(m - 2 + i + j), L(n - i + j)]

    return [lhs] + [(-s, f) for s, f in _det3_terms(entry)]


def recursion_residual_g2(seq: PsiSequence, m: int, n: int) -> float:
    """Relative residual of the 3x3 determinant recursion at (m, n), m >= n >= 0."""
    if not m >= n >= 0:
        raise ValueError("need m >= n >= 0")
    if max(m + 2, m + n) > seq.N:
        raise ValueError(f"sequence too short for (m, n) = ({m}, {n})")
    return relative_combination(recursion_monomials_g2(seq, m, n))


def elliptic_recursion_residual(seq: PsiSequence, m: int, n: int) -> float:
    """psi_{m+n} psi_{m-n} - det[[psi_{m-1} psi_n, psi_m psi_{n+1}], [psi_m psi_{n-1}, psi_{m+1} psi_n]]."""
    L = seq.log_value
    return relative_combination([
        (1, [L(m + n), L(m - n)]),
        (-1, [L(m - 1), L(n), L(m + 1), L(n)]),
        (1, [L(m), L(n + 1), L(m), L(n - 1)]),
    ])


def phi_residual(seq: PsiSequence, m: int, n: int) -> float:
    """The genus-1 recursion pattern applied to Phi_k on the genus-2 Jacobian."""
    if seq.flavor != "Phi_on_J":
        raise ValueError("phi_residual expects a Phi_on_J sequence")
    return elliptic_recursion_residual(seq, m, n)


def _rel(a: complex, b: complex) -> float:
    s = max(abs(a), abs(b))
    return 0.0 if s == 0 else abs(a - b) / s


def elliptic_addition_residuals(ctx: SigmaContext, seq: PsiSequence, m: int, n: int):
    """Residuals of  wp(u) - wp(n u) = psi_{n+1} psi_{n-1} / psi_n^2  and
    wp(n u) - wp(m u) = psi_{m+n} psi_{m-n} / (psi_m^2 psi_n^2)."""
    u = seq.base
    wu = wp_jet(ctx, u, 2).wp(1, 1)
    wn = wp_jet(ctx, n * u, 2).wp(1, 1)
    wm = wp_jet(ctx, m * u, 2).wp(1, 1)
    r = seq.ratio
    r4 = _rel(-(wn - wu), r((n + 1, n - 1), (n, n)))
    r5 = _rel(-(wm - wn), r((n + m, m - n), (m, m, n, n)))
    return r4, r5


# --- restriction to the curve: q, xi ---------------------------------------------

@dataclass(frozen=True)
class QLimits:
    """q(mu,u) and its u-derivatives in closed form on the embedded curve."""

    q: complex
    q1: complex
    q2: complex
    q11: complex
    q12: complex
    q22: complex

    def get(self, name: str) -> complex:
        return getattr(self, name)


def q_limits(ctx: SigmaContext, x: complex, mu) -> QLimits:
    """Closed forms at ``mu`` on the curve (x is the abscissa of P):

    q = x^2 - x wp22(mu) - wp12(mu),  q_i = -wp12i - x wp22i,  q_ij = -wp12ij - x wp22ij.
    """
    J = wp_jet(ctx, mu, 4)
    w = J.wp
    return QLimits(
        q=x * x - x * w(2, 2) - w(1, 2),
        q1=-w(1, 2, 1) - x * w(2, 2, 1),
        q2=-w(1, 2, 2) - x * w(2, 2, 2),
        q11=-w(1, 2, 1, 1) - x * w(2, 2, 1, 1),
        q12=-w(1, 2, 1, 2) - x * w(2, 2, 1, 2),
        q22=-w(1, 2, 2, 2) - x * w(2, 2, 2, 2),
    )


def q_limits_literal(ctx: SigmaContext, x: complex, mu) -> QLimits:
    """The same quantities with the opposite overall sign (q = -x^2 + wp12 + x wp22)."""
    c = q_limits(ctx, x, mu)
    return QLimits(*(-getattr(c, f) for f in ("q", "q1", "q2", "q11", "q12", "q22")))


def xi3_closed(q: QLimits, x: complex) -> complex:
    return q.q * (2 * q.q ** 2 + q.q12 + x * q.q22) - q.q2 * (q.q1 + x * q.q2)


def xi3_closed_literal(q: QLimits, x: complex) -> complex:
    """Literal arrangement, evaluated with the literal-sign q."""
    return q.q * (2 * q.q ** 2 - q.q12 - x * q.q22) - q.q2 * (q.q1 + x * q.q2)


def xi3_scale(q: QLimits, x: complex) -> float:
    """Largest monomial magnitude in the closed form of xi_3."""
    return max(abs(2 * q.q ** 3), abs(q.q * q.q12), abs(x * q.q * q.q22),
               abs(q.q2 * q.q1), abs(x * q.q2 ** 2))


def closed_residual(value: complex, closed: complex, scale: float) -> float:
    """|value - closed| relative to the larger of both sides and the term scale.

    The term scale matters at index pairs where a psi_0 or psi_1 factor makes
    the value vanish identically while the closed form cancels numerically.
    """
    s = max(abs(value), abs(closed), scale)
    return 0.0 if s == 0 else abs(value - closed) / s


def _xi3_from_seq(seq: PsiSequence, k: int) -> complex:
    r = seq.ratio
    return r((k - 1, k - 1, k + 2), (k, k, k)) + r((k + 1, k + 1, k - 2), (k, k, k))


@dataclass(frozen=True)
class XiBundle:
    m: int
    n: int
    xi0: complex
    xi0_swapped: complex
    xi1_m: complex
    xi1_n: complex
    xi2: complex
    xi2_swapped: complex
    xi3_m: complex
    xi3_n: complex
    xi3_m_closed: complex
    xi3_n_closed: complex
    xi0_closed: complex
    xi0_closed_literal: complex
    xi1_m_closed: complex
    xi1_m_closed_literal: complex
    xi2_closed: complex
    xi2_closed_literal: complex
    xi2_via_q: complex
    xi0_scale: float
    xi1_scale: float
    xi2_scale: float
    xi2_via_q_scale: float
    wp12_2u: complex
    wp22_2u: complex
    q_m: QLimits
    q_n: QLimits


def xi_bundle(ctx: SigmaContext, seq: PsiSequence, u, m: int, n: int) -> XiBundle:
    """All xi quantities at u = iota(P) from the psi sequence and in closed form."""
    if not m > n >= 2:
        raise ValueError("need m > n >= 2")
    p = seq.base
    x, y = p.x, p.y
    r = seq.ratio

    def xi0(a, b):
        return r((2, 2, a - b, a + b), (a, a, b, b))

    def xi1(k):
        return r((k - 2, k + 2), (k, k))

    def xi2(a, b):
        return (r((a - 1, a + 1), (a, a)) * _xi3_from_seq(seq, b)
                - r((b - 1, b + 1), (b, b)) * _xi3_from_seq(seq, a))

    jm, jn, j2 = wp_jet(ctx, m * u, 4), wp_jet(ctx, n * u, 4), wp_jet(ctx, 2 * u, 2)
    qm, qn = q_limits(ctx, x, m * u), q_limits(ctx, x, n * u)
    y2 = 4 * y * y
    a11, a12, a22 = jm.wp(1, 1), jm.wp(1, 2), jm.wp(2, 2)
    b11, b12, b22 = jn.wp(1, 1), jn.wp(1, 2), jn.wp(2, 2)
    return XiBundle(
        m=m, n=n,
        xi0=xi0(m, n), xi0_swapped=xi0(n, m),
        xi1_m=xi1(m), xi1_n=xi1(n),
        xi2=xi2(m, n), xi2_swapped=xi2(n, m),
        xi3_m=_xi3_from_seq(seq, m), xi3_n=_xi3_from_seq(seq, n),
        xi3_m_closed=xi3_closed(qm, x), xi3_n_closed=xi3_closed(qn, x),
        xi0_closed=-y2 * (a11 - b11 + a12 * b22 - b12 * a22),
        xi0_closed_literal=-y2 * (a11 - b11 - 2 * a12 * b12 - a22 * b22),
        xi1_m_closed=-y2 * (a11 - j2.wp(1, 1) + 2 * a12 * x + a22 * x * x),
        xi1_m_closed_literal=y2 * (a11 - j2.wp(1, 1) - 2 * a12 * x - a22 * x * x),
        xi2_closed=y2 * (a22 * x * x + 2 * a12 * x - a12 * b22
                         - b22 * x * x - 2 * b12 * x + b12 * a22),
        xi2_closed_literal=y2 * (a22 * x * x + 2 * a12 * x - b12 * a22
                                 - b22 * x * x - 2 * b12 * x - a12 * b22),
        xi2_via_q=qm.q * xi3_closed(qn, x) - qn.q * xi3_closed(qm, x),
        xi0_scale=abs(y2) * max(abs(a11), abs(b11), abs(a12 * b22), abs(b12 * a22),
                                abs(2 * a12 * b12), abs(a22 * b22)),
        xi1_scale=abs(y2) * max(abs(a11), abs(j2.wp(1, 1)), abs(2 * a12 * x), abs(a22 * x * x)),
        xi2_scale=abs(y2) * max(abs(a22 * x * x), abs(2 * a12 * x), abs(a12 * b22),
                                abs(b22 * x * x), abs(2 * b12 * x), abs(b12 * a22)),
        xi2_via_q_scale=max(abs(qm.q) * xi3_scale(qn, x), abs(qn.q) * xi3_scale(qm, x)),
        wp12_2u=j2.wp(1, 2), wp22_2u=j2.wp(2, 2),
        q_m=qm, q_n=qn,
    )


def _relative_sum(terms) -> float:
    scale = max(abs(t) for t in terms)
    return 0.0 if scale == 0 else abs(sum(terms)) / scale


def assembly_residual(b: XiBundle) -> float:
    """xi0(nu,mu) + xi1(mu) - xi1(nu) - xi2(nu,mu), relative to its largest term.

    Every term vanishes identically at (m, n) = (3, 2); the residual is then 0.
    """
    return _relative_sum([b.xi0_swapped, b.xi1_m, -b.xi1_n, -b.xi2_swapped])


def assembly_residual_literal(b: XiBundle) -> float:
    """Same combination with xi2 taken as xi2(mu,nu)."""
    return _relative_sum([b.xi0_swapped, b.xi1_m, -b.xi1_n, -b.xi2])


# --- the full Jacobian: Xi_3 ---------------------------------------------------------

def xi3_jacobian(ctx: SigmaContext, u, m: int):
    """Xi_3(mu,u) from the Psi quotient and from the wp/Q closed form.

    Returns ``(by_definition, closed_form, closed_form_literal)`` where the last
    one flips the signs of the Q_12 and Q_22 terms.
    """
    u = np.asarray(getattr(u, "u", u), dtype=complex)
    seq = psi_sequence_jacobian(ctx, u, m + 2)
    v = seq.value
    by_def = _xi3_from_seq(seq, m)
    ju = wp_jet(ctx, u, 2)
    qj = q_jet(ctx, m * u, u, jv=ju)
    Q = qj.value
    Q1, Q2 = qj.deriv((1, 0)), qj.deriv((0, 1))
    Q11, Q12, Q22 = qj.deriv((2, 0)), qj.deriv((1, 1)), qj.deriv((0, 2))
    w12, w22 = ju.wp(1, 2), ju.wp(2, 2)
    psi1_6 = v(1) ** 6
    tail = -Q1 ** 2 - w22 * Q1 * Q2 + w12 * Q2 ** 2
    closed = psi1_6 * (Q * (2 * Q ** 2 + Q11 + w22 * Q12 - w12 * Q22) + tail)
    literal = psi1_6 * (Q * (2 * Q ** 2 + Q11 - w22 * Q12 + w12 * Q22) + tail)
    return by_def, closed, literal


def psi_addition_residual(ctx: SigmaContext, u, m: int, n: int) -> float:
    """Psi_{m+n} Psi_{m-n} / (Psi_n^2 Psi_m^2) against Q(mu, nu)."""
    u = np.asarray(getattr(u, "u", u), dtype=complex)
    seq = psi_sequence_jacobian(ctx, u, m + n)
    lhs = seq.ratio((m + n, m - n), (n, n, m, m))
    return _rel(lhs, q_fn(ctx, m * u, n * u))


# --- large-x2 limit probes -------------------------------------------------------------

def far_point(curve, x2: float) -> CurvePoint:
    """Affine point with large real x2 on the branch continuous from infinity."""
    s = x2 ** -0.5
    roots = np.asarray(curve.branch.finite_branch_points)
    y2 = s ** -(2 * curve.genus + 1) * np.prod(np.sqrt(1 - roots * s * s))
    return CurvePoint.affine(curve, x2, complex(y2))


@dataclass(frozen=True)
class LimitProbe:
    name: str
    limit: complex
    x2: tuple
    values: tuple

    @property
    def errors(self) -> tuple:
        return tuple(abs(v - self.limit) / (1 + abs(self.limit)) for v in self.values)

    @property
    def monotone(self) -> bool:
        e = self.errors
        return all(b < a for a, b in zip(e[:-1], e[1:]))

    @property
    def final_error(self) -> float:
        return self.errors[-1]


def limit_probes(ctx: SigmaContext, p: CurvePoint, m: int, x2s=LIMIT_X2) -> list[LimitProbe]:
    """Approach iota(P) along u = w(P, P2) with P2 running out to infinity."""
    check_affine_point(p)
    x = p.x
    uP = embed(ctx.curve, ctx.periods, p).u
    closed = q_limits(ctx, x, m * uP)
    series: dict[str, list] = {k: [] for k in (
        "Psi1^2 wp11", "Psi1^2 wp12", "Psi1^2 wp22", "sigma1/sigma2", "-sigma1/sigma2",
        "q", "q1", "q2", "q11", "q12", "q22", "Psi1^6 Q11^2", "Psi1^6 Q Q11")}
    for x2 in x2s:
        u = uP + embed(ctx.curve, ctx.periods, far_point(ctx.curve, x2)).u
        ls, jet, _ = sigma_log_jet(ctx, u, 1)
        s1, s2 = jet.deriv((1, 0)), jet.deriv((0, 1))
        psi1_sq = (jet.value / s2) ** 2
        ju = wp_jet(ctx, u, 2)
        qj = q_jet(ctx, m * u, u, jv=ju)
        series["Psi1^2 wp11"].append(psi1_sq * ju.wp(1, 1))
        series["Psi1^2 wp12"].append(psi1_sq * ju.wp(1, 2))
        series["Psi1^2 wp22"].append(psi1_sq * ju.wp(2, 2))
        series["sigma1/sigma2"].append(s1 / s2)
        series["-sigma1/sigma2"].append(-s1 / s2)
        for name, alpha in (("q", (0, 0)), ("q1", (1, 0)), ("q2", (0, 1)),
                            ("q11", (2, 0)), ("q12", (1, 1)), ("q22", (0, 2))):
            series[name].append(psi1_sq * qj.deriv(alpha))
        series["Psi1^6 Q11^2"].append(psi1_sq ** 3 * qj.deriv((2, 0)) ** 2)
        series["Psi1^6 Q Q11"].append(psi1_sq ** 3 * qj.value * qj.deriv((2, 0)))
    limits = {"Psi1^2 wp11": x * x, "Psi1^2 wp12": -x, "Psi1^2 wp22": 1.0,
              "sigma1/sigma2": x, "-sigma1/sigma2": x,
              "Psi1^6 Q11^2": 0.0, "Psi1^6 Q Q11": 0.0}
    for name in ("q", "q1", "q2", "q11", "q12", "q22"):
        limits[name] = closed.get(name)
    return [LimitProbe(k, complex(limits[k]), tuple(x2s), tuple(series[k])) for k in series]


# --- discrete Painleve I ----------------------------------------------------------------

@dataclass(frozen=True)
class PainleveFit:
    beta: dict
    z: complex
    a: complex
    residuals: dict
    fit_on: tuple


def _beta(seq: PsiSequence, n: int) -> complex:
    return seq.ratio((n + 1, n - 1), (n, n))


def painleve_fit(seq: PsiSequence, fit_on=(2, 3), upto: int = 10) -> PainleveFit:
    """Fit beta_{n+1} beta_{n-1} beta_n^2 = z beta_n + a on two indices.

    ``beta_n = psi_{n+1} psi_{n-1} / psi_n^2``; residuals are relative to the
    largest of the three terms at each remaining n.
    """
    if upto + 2 > seq.N:
        raise ValueError("sequence too short")
    beta = {n: _beta(seq, n) for n in range(1, upto + 2)}
    n1, n2 = fit_on
    A = np.array([[beta[n1], 1.0], [beta[n2], 1.0]], dtype=complex)
    rhs = np.array([beta[n1 + 1] * beta[n1 - 1] * beta[n1] ** 2,
                    beta[n2 + 1] * beta[n2 - 1] * beta[n2] ** 2])
    if abs(beta[n1] - beta[n2]) <= SINGULAR_FIT_TOL * max(abs(beta[n1]), abs(beta[n2]), 1e-300):
        raise SingularFit("beta takes the same value on both fitting indices")
    z, a = np.linalg.solve(A, rhs)
    res = {}
    for n in range(2, upto + 1):
        if n in fit_on:
            continue
        terms = [beta[n + 1] * beta[n - 1] * beta[n] ** 2, -z * beta[n], -a]
        res[n] = _relative_sum(terms)
    return PainleveFit(beta, complex(z), complex(a), res, tuple(fit_on))


def painleve_residual(z, a, b_prev, b, b_next) -> float:
    terms = [b_next * b_prev * b ** 2, -z * b, -a]
    return _relative_sum(terms)


def on_curve_residual(curve, p: CurvePoint) -> float:
    return abs(p.y ** 2 - eval_f(curve, p.x)) / (1 + abs(p.y) ** 2)


def q_expansions(ctx: SigmaContext, x: complex, mu) -> dict:
    """q_12 and q_22 (sign q_ij = wp12ij + x wp22ij) against their expansions in
    second derivatives, in corrected and literal coefficient patterns."""
    J = wp_jet(ctx, mu, 4)
    w = J.wp
    l = ctx.curve.lam
    p11, p12, p22 = w(1, 1), w(1, 2), w(2, 2)
    q12 = w(1, 2, 1, 2) + x * w(2, 2, 1, 2)
    q22 = w(1, 2, 2, 2) + x * w(2, 2, 2, 2)
    return {
        "q12": q12,
        "q22": q22,
        "q12_corrected": (2 * l(3) * p12 + 2 * p11 * p22 + 4 * p12 ** 2
                          + x * (-2 * p11 + 4 * l(4) * p12 + 6 * p12 * p22)),
        "q22_corrected": (-2 * p11 + 4 * l(4) * p12 + 6 * p12 * p22
                          + x * (6 * p22 ** 2 + 4 * p12 + 4 * l(4) * p22 + 2 * l(3))),
        "q12_literal": (6 * p12 * p22 - 4 * (p11 * p22 - p12 ** 2) + 2 * l(2) * p12
                        + x * (6 * p12 * p22 - 2 * p11 + 4 * l(1) * p12)),
        "q22_literal": (6 * p12 * p22 - 2 * p11 + 4 * l(1) * p12
                        + x * (6 * p22 ** 2 + 4 * p12 + 4 * l(1) * p22 + 2 * l(2))),
    }
