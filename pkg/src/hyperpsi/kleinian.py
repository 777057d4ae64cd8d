"""Kleinian sigma function, the hyperelliptic wp hierarchy and the
two-point addition function Q.

    sigma(u) = gamma exp(-u^T kappa u / 2) theta[chi]((2 omega')^-1 u; tau),
    kappa = eta' omega'^-1,
    wp_{ij}(u) = -d_i d_j log sigma(u).

Everything is evaluated in log space through the quasi-periodic reduction of
the theta argument, so points far out on the Jacobian (``sigma(n u)`` for
large ``n``) neither overflow nor underflow.  Higher log-derivatives come
from truncated Taylor jets (:mod:`hyperpsi.jets`) rather than hand-expanded
Faa di Bruno sums.
"""
from __future__ import annotations

import cmath
from itertools import combinations_with_replacement
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .curve import Curve
from .errors import InconsistentGamma, NearDivisor, NoVanishingCharacteristic
from .jets import Jet, factorial, multi_indices
from .periods import PeriodData
from .theta import Characteristic, ThetaConfig, odd_characteristics, theta_log_jet

NEAR_DIVISOR_TOL = 1e-8
GAMMA_SPREAD_TOL = 1e-7
DIVISOR_PROBE_TOL = 1e-7
KAPPA_SYM_TOL = 1e-9


def _u(u) -> np.ndarray:
    return np.atleast_1d(np.asarray(getattr(u, "u", u), dtype=complex))


@dataclass(frozen=True)
class SigmaContext:
    """Everything needed to evaluate sigma on one curve.

    ``gamma_sq`` is the squared normalising constant; ``gamma`` picks the
    square root for which ``d sigma / d u_1 (0)`` is closest to 1 (genus 2)
    or ``sigma'(0)`` is closest to 1 (genus 1).
    """

    curve: Curve
    periods: PeriodData
    chi: Characteristic
    gamma_sq: complex = 1.0
    theta_cfg: ThetaConfig = field(default_factory=ThetaConfig)

    def __post_init__(self):
        k = self.kappa
        if np.max(np.abs(k - k.T)) > KAPPA_SYM_TOL * max(1.0, np.max(np.abs(k))):
            raise ValueError("eta' omega'^-1 is not symmetric; periods are inconsistent")

    @property
    def genus(self) -> int:
        return self.curve.genus

    @cached_property
    def A(self) -> np.ndarray:
        """(2 omega')^-1, mapping u to the theta argument."""
        return np.linalg.inv(2 * self.periods.omega1)

    @cached_property
    def kappa(self) -> np.ndarray:
        return self.periods.eta1 @ np.linalg.inv(self.periods.omega1)

    @cached_property
    def kappa_sym(self) -> np.ndarray:
        return 0.5 * (self.kappa + self.kappa.T)

    @cached_property
    def gamma(self) -> complex:
        g0 = cmath.sqrt(complex(self.gamma_sq))
        d = _sigma_tilde_grad0(self)
        if d == 0:
            return g0
        return g0 if abs(g0 * d - 1) <= abs(-g0 * d - 1) else -g0

    def with_gamma_sq(self, gamma_sq: complex) -> "SigmaContext":
        return replace(self, gamma_sq=complex(gamma_sq))


def sigma_log_jet(ctx: SigmaContext, u, order: int, with_gamma: bool = True):
    """``sigma(u + h) = exp(log_scale) * jet(h)``; returns (log_scale, jet, abs_scale).

    ``abs_scale`` is the absolute-value sum of the reduced theta series, the
    natural size against which a small value of the jet is judged.
    """
    u = _u(u)
    g = ctx.genus
    z = ctx.A @ u
    ls_theta, jet_theta, abs_scale = theta_log_jet(z, ctx.periods.tau, ctx.chi, order,
                                                   ctx.theta_cfg, ctx.A)
    K = ctx.kappa_sym
    Ku = K @ u
    quad = Jet.polynomial(g, order, 0.0, -Ku, -K).exp() if order > 0 else Jet.constant(g, 0, 1.0)
    log_scale = -0.5 * u @ Ku + ls_theta
    if with_gamma:
        log_scale = log_scale + cmath.log(ctx.gamma)
    return complex(log_scale), quad * jet_theta, abs_scale


def log_sigma(ctx: SigmaContext, u) -> complex:
    """Complex logarithm of sigma(u) (any branch); ``-inf`` when sigma vanishes exactly."""
    ls, jet, _ = sigma_log_jet(ctx, u, 0)
    v = jet.value
    if v == 0:
        return complex(-np.inf)
    return ls + cmath.log(v)


def sigma(ctx: SigmaContext, u) -> complex:
    ls, jet, _ = sigma_log_jet(ctx, u, 0)
    return complex(cmath.exp(ls) * jet.value)


def sigma_relative(ctx: SigmaContext, u) -> float:
    """|theta(reduced)| divided by the absolute series sum: 0 on the sigma divisor."""
    _, jet, abs_scale = sigma_log_jet(ctx, u, 0, with_gamma=False)
    return abs(jet.value) / abs_scale


def sigma_deriv(ctx: SigmaContext, u, alpha) -> complex:
    """Partial derivative ``d^alpha sigma(u)`` for ``|alpha| <= 4``."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != ctx.genus or sum(alpha) > 4 or min(alpha) < 0:
        raise ValueError(f"bad multi-index {alpha}")
    ls, jet, _ = sigma_log_jet(ctx, u, sum(alpha))
    return complex(cmath.exp(ls) * jet.deriv(alpha))


def _sigma_tilde_grad0(ctx: SigmaContext) -> complex:
    """``d sigma / d u_1`` at 0 for gamma = 1."""
    g = ctx.genus
    ls, jet, _ = sigma_log_jet(ctx, np.zeros(g), 1, with_gamma=False)
    e = [0] * g
    e[0] = 1
    return complex(cmath.exp(ls) * jet.deriv(tuple(e)))


def _key(indices) -> tuple[int, ...]:
    return tuple(sorted(int(i) for i in indices))


@dataclass(frozen=True)
class WpJet:
    """wp_{i j ...}(u) for index strings of length 2 to 4, symmetric by storage.

    ``wp(1, 2)`` is wp_12, ``wp(2, 2, 2, 1)`` is wp_2221.  ``series(i, j)`` is the
    Taylor jet of ``h -> wp_ij(u + h)`` up to order 2, used for derivatives of Q.
    """

    genus: int
    values: dict
    log_jet: Jet

    def wp(self, *indices) -> complex:
        return self.values[_key(indices)]

    def __getattr__(self, name):
        if name.startswith("wp") and name[2:].isdigit() and 2 <= len(name) - 2 <= 4:
            return self.values[_key(name[2:])]
        raise AttributeError(name)

    def series(self, i: int, j: int) -> Jet:
        g, K = self.genus, self.log_jet.order
        out = Jet(g, K - 2)
        for beta in multi_indices(g, K - 2):
            alpha = list(beta)
            alpha[i - 1] += 1
            alpha[j - 1] += 1
            d = -self.log_jet.deriv(tuple(alpha))
            out.c[beta] = d / factorial(beta)
        return out


def _index_tuples(g: int, order: int):
    return list(combinations_with_replacement(range(1, g + 1), order))


def wp_jet(ctx: SigmaContext, u, order: int = 4) -> WpJet:
    """wp derivatives up to total order ``order`` (<= 4, and >= 2) at u.

    Raises NearDivisor when the reduced theta value is below
    ``NEAR_DIVISOR_TOL`` times the absolute series sum.
    """
    g = ctx.genus
    ls, jet, abs_scale = sigma_log_jet(ctx, u, order, with_gamma=False)
    if abs(jet.value) < NEAR_DIVISOR_TOL * abs_scale:
        raise NearDivisor(f"|sigma| relative to series scale is {abs(jet.value) / abs_scale:.2e}")
    L = jet.log()
    values = {}
    for n in range(2, order + 1):
        for idx in _index_tuples(g, n):
            alpha = tuple(idx.count(k) for k in range(1, g + 1))
            values[idx] = complex(-L.deriv(alpha))
    return WpJet(g, values, L)


def wp_values(ctx: SigmaContext, u) -> WpJet:
    return wp_jet(ctx, u, order=2)


# --- the addition function Q --------------------------------------------------

def _q_from(wu11, wu12, wu22, wv11, wv12, wv22):
    return -(wu11 - wv11 + wu12 * wv22 - wv12 * wu22)


def q_fn(ctx: SigmaContext, u, v, ju: WpJet | None = None, jv: WpJet | None = None) -> complex:
    """Q(u, v) in genus 2, ``wp(v) - wp(u)`` in genus 1."""
    ju = ju or wp_jet(ctx, u, 2)
    jv = jv or wp_jet(ctx, v, 2)
    if ctx.genus == 1:
        return jv.wp(1, 1) - ju.wp(1, 1)
    return _q_from(ju.wp(1, 1), ju.wp(1, 2), ju.wp(2, 2), jv.wp(1, 1), jv.wp(1, 2), jv.wp(2, 2))


def q_jet(ctx: SigmaContext, u, v, ju: WpJet | None = None, jv: WpJet | None = None) -> Jet:
    """Taylor jet of ``h -> Q(u + h, v)`` to order 2."""
    ju = ju or wp_jet(ctx, u, 4)
    jv = jv or wp_jet(ctx, v, 2)
    if ju.log_jet.order < 4:
        raise ValueError("q_jet needs a fourth-order wp jet at u")
    if ctx.genus == 1:
        return -ju.series(1, 1) + jv.wp(1, 1)
    s11, s12, s22 = ju.series(1, 1), ju.series(1, 2), ju.series(2, 2)
    return -(s11 - jv.wp(1, 1) + s12 * jv.wp(2, 2) - s22 * jv.wp(1, 2))


def q_fn_deriv(ctx: SigmaContext, u, v, idx) -> complex:
    """Q_i (idx = i) or Q_ij (idx = (i, j)): partials in u with v held fixed."""
    idx = (idx,) if isinstance(idx, int) else tuple(idx)
    alpha = [0] * ctx.genus
    for i in idx:
        alpha[i - 1] += 1
    return q_jet(ctx, u, v).deriv(tuple(alpha))


def addition_residual(ctx: SigmaContext, u, v) -> float:
    """|sigma(u+v) sigma(u-v) / (sigma(u)^2 sigma(v)^2) / Q(u,v) - 1|."""
    u, v = _u(u), _u(v)
    lr = (log_sigma(ctx, u + v) + log_sigma(ctx, u - v)
          - 2 * log_sigma(ctx, u) - 2 * log_sigma(ctx, v))
    return abs(cmath.exp(lr) / q_fn(ctx, u, v) - 1)


def wp_addition_residual(ctx: SigmaContext, u, v) -> float:
    """Largest relative residual over ij of the wp_ij(u+v) + wp_ij(u-v) formula."""
    u, v = _u(u), _u(v)
    ju = wp_jet(ctx, u, 4)
    jv = wp_jet(ctx, v, 2)
    jp, jm = wp_jet(ctx, u + v, 2), wp_jet(ctx, u - v, 2)
    qj = q_jet(ctx, u, v, ju, jv)
    Q = qj.value
    g = ctx.genus
    worst = 0.0
    for i in range(1, g + 1):
        for j in range(i, g + 1):
            ei = [0] * g
            ei[i - 1] += 1
            ej = [0] * g
            ej[j - 1] += 1
            eij = [a + b for a, b in zip(ei, ej)]
            Qi, Qj, Qij = qj.deriv(tuple(ei)), qj.deriv(tuple(ej)), qj.deriv(tuple(eij))
            terms = [jp.wp(i, j), jm.wp(i, j), -2 * ju.wp(i, j), (Qij * Q - Qi * Qj) / Q ** 2]
            worst = max(worst, abs(sum(terms)) / max(abs(t) for t in terms))
    return worst


def calibrate_gamma(ctx: SigmaContext, probes) -> SigmaContext:
    """Fix gamma^2 from the addition formula at the given (u, v) pairs.

    Returns a new context.  Raises InconsistentGamma when the per-probe
    estimates disagree by more than ``GAMMA_SPREAD_TOL`` relative.
    """
    base = ctx.with_gamma_sq(1.0)
    est = []
    for u, v in probes:
        u, v = _u(u), _u(v)
        lr = (log_sigma(base, u + v) + log_sigma(base, u - v)
              - 2 * log_sigma(base, u) - 2 * log_sigma(base, v))
        est.append(cmath.exp(lr) / q_fn(base, u, v))
    est = np.asarray(est)
    if est.size == 0:
        raise ValueError("no probes")
    mean = est.mean()
    spread = float(np.max(np.abs(est - mean)) / abs(mean))
    if not spread < GAMMA_SPREAD_TOL:
        raise InconsistentGamma(f"gamma^2 estimates spread {spread:.2e}")
    return ctx.with_gamma_sq(complex(mean))


def auto_select_characteristic(curve: Curve, periods: PeriodData, probe_us) -> Characteristic:
    """Odd characteristic whose sigma vanishes on the embedded curve.

    ``probe_us`` are Abel images of curve points (second point at infinity).
    Ties are broken by the lexicographic order of characteristics.
    """
    best, best_val = None, np.inf
    for chi in odd_characteristics(curve.genus):
        ctx = SigmaContext(curve, periods, chi)
        val = max(sigma_relative(ctx, u) for u in probe_us)
        if val < best_val:
            best, best_val = chi, val
    if best is None or not best_val < DIVISOR_PROBE_TOL:
        raise NoVanishingCharacteristic(f"best divisor residual {best_val:.2e}")
    return best


# --- identity registry ---------------------------------------------------------
#
# Each identity is data: two lists of monomials "coef*f1*f2...", where a
# factor is ``pIJ..`` (a wp derivative), ``lK`` (the curve coefficient
# lambda_K, with l5 = 1 and anything above the degree equal to 0) or ``x``.
# Symbols that have no meaning in genus 2 (such as ``p13`` with a third
# index) evaluate to 0.  "literal" forms carry the alternative
# signs and coefficients that fail numerically and are only reported;
# "corrected" forms gate.

@dataclass(frozen=True)
class Identity:
    name: str
    equation: str
    form: str  # "literal" or "corrected"
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    @property
    def gating(self) -> bool:
        return self.form == "corrected"


def _parse_monomial(text: str):
    from fractions import Fraction
    text = text.replace(" ", "")
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:]
    elif text.startswith("+"):
        text = text[1:]
    parts = text.split("*")
    coef = Fraction(1)
    factors = []
    for p in parts:
        if p and (p[0].isdigit()):
            coef *= Fraction(p)
        else:
            factors.append(p)
    return sign * coef, tuple(factors)


def eval_monomials(terms, env) -> list[complex]:
    """Values of each monomial under ``env`` (symbol -> value; missing symbols are 0)."""
    out = []
    for t in terms:
        coef, factors = _parse_monomial(t)
        v = complex(float(coef))
        for f in factors:
            v *= env.get(f, 0.0)
        out.append(v)
    return out


def identity_residual(identity: Identity, env) -> float:
    """|sum(lhs) - sum(rhs)| relative to the largest single monomial."""
    left = eval_monomials(identity.lhs, env)
    right = eval_monomials(identity.rhs, env)
    scale = max([abs(v) for v in left + right] + [0.0])
    if scale == 0:
        return 0.0
    return abs(sum(left) - sum(right)) / scale


def wp_env(ctx: SigmaContext, jet: WpJet) -> dict:
    env = {f"l{k}": complex(c) for k, c in enumerate(ctx.curve.lambdas)}
    for idx, v in jet.values.items():
        env["p" + "".join(map(str, idx))] = v
    return env


def _ids(name, eq, literal, corrected=None):
    lit = Identity(name, eq, "literal", *literal)
    cor = Identity(name, eq, "corrected", *(corrected or literal))
    return [lit, cor]


IDENTITIES: tuple[Identity, ...] = tuple(
    _ids("H-1", "2-15",
         (("p2222", "-6*p22*p22"), ("2*l3*l5", "4*l4*p22", "4*l5*p12", "-12*l6*p11")))
    + _ids("H-2", "2-15",
           (("p1222", "-6*p22*p12"), ("4*l4*p12", "-2*l5*p11")))
    + _ids("H-3", "2-15",
           (("p1122", "-4*p12*p12", "-2*p22*p11"), ("4*l2*p13", "2*l3*p12")),
           (("p1122", "-4*p12*p12", "-2*p22*p11"), ("2*l3*p12",)))
    + _ids("H-4", "2-15",
           (("p1112", "-6*p12*p11"), ("-2*l0*l5", "-2*l1*p22", "4*l2*p12")),
           (("p1112", "-6*p12*p11"), ("-4*l0*l5", "-2*l1*p22", "4*l2*p12")))
    + _ids("H-5", "2-15",
           (("p1111", "-6*p11*p11"),
            ("-4*l0*l4", "2*l1*l3", "-12*l0*p22", "4*l1*p12", "4*l2*p11")),
           (("p1111", "-6*p11*p11"),
            ("-8*l0*l4", "2*l1*l3", "-12*l0*p22", "4*l1*p12", "4*l2*p11")))
    + _ids("I-0", "2-16",
           (("p112",), ("p222*p12", "p122*p22")),
           (("p112",), ("p222*p12", "-p122*p22")))
    + _ids("I-1", "2-16",
           (("p222*p222",),
            ("4*p22*p22*p22", "4*p12*p22", "4*l4*p22*p22", "4*p11", "4*l3*p22", "4*l2")))
    + _ids("I-2", "2-16",
           (("p222*p122",),
            ("4*p12*p22*p22", "-2*p11*p22", "2*p12*p12", "-2*l3*p12", "2*l1",
             "4*l3*p12", "4*l4*p12*p22")))
    + _ids("I-3", "2-16",
           (("p122*p122",),
            ("4*p11*p22*p22",
             "-4*p11*p22*p22", "4*p12*p12*p22", "-4*l3*p12*p22", "4*l1*p22",
             "-4*p11*p12", "4*l4*p11*p22", "4*l3*p12*p22",
             "-4*l4*p11*p22", "4*l4*p12*p12", "-4*l4*l3*p12", "4*l4*l1",
             "4*l4*l3*p12", "-4*l1*p22", "-4*l1*l4", "4*l0")),
           (("p122*p122",),
            ("4*p12*p12*p22", "-4*p11*p12", "4*l4*p12*p12", "4*l0")))
)


def identity_registry(ctx: SigmaContext, u, jet: WpJet | None = None):
    """Evaluate every registered differential identity at u.

    Returns (Identity, residual) pairs; the caller turns them into reports.
    """
    if ctx.genus != 2:
        raise ValueError("the differential identity registry is for genus 2")
    jet = jet or wp_jet(ctx, u, 4)
    env = wp_env(ctx, jet)
    env["l5"] = 1.0
    return [(ident, identity_residual(ident, env)) for ident in IDENTITIES]
