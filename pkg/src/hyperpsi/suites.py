"""Identity suites run by the ``verify`` command.

Each suite function takes a :class:`CurveCase` with its calibrated context and
returns :class:`ResidualReport` records.  Random inputs are drawn from a
generator seeded by (curve label, suite name), so a suite produces the same
records whether or not other suites run alongside it.
"""
from __future__ import annotations

import json
import logging
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from .abel import AbelPath, DivisorPair, abel, embed, lattice_basis, reduce_lattice
from .curve import Curve, CurvePoint, random_curve, random_point
from .errors import HyperPsiError
from .kleinian import (SigmaContext, addition_residual, calibrate_gamma, identity_registry,
                       log_sigma, q_fn, q_jet, sigma, sigma_deriv, sigma_relative,
                       wp_addition_residual, wp_jet)
from .oracles import fd_derivative, j_from_cubic, j_from_tau, reduce_tau, tau_agm_real
from .periods import PeriodData, check_period_sanity, compute_periods
from .pipeline import build_context, random_jacobian_point
from .psi import (assembly_residual, closed_residual, xi3_scale, assembly_residual_literal, elliptic_addition_residuals,
                  elliptic_recursion_residual, limit_probes, painleve_fit, phi_residual,
                  psi_addition_residual, psi_sequence_elliptic, psi_sequence_g2,
                  psi_sequence_jacobian, q_expansions, q_limits_literal, recursion_residual_g2,
                  xi3_closed_literal, xi3_jacobian, xi_bundle, _rel)
from .report import ResidualReport
from .theta import half_characteristics, theta, theta_deriv, theta_direct

log = logging.getLogger("hyperpsi")

SUITES = ("periods", "theta", "kleinian", "inversion", "elliptic", "recursion-g2",
          "painleve", "diagnostics")

TOL = {
    "tau_symmetry": 1e-9, "legendre": 1e-8, "tau_agm": 1e-8, "j_invariant": 1e-8,
    "theta_parity": 1e-12, "theta_quasi": 1e-10, "theta_direct": 1e-10,
    "fd_low": 1e-7, "fd_high": 1e-5,
    "sigma_odd": 1e-10, "sigma_fd": 1e-8, "sigma_mu_even": 1e-9, "wp_even": 1e-9,
    "wp_fd": 1e-6, "q_fd": 1e-7, "on_curve": 1e-7, "gamma_xval": 1e-7,
    "addition": 1e-8, "wp_addition": 1e-6, "identity": 1e-6, "wp_period": 1e-9,
    "inversion": 1e-8, "abel_symmetry": 1e-10, "path": 1e-8, "involution": 1e-8,
    "elliptic": 1e-9, "theorem": 1e-6, "theorem_trivial": 1e-8, "gamma_invariance": 1e-10,
    "psi2": 1e-7, "psi01": 1e-8, "psi_path": 1e-7, "xi3_J": 1e-6, "psi_addition": 1e-7,
    "xi": 1e-6, "limit": 1e-3, "monotone": 1.0, "painleve": 1e-6, "painleve_xval": 1e-7,
    "phi": 1e-6, "phi_parity": 1e-9,
}

N_LIMIT_M = 3
N_XI3_J_MAX = 4
GAMMA_SCALE = 5.0
PATH_VARIANTS = (AbelPath(angle_offset=0.9), AbelPath(angle_offset=-1.3),
                 AbelPath(angle_offset=2.2), AbelPath(waypoints=(0.5j,)),
                 AbelPath(waypoints=(-0.7 - 0.4j,), detour_sign=-1))
MAX_DRAWS = 25


@dataclass
class CurveCase:
    label: str
    curve: Curve
    ctx: SigmaContext | None = None


@dataclass
class RunOptions:
    max_m: int = 8
    points_per_curve: int = 3
    timings: bool = False


class Recorder:
    """Collects records, stamping wall time only when timings are requested."""

    def __init__(self, suite: str, timings: bool):
        self.suite = suite
        self.timings = timings
        self.records: list[ResidualReport] = []
        self._t0 = time.perf_counter()

    def _ms(self) -> float:
        if not self.timings:
            return 0.0
        now = time.perf_counter()
        ms, self._t0 = 1e3 * (now - self._t0), now
        return ms

    def gate(self, identity, equation, inputs, residual, tol):
        self.records.append(ResidualReport.gate(self.suite, identity, equation, inputs,
                                                residual, tol, self._ms()))

    def diag(self, identity, equation, inputs, residual, tol):
        self.records.append(ResidualReport.diagnostic(self.suite, identity, equation, inputs,
                                                      residual, tol, self._ms()))

    def error(self, identity, equation, inputs, exc: Exception):
        r = ResidualReport.gate(self.suite, identity, equation, inputs, float("inf"), 0.0,
                                self._ms())
        r.note = f"{type(exc).__name__}: {exc}"
        self.records.append(r)


def suite_rng(label: str, suite: str) -> np.random.Generator:
    return np.random.default_rng(zlib.crc32(f"{label}|{suite}".encode()))


def _draw(rng, make, check=None):
    """Draw until ``check(value)`` succeeds without a numerical error."""
    last = None
    for _ in range(MAX_DRAWS):
        v = make(rng)
        try:
            return v if check is None else check(v)
        except HyperPsiError as exc:
            last = exc
    raise last


def _lattice_residual(ctx: SigmaContext, d) -> float:
    red, _ = reduce_lattice(ctx.periods, d)
    return float(np.max(np.abs(red.u)) / np.max(np.abs(lattice_basis(ctx.periods))))


# --- periods -------------------------------------------------------------------------

GENUS1_REFERENCE = Curve(1, (0, -1, 0, 1))


def suite_periods(cases, opts: RunOptions, rec: Recorder) -> None:
    for case in cases:
        if case.curve.genus == 2:
            for r in check_period_sanity(case.ctx.periods):
                rec.gate(r.identity, r.equation, {"curve": case.label}, r.residual, r.tolerance)
        else:
            t = case.ctx.periods.tau[0, 0]
            j = j_from_tau(reduce_tau(t))
            rec.gate("j_invariant_vs_q_series", "Eq. 1-2", {"curve": case.label},
                     _rel(j, j_from_cubic(*case.curve.lambdas[:3])), TOL["j_invariant"])
    t = compute_periods(GENUS1_REFERENCE).tau[0, 0]
    rec.gate("tau_vs_agm", "Eq. 2-6", {"curve": "y^2=x^3-x"},
             abs(reduce_tau(t) - tau_agm_real(GENUS1_REFERENCE.branch.finite_branch_points)),
             TOL["tau_agm"])


# --- theta ---------------------------------------------------------------------------

LOW_ORDER = ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
HIGH_ORDER = ((3, 0), (2, 1), (1, 2), (0, 3), (2, 2), (0, 4))


def suite_theta(cases, opts: RunOptions, rec: Recorder) -> None:
    for case in (c for c in cases if c.curve.genus == 2):
        rng = suite_rng(case.label, "theta")
        tau = case.ctx.periods.tau
        chars = half_characteristics(2)
        for k in range(opts.points_per_curve):
            z = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.5, 0.5, 2)
            inp = {"curve": case.label, "point": k}
            par = 0.0
            for chi in chars:
                a, b = theta(-z, tau, chi), theta(z, tau, chi)
                par = max(par, _rel(a, (-1) ** chi.parity * b))
            rec.gate("theta_parity", "Eq. 2-11", inp, par, TOL["theta_parity"])
            chi = case.ctx.chi
            e = rng.integers(-2, 3, 2)
            lhs = theta(z + tau @ e, tau, chi)
            phase = np.exp(-2j * np.pi * (0.5 * e @ tau @ e + e @ (z + chi.b)))
            rec.gate("theta_quasi_periodicity", "Eq. 2-11", inp,
                     _rel(lhs, phase * theta(z, tau, chi)), TOL["theta_quasi"])
            zs = z + tau @ e + rng.integers(-2, 3, 2)
            rec.gate("theta_reduced_vs_direct", "Eq. 2-11", inp,
                     _rel(theta(zs, tau, chi), theta_direct(zs, tau, chi)), TOL["theta_direct"])

            def f(w):
                return theta(w, tau, chi)
            low = max(_rel(theta_deriv(z, tau, chi, al), fd_derivative(f, z, al, 1e-3, 1))
                      for al in LOW_ORDER)
            rec.gate("theta_derivatives_vs_fd_order_le_2", "Eq. 2-11", inp, low, TOL["fd_low"])
            high = max(_rel(theta_deriv(z, tau, chi, al), fd_derivative(f, z, al, 5e-2, 2))
                       for al in HIGH_ORDER)
            rec.gate("theta_derivatives_vs_fd_order_3_4", "Eq. 2-11", inp, high, TOL["fd_high"])


# --- kleinian ------------------------------------------------------------------------

def suite_kleinian(cases, opts: RunOptions, rec: Recorder) -> None:
    for case in (c for c in cases if c.curve.genus == 2):
        ctx = case.ctx
        rng = suite_rng(case.label, "kleinian")
        rec.gate("kappa_symmetric", "Eq. 2-12", {"curve": case.label},
                 float(np.max(np.abs(ctx.kappa - ctx.kappa.T)) / np.max(np.abs(ctx.kappa))),
                 TOL["tau_symmetry"])
        probes = [(random_jacobian_point(ctx.curve, ctx.periods, rng),
                   random_jacobian_point(ctx.curve, ctx.periods, rng)) for _ in range(4)]
        try:
            other = calibrate_gamma(ctx, probes)
            rec.gate("gamma_sq_cross_validation", "Eq. 2-17", {"curve": case.label},
                     _rel(other.gamma_sq, ctx.gamma_sq), TOL["gamma_xval"])
        except HyperPsiError as exc:
            rec.error("gamma_sq_cross_validation", "Eq. 2-17", {"curve": case.label}, exc)
        for k in range(opts.points_per_curve):
            inp = {"curve": case.label, "point": k}
            p = random_point(ctx.curve, rng)
            rec.gate("sigma_vanishes_on_curve", "Eq. 2-12", inp,
                     sigma_relative(ctx, embed(ctx.curve, ctx.periods, p).u), TOL["on_curve"])
            try:
                u = _draw(rng, lambda r: random_jacobian_point(ctx.curve, ctx.periods, r),
                          lambda w: (wp_jet(ctx, w, 4), w)[1])
                v = _draw(rng, lambda r: random_jacobian_point(ctx.curve, ctx.periods, r),
                          lambda w: (wp_jet(ctx, w, 4), w)[1])
            except HyperPsiError as exc:
                rec.error("point_draw", "-", inp, exc)
                continue
            self_check_sigma(ctx, u, inp, rec)
            rec.gate("addition_formula", "Eq. 2-17", inp, addition_residual(ctx, u, v),
                     TOL["addition"])
            rec.gate("wp_addition_formula", "Eq. 2-19", inp, wp_addition_residual(ctx, u, v),
                     TOL["wp_addition"])
            for ident, res in identity_registry(ctx, u):
                if ident.gating:
                    rec.gate(ident.name, ident.equation, inp, res, TOL["identity"])
                else:
                    rec.diag(ident.name, ident.equation, inp, res, TOL["identity"])


def self_check_sigma(ctx: SigmaContext, u, inp, rec: Recorder) -> None:
    rec.gate("sigma_odd", "Eq. 2-12", inp, _rel(sigma(ctx, -u), -sigma(ctx, u)), TOL["sigma_odd"])
    s2 = sigma_deriv(ctx, u, (0, 1))
    rec.gate("sigma_2_vs_fd", "Eq. 2-12", inp,
             _rel(s2, fd_derivative(lambda w: sigma(ctx, w), u, (0, 1), 1e-3, 1)), TOL["sigma_fd"])
    even = max(_rel(sigma_deriv(ctx, -u, al), sigma_deriv(ctx, u, al)) for al in ((1, 0), (0, 1)))
    rec.gate("sigma_mu_even", "Eq. 2-12", inp, even, TOL["sigma_mu_even"])
    jp, jm = wp_jet(ctx, u, 4), wp_jet(ctx, -u, 2)
    rec.gate("wp_even", "Eq. 2-14", inp,
             max(_rel(jp.wp(i, j), jm.wp(i, j)) for i, j in ((1, 1), (1, 2), (2, 2))),
             TOL["wp_even"])
    fd = fd_derivative(lambda w: wp_jet(ctx, w, 2).wp(2, 2), u, (0, 1), 1e-3, 1)
    rec.gate("wp222_vs_fd", "Eq. 2-14", inp, _rel(jp.wp(2, 2, 2), fd), TOL["wp_fd"])
    L = lattice_basis(ctx.periods)
    per = max(_rel(wp_jet(ctx, u + L[:, c], 2).wp(i, j), jp.wp(i, j))
              for c in range(L.shape[1]) for i, j in ((1, 1), (1, 2), (2, 2)))
    rec.gate("wp_periodic", "Eq. 2-14", inp, per, TOL["wp_period"])
    v = u[::-1] * 0.7 + 0.1
    qj = q_jet(ctx, u, v)
    qfd = max(_rel(qj.deriv(al), fd_derivative(lambda w: q_fn(ctx, w, v), u, al, 1e-3, 1))
              for al in ((1, 0), (0, 1)))
    rec.gate("Q_derivatives_vs_fd", "Eq. 2-18", inp, qfd, TOL["q_fd"])


# --- inversion -------------------------------------------------------------------------

def suite_inversion(cases, opts: RunOptions, rec: Recorder) -> None:
    for case in (c for c in cases if c.curve.genus == 2):
        ctx = case.ctx
        curve = ctx.curve
        rng = suite_rng(case.label, "inversion")
        for k in range(opts.points_per_curve):
            inp = {"curve": case.label, "point": k}

            def make(r):
                return DivisorPair(random_point(curve, r), random_point(curve, r))

            def check(d):
                u = abel(curve, ctx.periods, d).u
                return d, u, wp_jet(ctx, u, 2)
            try:
                d, u, J = _draw(rng, make, check)
            except HyperPsiError as exc:
                rec.error("jacobi_inversion", "Eq. 2-20", inp, exc)
                continue
            x1, x2 = d.p1.x, d.p2.x
            rec.gate("wp22_equals_x1_plus_x2", "Eq. 2-20", inp, _rel(J.wp(2, 2), x1 + x2),
                     TOL["inversion"])
            rec.gate("wp12_equals_minus_x1_x2", "Eq. 2-20", inp, _rel(J.wp(1, 2), -x1 * x2),
                     TOL["inversion"])
            rec.diag("wp12_equals_x1_x2_literal", "Eq. 2-20", inp, _rel(J.wp(1, 2), x1 * x2),
                     TOL["inversion"])
            swapped = abel(curve, ctx.periods, DivisorPair(d.p2, d.p1)).u
            rec.gate("abel_symmetric", "Eq. 2-7", inp,
                     float(np.max(np.abs(swapped - u)) / np.max(np.abs(u))), TOL["abel_symmetry"])
            worst = 0.0
            for path in PATH_VARIANTS:
                alt = abel(curve, ctx.periods, d, path, path).u
                worst = max(worst, _lattice_residual(ctx, alt - u))
            rec.gate("abel_path_independent_mod_lattice", "Eq. 2-8", inp, worst, TOL["path"])
            e1 = embed(curve, ctx.periods, d.p1).u
            e1i = embed(curve, ctx.periods, d.p1.involution()).u
            rec.gate("embedding_odd_under_involution", "Eq. 2-7", inp,
                     _lattice_residual(ctx, e1 + e1i), TOL["involution"])


# --- elliptic and painleve --------------------------------------------------------------

ELLIPTIC_M = 10


def _elliptic_points(case: CurveCase, suite: str, count: int):
    ctx = case.ctx
    rng = suite_rng(case.label, suite)
    out = []
    for _ in range(count):
        out.append(_draw(rng, lambda r: random_jacobian_point(ctx.curve, ctx.periods, r),
                         lambda u: (psi_sequence_elliptic(ctx, u, 2 * ELLIPTIC_M + 2), u)))
    return out


def suite_elliptic(cases, opts: RunOptions, rec: Recorder) -> None:
    for case in (c for c in cases if c.curve.genus == 1):
        ctx = case.ctx
        try:
            pts = _elliptic_points(case, "elliptic", max(opts.points_per_curve, 1))
        except HyperPsiError as exc:
            rec.error("elliptic_recursion", "Eq. 1-3", {"curve": case.label}, exc)
            continue
        for k, (seq, u) in enumerate(pts):
            for m in range(2, ELLIPTIC_M + 1):
                for n in range(1, m):
                    rec.gate("elliptic_recursion", "Eq. 1-3",
                             {"curve": case.label, "point": k, "m": m, "n": n},
                             elliptic_recursion_residual(seq, m, n), TOL["elliptic"])
            for m, n in ((3, 2), (5, 3), (7, 4)):
                r4, r5 = elliptic_addition_residuals(ctx, seq, m, n)
                inp = {"curve": case.label, "point": k, "m": m, "n": n}
                rec.gate("wp_difference_from_psi", "Eq. 1-4", inp, r4, TOL["elliptic"])
                rec.gate("wp_difference_two_multiples", "Eq. 1-5", inp, r5, TOL["elliptic"])


PAINLEVE_FIT = (2, 3)
PAINLEVE_XVAL = (5, 6)
PAINLEVE_UPTO = 10


def suite_painleve(cases, opts: RunOptions, rec: Recorder) -> None:
    for case in (c for c in cases if c.curve.genus == 1):
        try:
            pts = _elliptic_points(case, "painleve", max(opts.points_per_curve, 1))
        except HyperPsiError as exc:
            rec.error("dpi_residual", "Eq. 1-9", {"curve": case.label}, exc)
            continue
        for k, (seq, _) in enumerate(pts):
            inp = {"curve": case.label, "point": k}
            try:
                fit = painleve_fit(seq, PAINLEVE_FIT, PAINLEVE_UPTO)
                alt = painleve_fit(seq, PAINLEVE_XVAL, PAINLEVE_UPTO)
            except HyperPsiError as exc:
                rec.error("dpi_fit", "Eq. 1-9", inp, exc)
                continue
            for n, r in fit.residuals.items():
                rec.gate("dpi_residual", "Eq. 1-9", {**inp, "n": n}, r, TOL["painleve"])
            rec.gate("dpi_fit_cross_validation", "Eq. 1-9", inp,
                     max(_rel(fit.z, alt.z), _rel(fit.a, alt.a)), TOL["painleve_xval"])


# --- genus-2 recursion --------------------------------------------------------------------

def _curve_point_with_sequence(ctx, rng, N):
    def check(p):
        return p, psi_sequence_g2(ctx, p, N)
    return _draw(rng, lambda r: random_point(ctx.curve, r), check)


def suite_recursion_g2(cases, opts: RunOptions, rec: Recorder) -> None:
    M = opts.max_m
    for case in (c for c in cases if c.curve.genus == 2):
        ctx = case.ctx
        rng = suite_rng(case.label, "recursion-g2")
        ctx5 = ctx.with_gamma_sq(GAMMA_SCALE * ctx.gamma_sq)
        for k in range(opts.points_per_curve):
            base = {"curve": case.label, "point": k}
            try:
                p, seq = _curve_point_with_sequence(ctx, rng, max(2 * M, M + 2))
                u = embed(ctx.curve, ctx.periods, p).u
                seq5 = psi_sequence_g2(ctx5, p, seq.N, u=u)
            except HyperPsiError as exc:
                rec.error("psi_sequence", "Eq. 3-1", base, exc)
                continue
            _theorem_records(seq, seq5, M, base, rec)
            rec.gate("psi2_equals_2y", "Eq. 3-9", base, _rel(seq.value(2), 2 * p.y), TOL["psi2"])
            rec.gate("psi1_vanishes", "Eq. 3-1", base, seq.defect[1], TOL["psi01"])
            rec.gate("psi0_vanishes", "Eq. 3-1", base, sigma_relative(ctx, 0 * u), TOL["psi01"])
            _path_records(ctx, p, seq, M, base, rec)
            _jacobian_records(ctx, rng, base, rec)
            _xi_records(ctx, seq, u, M, base, rec)
            _limit_records(ctx, p, base, rec)


def _theorem_records(seq, seq5, M, base, rec):
    drift = 0.0
    for m in range(M + 1):
        for n in range(m + 1):
            r = recursion_residual_g2(seq, m, n)
            drift = max(drift, abs(r - recursion_residual_g2(seq5, m, n)))
            tol = TOL["theorem_trivial"] if n <= 1 else TOL["theorem"]
            rec.gate("determinant_recursion", "Eq. 3-26", {**base, "m": m, "n": n}, r, tol)
    rec.gate("recursion_gamma_invariance", "Eq. 3-26", base, drift, TOL["gamma_invariance"])


def _path_records(ctx, p, seq, M, base, rec):
    worst = 0.0
    for path in PATH_VARIANTS[:2]:
        alt = psi_sequence_g2(ctx, p, M, u=embed(ctx.curve, ctx.periods, p, path).u)
        worst = max(worst, max(_rel(alt.value(n), seq.value(n)) for n in range(2, M + 1)))
    rec.gate("psi_path_independent", "Eq. 3-1", base, worst, TOL["psi_path"])


def _jacobian_records(ctx, rng, base, rec):
    try:
        uj = _draw(rng, lambda r: random_jacobian_point(ctx.curve, ctx.periods, r),
                   lambda w: (psi_sequence_jacobian(ctx, w, N_XI3_J_MAX + 2), w)[1])
    except HyperPsiError as exc:
        rec.error("Xi3_two_routes", "Eq. 3-5", base, exc)
        return
    for m in range(1, N_XI3_J_MAX + 1):
        by_def, closed, literal = xi3_jacobian(ctx, uj, m)
        inp = {**base, "m": m}
        rec.gate("Xi3_two_routes", "Eq. 3-4/3-5", inp, _rel(by_def, closed), TOL["xi3_J"])
        rec.diag("Xi3_two_routes_literal", "Eq. 3-5", inp, _rel(by_def, literal), TOL["xi3_J"])
    for m, n in ((2, 1), (3, 1), (4, 2)):
        rec.gate("Psi_addition_formula", "Eq. 3-3", {**base, "m": m, "n": n},
                 psi_addition_residual(ctx, uj, m, n), TOL["psi_addition"])


def _xi_records(ctx, seq, u, M, base, rec):
    x = seq.base.x
    seen_m = set()
    for m in range(3, M + 1):
        for n in range(2, m):
            inp = {**base, "m": m, "n": n}
            try:
                b = xi_bundle(ctx, seq, u, m, n)
            except HyperPsiError as exc:
                rec.error("xi_bundle", "Eq. 3-18", inp, exc)
                continue
            t = TOL["xi"]
            rec.gate("xi_assembly", "Eq. 3-18", inp, assembly_residual(b), t)
            rec.diag("xi_assembly_xi2_mu_nu", "Eq. 3-18", inp, assembly_residual_literal(b), t)
            rec.gate("xi0_closed_form", "Eq. 3-19", inp, closed_residual(b.xi0, b.xi0_closed, b.xi0_scale), t)
            rec.diag("xi0_closed_form_literal", "Eq. 3-19", inp,
                     closed_residual(b.xi0, b.xi0_closed_literal, b.xi0_scale), t)
            rec.gate("xi2_closed_form", "Eq. 3-21", inp, closed_residual(b.xi2, b.xi2_closed, b.xi2_scale), t)
            rec.gate("xi2_via_q", "Eq. 3-22", inp, closed_residual(b.xi2, b.xi2_via_q, b.xi2_via_q_scale), t)
            rec.diag("xi2_closed_form_literal", "Eq. 3-21", inp,
                     closed_residual(b.xi2, b.xi2_closed_literal, b.xi2_scale), t)
            if m in seen_m:
                continue
            seen_m.add(m)
            mi = {**base, "m": m}
            rec.gate("xi1_closed_form", "Eq. 3-20", mi, closed_residual(b.xi1_m, b.xi1_m_closed, b.xi1_scale), t)
            rec.diag("xi1_closed_form_literal", "Eq. 3-20", mi,
                     closed_residual(b.xi1_m, b.xi1_m_closed_literal, b.xi1_scale), t)
            rec.gate("xi3_two_routes", "Eq. 3-16", mi, closed_residual(b.xi3_m, b.xi3_m_closed, xi3_scale(b.q_m, x)), t)
            lit = xi3_closed_literal(q_limits_literal(ctx, x, m * u), x)
            rec.diag("xi3_two_routes_literal", "Eq. 3-16", mi, closed_residual(b.xi3_m, lit, xi3_scale(b.q_m, x)), t)
            qe = q_expansions(ctx, x, m * u)
            for name in ("q12", "q22"):
                rec.gate(f"{name}_expansion", "Eq. 3-23", mi,
                         _rel(qe[name], qe[f"{name}_corrected"]), t)
                rec.diag(f"{name}_expansion_literal", "Eq. 3-23", mi,
                         _rel(qe[name], qe[f"{name}_literal"]), t)
            if m == 3:
                rec.gate("wp12_at_2u", "Eq. 3-8", base, _rel(b.wp12_2u, -x * x), t)
                rec.gate("wp22_at_2u", "Eq. 3-8", base, _rel(b.wp22_2u, 2 * x), t)


LIMIT_EQUATIONS = {
    "Psi1^2 wp11": "Eq. 3-10", "Psi1^2 wp12": "Eq. 3-10", "Psi1^2 wp22": "Eq. 3-10",
    "-sigma1/sigma2": "Eq. 3-11", "sigma1/sigma2": "Eq. 3-11",
    "q": "Eq. 3-15", "q1": "Eq. 3-15", "q2": "Eq. 3-15",
    "q11": "Eq. 3-15", "q12": "Eq. 3-15", "q22": "Eq. 3-15",
    "Psi1^6 Q11^2": "Eq. 3-17", "Psi1^6 Q Q11": "Eq. 3-17",
}
LIMIT_LITERAL = {"sigma1/sigma2"}


def _limit_records(ctx, p, base, rec):
    inp = {**base, "m": N_LIMIT_M}
    try:
        probes = limit_probes(ctx, p, N_LIMIT_M)
    except HyperPsiError as exc:
        rec.error("limit_probe", "Eq. 3-14", inp, exc)
        return
    for pr in probes:
        eq = LIMIT_EQUATIONS[pr.name]
        e = pr.errors
        ratio = max(b / a if a > 0 else np.inf for a, b in zip(e[:-1], e[1:]))
        emit = rec.diag if pr.name in LIMIT_LITERAL else rec.gate
        label = pr.name.replace(" ", "_")
        if pr.name == "sigma1/sigma2":
            label += "_to_x_literal"
        emit(f"limit_{label}_monotone", eq, inp, ratio, TOL["monotone"])
        emit(f"limit_{label}_final", eq, inp, pr.final_error, TOL["limit"])


# --- diagnostics ---------------------------------------------------------------------------

def suite_diagnostics(cases, opts: RunOptions, rec: Recorder) -> None:
    for case in (c for c in cases if c.curve.genus == 2):
        ctx = case.ctx
        rng = suite_rng(case.label, "diagnostics")
        for k in range(opts.points_per_curve):
            base = {"curve": case.label, "point": k}
            try:
                uj = _draw(rng, lambda r: random_jacobian_point(ctx.curve, ctx.periods, r),
                           lambda w: (psi_sequence_jacobian(ctx, w, 6, "Phi_on_J"), w)[1])
            except HyperPsiError as exc:
                rec.error("phi_recursion", "Eq. 1-12", base, exc)
                continue
            seq = psi_sequence_jacobian(ctx, uj, 6, "Phi_on_J")
            neg = psi_sequence_jacobian(ctx, -uj, 6, "Phi_on_J")
            for m, n in ((2, 1), (3, 1), (3, 2), (4, 2)):
                rec.diag("phi_recursion", "Eq. 1-12", {**base, "m": m, "n": n},
                         phi_residual(seq, m, n), TOL["phi"])
            par = max(min(abs(neg.value(n) / seq.value(n) - s) for s in (1, -1))
                      for n in range(1, 7))
            rec.diag("phi_parity", "Eq. 1-12", base, par, TOL["phi_parity"])


SUITE_FUNCS = {
    "periods": suite_periods, "theta": suite_theta, "kleinian": suite_kleinian,
    "inversion": suite_inversion, "elliptic": suite_elliptic,
    "recursion-g2": suite_recursion_g2, "painleve": suite_painleve,
    "diagnostics": suite_diagnostics,
}
