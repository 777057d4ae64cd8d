"""Riemann theta function with half-integer characteristics.

    theta[a; b](z) = sum_n exp 2 pi i ( (n+a)^T tau (n+a) / 2 + (n+a)^T (z+b) )

The lattice sum is truncated to a ball ``|n + a + c| <= R`` around the peak of
the Gaussian envelope; ``R`` comes from the smallest eigenvalue of ``Im tau``.
Derivatives are taken term by term.  Large arguments are first reduced by
quasi-periodicity, see :func:`reduce_argument`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import RadiusCap
from .jets import Jet, multi_indices


@dataclass(frozen=True)
class Characteristic:
    """Characteristic ``[a; b]`` stored as doubled integers (a = a2 / 2)."""

    a2: tuple[int, ...]
    b2: tuple[int, ...]

    @property
    def a(self) -> np.ndarray:
        return np.asarray(self.a2, dtype=float) / 2

    @property
    def b(self) -> np.ndarray:
        return np.asarray(self.b2, dtype=float) / 2

    @property
    def parity(self) -> int:
        """``4 a^T b mod 2``: 1 for odd, 0 for even."""
        return int(np.dot(self.a2, self.b2)) % 2

    @property
    def is_odd(self) -> bool:
        return self.parity == 1

    def __str__(self):
        return f"[{','.join(str(x / 2) for x in self.a2)};{','.join(str(x / 2) for x in self.b2)}]"

    @classmethod
    def parse(cls, text: str) -> "Characteristic":
        a, b = text.strip("[]").split(";")
        return cls(tuple(int(round(2 * float(x))) for x in a.split(",")),
                   tuple(int(round(2 * float(x))) for x in b.split(",")))


def half_characteristics(g: int) -> list[Characteristic]:
    """All 4**g characteristics with entries in {0, 1/2}, lexicographic."""
    out = []
    for a in itertools.product((0, 1), repeat=g):
        for b in itertools.product((0, 1), repeat=g):
            out.append(Characteristic(a, b))
    return out


def odd_characteristics(g: int) -> list[Characteristic]:
    return [c for c in half_characteristics(g) if c.is_odd]


@dataclass(frozen=True)
class ThetaConfig:
    eps: float = 1e-13
    radius_cap: int = 64

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")


@dataclass(frozen=True)
class Reduction:
    """``z = z_reduced + m + tau @ mp`` with integer m, mp."""

    z_reduced: np.ndarray
    m: np.ndarray
    mp: np.ndarray
    log_prefactor: complex

    def char_phase_log(self, chi: Characteristic) -> complex:
        return 2j * np.pi * (chi.a @ self.m - chi.b @ self.mp)


def reduce_argument(z, tau) -> Reduction:
    """Shift z into the fundamental cell ``Im z = Im(tau) k`` with k in [-1/2, 1/2)^g.

    ``theta[chi](z) = exp(log_prefactor + char_phase_log(chi)) * theta[chi](z_reduced)``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    tau = np.atleast_2d(np.asarray(tau, dtype=complex))
    Y = tau.imag
    k = np.linalg.solve(Y, z.imag)
    mp = np.floor(k + 0.5).astype(int)
    z1 = z - tau @ mp
    m = np.floor(z1.real + 0.5).astype(int)
    zr = z1 - m
    pre = 2j * np.pi * (-0.5 * mp @ tau @ mp - mp @ zr)
    return Reduction(zr, m, mp, complex(pre))


def _radius(tau: np.ndarray, cfg: ThetaConfig, order: int, scale: float) -> float:
    Y = tau.imag
    ev = np.linalg.eigvalsh(0.5 * (Y + Y.T))
    lam_min, lam_max = float(ev[0]), float(ev[-1])
    if lam_min <= 0:
        raise ValueError("Im tau is not positive definite")
    g = tau.shape[0]
    r = 1.0
    while True:
        bound = (math.exp(-math.pi * lam_min * r * r + 0.5 * math.pi * lam_max)
                 * (1 + 2 * math.pi * (r + 1) * scale) ** order * (2 * r + 3) ** g)
        if bound < cfg.eps:
            break
        r += 0.25
        if r > cfg.radius_cap:
            raise RadiusCap(f"theta truncation radius exceeds cap {cfg.radius_cap}")
    return r


def _lattice(tau, chi, zr, R):
    g = tau.shape[0]
    c = np.linalg.solve(tau.imag, zr.imag)
    centre = -chi.a - c
    lo = np.floor(centre - R).astype(int)
    hi = np.ceil(centre + R).astype(int)
    axes = [np.arange(lo[i], hi[i] + 1) for i in range(g)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, g)
    v = grid + chi.a
    keep = np.linalg.norm(v + c, axis=1) <= R
    return v[keep]


def _terms(zr, tau, chi, cfg, order, M):
    scale = float(np.linalg.norm(M, 2)) if M is not None else 1.0
    R = _radius(tau, cfg, order, scale)
    v = _lattice(tau, chi, zr, R)
    expo = 2j * np.pi * (0.5 * np.einsum("ni,ij,nj->n", v, tau, v) + v @ (zr + chi.b))
    return v, np.exp(expo)


def theta_reduced_jet(zr, tau, chi: Characteristic, order: int,
                      cfg: ThetaConfig = ThetaConfig(), M=None) -> tuple[Jet, float]:
    """Taylor jet of ``w -> theta(zr + M (w - w0))`` at ``w0`` with no reduction.

    Returns the jet and the sum of absolute values of the series terms, a
    natural scale for judging cancellation.
    """
    tau = np.atleast_2d(np.asarray(tau, dtype=complex))
    g = tau.shape[0]
    Mm = np.eye(g) if M is None else np.atleast_2d(np.asarray(M, dtype=complex))
    v, t = _terms(np.atleast_1d(np.asarray(zr, dtype=complex)), tau, chi, cfg, order, Mm)
    F = 2j * np.pi * (v @ Mm)
    derivs = {}
    for alpha in multi_indices(g, order):
        w = t
        for i, ai in enumerate(alpha):
            if ai:
                w = w * F[:, i] ** ai
        derivs[alpha] = np.sum(w)
    return Jet.from_derivatives(g, order, derivs), float(np.sum(np.abs(t)))


def theta_log_jet(z, tau, chi: Characteristic, order: int,
                  cfg: ThetaConfig = ThetaConfig(), M=None) -> tuple[complex, Jet, float]:
    """Reduced evaluation: theta(z + M h) = exp(log_scale + L(h)) * jet(h).

    Returns ``(log_scale, jet, abs_scale)`` where the jet already carries the
    affine exponent coming from the quasi-periodic shift.
    """
    tau = np.atleast_2d(np.asarray(tau, dtype=complex))
    g = tau.shape[0]
    red = reduce_argument(z, tau)
    Mm = np.eye(g) if M is None else np.atleast_2d(np.asarray(M, dtype=complex))
    jet, abs_scale = theta_reduced_jet(red.z_reduced, tau, chi, order, cfg, Mm)
    log_scale = red.log_prefactor + red.char_phase_log(chi)
    if np.any(red.mp):
        lin = -2j * np.pi * (red.mp @ Mm)
        jet = Jet.polynomial(g, order, 0.0, lin).exp() * jet
    return complex(log_scale), jet, abs_scale


def theta(z, tau, chi: Characteristic, cfg: ThetaConfig = ThetaConfig()) -> complex:
    log_scale, jet, _ = theta_log_jet(z, tau, chi, 0, cfg)
    return complex(np.exp(log_scale) * jet.value)


def theta_direct(z, tau, chi: Characteristic, cfg: ThetaConfig = ThetaConfig()) -> complex:
    """Unreduced lattice sum, centred on the Gaussian peak for ``z`` itself."""
    tau = np.atleast_2d(np.asarray(tau, dtype=complex))
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _, t = _terms(z, tau, chi, cfg, 0, np.eye(tau.shape[0]))
    return complex(np.sum(t))


def theta_deriv(z, tau, chi: Characteristic, alpha, cfg: ThetaConfig = ThetaConfig()) -> complex:
    """Partial derivative of theta in z for a multi-index of order <= 4."""
    alpha = tuple(alpha)
    if sum(alpha) > 4:
        raise ValueError("derivative order above 4 is not supported")
    log_scale, jet, _ = theta_log_jet(z, tau, chi, max(sum(alpha), 0), cfg)
    return complex(np.exp(log_scale) * jet.deriv(alpha))
