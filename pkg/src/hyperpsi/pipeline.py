"""Assemble a calibrated sigma context for a curve.

curve -> periods -> odd characteristic vanishing on the embedded curve ->
gamma^2 from the addition formula.  Probe points are drawn from a generator
seeded by ``probe_seed`` so the whole construction is deterministic.
"""
from __future__ import annotations

import numpy as np

from .abel import DivisorPair, abel, embed
from .curve import Curve, random_point
from .kleinian import SigmaContext, auto_select_characteristic, calibrate_gamma
from .periods import PeriodData, compute_periods
from .theta import Characteristic, odd_characteristics

N_DIVISOR_PROBES = 5
N_GAMMA_PROBES = 4


def divisor_probes(curve: Curve, periods: PeriodData, rng: np.random.Generator,
                   count: int = N_DIVISOR_PROBES) -> list[np.ndarray]:
    return [embed(curve, periods, random_point(curve, rng)).u for _ in range(count)]


def random_jacobian_point(curve: Curve, periods: PeriodData, rng: np.random.Generator) -> np.ndarray:
    """Abel image of two random curve points: a generic point of the Jacobian."""
    d = DivisorPair(random_point(curve, rng), random_point(curve, rng))
    return abel(curve, periods, d).u


def build_context(curve: Curve, periods: PeriodData | None = None, probe_seed: int = 0,
                  chi: Characteristic | None = None, calibrate: bool = True) -> SigmaContext:
    periods = periods or compute_periods(curve)
    rng = np.random.default_rng(probe_seed)
    if chi is None:
        if curve.genus == 1:
            chi = odd_characteristics(1)[0]
        else:
            chi = auto_select_characteristic(curve, periods, divisor_probes(curve, periods, rng))
    ctx = SigmaContext(curve, periods, chi)
    if not calibrate:
        return ctx
    probes = [(random_jacobian_point(curve, periods, rng), random_jacobian_point(curve, periods, rng))
              for _ in range(N_GAMMA_PROBES)]
    return calibrate_gamma(ctx, probes)
