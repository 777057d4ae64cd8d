"""Numerical verification of psi-function recursions on genus-2 hyperelliptic curves.

The pipeline runs curve -> periods -> theta -> sigma / Kleinian wp -> Abel map
-> psi sequences, and every identity is reported as a relative residual.
"""
from .abel import AbelPath, DivisorPair, JacPoint, abel, embed, reduce_lattice
from .curve import Curve, CurvePoint, random_curve, random_point
from .errors import HyperPsiError
from .kleinian import SigmaContext, q_fn, sigma, wp_jet
from .periods import PeriodData, compute_periods
from .pipeline import build_context
from .psi import (PainleveFit, PsiSequence, XiBundle, painleve_fit, psi_elliptic, psi_g2,
                  psi_sequence_elliptic, psi_sequence_g2, recursion_residual_g2, xi_bundle)
from .report import ResidualReport
from .theta import Characteristic, theta

__all__ = [
    "AbelPath", "Characteristic", "Curve", "CurvePoint", "DivisorPair", "HyperPsiError",
    "JacPoint", "PainleveFit", "PeriodData", "PsiSequence", "ResidualReport", "SigmaContext",
    "XiBundle", "abel", "build_context", "compute_periods", "embed", "painleve_fit",
    "psi_elliptic", "psi_g2", "psi_sequence_elliptic", "psi_sequence_g2", "q_fn",
    "random_curve", "random_point", "recursion_residual_g2", "reduce_lattice", "sigma",
    "theta", "wp_jet", "xi_bundle",
]
