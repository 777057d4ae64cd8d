import cmath

import numpy as np
import pytest

from hyperpsi.abel import (AbelPath, DivisorPair, abel, abel_point, embed, lattice_basis,
                           normalized_abel, reduce_lattice)
from hyperpsi.curve import CurvePoint, random_point
from hyperpsi.errors import PathNearBranch
from hyperpsi.kleinian import log_sigma, wp_jet
from hyperpsi.oracles import fd_derivative

PATHS = [AbelPath(angle_offset=0.9), AbelPath(angle_offset=-1.3), AbelPath(angle_offset=2.2),
         AbelPath(waypoints=(0.5j,)), AbelPath(waypoints=(-0.7 - 0.4j,), detour_sign=-1)]


def _mod_lattice(ctx, d):
    red, _ = reduce_lattice(ctx.periods, d)
    return np.max(np.abs(red.u))


def test_symmetric_in_points(ctx2, rng):
    p, q = random_point(ctx2.curve, rng), random_point(ctx2.curve, rng)
    a = abel(ctx2.curve, ctx2.periods, DivisorPair(p, q)).u
    b = abel(ctx2.curve, ctx2.periods, DivisorPair(q, p)).u
    assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


def test_path_independence_mod_lattice(ctx2, rng):
    scale = np.max(np.abs(ctx2.periods.omega1))
    for _ in range(4):
        d = DivisorPair(random_point(ctx2.curve, rng), random_point(ctx2.curve, rng))
        u = abel(ctx2.curve, ctx2.periods, d).u
        for path in PATHS:
            alt = abel(ctx2.curve, ctx2.periods, d, path, path).u
            assert _mod_lattice(ctx2, alt - u) < 1e-8 * scale


def test_involution_negates(ctx2, rng):
    for _ in range(5):
        p = random_point(ctx2.curve, rng)
        s = embed(ctx2.curve, ctx2.periods, p).u + embed(ctx2.curve, ctx2.periods, p.involution()).u
        assert _mod_lattice(ctx2, s) < 1e-8


def test_infinity_maps_to_origin(ctx2):
    assert np.all(abel_point(ctx2.curve, CurvePoint.infinity()) == 0)


def test_derivative_along_curve(ctx2, rng):
    p = random_point(ctx2.curve, rng)

    def u_at(x):
        # follow the sheet of p for a small displacement in x
        y = p.y * np.sqrt(complex(sum(l * x ** k for k, l in enumerate(ctx2.curve.lambdas))) / p.y ** 2)
        return abel_point(ctx2.curve, CurvePoint.affine(ctx2.curve, x, y))
    h = 1e-4
    d = (u_at(p.x + h) - u_at(p.x - h)) / (2 * h)
    np.testing.assert_allclose(d, [1 / (2 * p.y), p.x / (2 * p.y)], rtol=1e-6)


def test_branch_point_target_rejected(ctx2):
    e = ctx2.curve.branch.finite_branch_points[0]
    with pytest.raises(PathNearBranch):
        abel_point(ctx2.curve, CurvePoint("affine", e, 0j))


def test_reduce_lattice_shift(ctx2, rng):
    L = lattice_basis(ctx2.periods)
    n = rng.integers(-3, 4, 4)
    u = 0.1 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
    red, shift = reduce_lattice(ctx2.periods, u + L @ n)
    assert np.array_equal(shift, n)
    assert np.allclose(red.u, u, atol=1e-12)


def test_sigma_quasi_periodicity_across_shift(ctx2, rng):
    """log sigma(u + l) - log sigma(u) matches the theta transformation law."""
    chi, tau, kappa = ctx2.chi, ctx2.periods.tau, ctx2.kappa_sym
    u = abel(ctx2.curve, ctx2.periods,
             DivisorPair(random_point(ctx2.curve, rng), random_point(ctx2.curve, rng))).u
    for m, n in (((1, 0), (0, 0)), ((0, 0), (0, 1)), ((1, -1), (2, 1))):
        m, n = np.array(m), np.array(n)
        ell = 2 * ctx2.periods.omega1 @ m + 2 * ctx2.periods.omega2 @ n
        z = ctx2.A @ u
        expected = (-u @ kappa @ ell - 0.5 * ell @ kappa @ ell + 2j * np.pi * chi.a @ m
                    - 2j * np.pi * (0.5 * n @ tau @ n + n @ (z + chi.b)))
        got = log_sigma(ctx2, u + ell) - log_sigma(ctx2, u)
        diff = (got - expected) / (2j * np.pi)
        assert abs(diff - round(diff.real)) < 1e-8


def test_normalized_abel_integer_on_alpha_lattice(ctx2):
    v = normalized_abel(ctx2.periods, 2 * ctx2.periods.omega1[:, 0])
    np.testing.assert_allclose(v, [2, 0], atol=1e-12)
