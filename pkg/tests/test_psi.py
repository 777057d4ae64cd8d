import numpy as np
import pytest

from hyperpsi.abel import embed
from hyperpsi.curve import CurvePoint, random_point
from hyperpsi.errors import DegeneratePoint, NearLattice, SingularFit
from hyperpsi.pipeline import random_jacobian_point
from hyperpsi.psi import (PsiSequence, assembly_residual, assembly_residual_literal, closed_residual,
                          elliptic_addition_residuals, elliptic_recursion_residual, limit_probes,
                          painleve_fit, phi_residual, psi_addition_residual, psi_elliptic, psi_g2,
                          psi_sequence_elliptic, psi_sequence_g2, psi_sequence_jacobian,
                          q_expansions, recursion_residual_g2, relative_combination, xi3_jacobian,
                          xi_bundle)

M = 6


@pytest.fixture(scope="module")
def g2_seq(ctx2):
    rng = np.random.default_rng(7)
    p = random_point(ctx2.curve, rng)
    return p, psi_sequence_g2(ctx2, p, max(2 * M, M + 2))


def test_low_order_values(ctx2, g2_seq):
    p, seq = g2_seq
    assert seq.value(0) == 0 and seq.value(1) == 0
    assert abs(seq.value(2) - 2 * p.y) < 1e-8 * abs(p.y)
    assert abs(psi_g2(ctx2, p, 2) - seq.value(2)) < 1e-12 * abs(seq.value(2))


def test_sigma_small_at_psi1(g2_seq):
    _, seq = g2_seq
    assert seq.defect[1] < 1e-8


def test_negative_index_is_odd(g2_seq):
    _, seq = g2_seq
    for k in (2, 3, 5):
        assert abs(seq.value(-k) + seq.value(k)) < 1e-12 * abs(seq.value(k))


def test_degenerate_points_rejected(ctx2):
    e = ctx2.curve.branch.finite_branch_points[0]
    with pytest.raises(DegeneratePoint):
        psi_g2(ctx2, CurvePoint("affine", e, 0j), 3)
    with pytest.raises(DegeneratePoint):
        psi_g2(ctx2, CurvePoint.infinity(), 3)
    with pytest.raises(ValueError):
        psi_g2(ctx2, CurvePoint.infinity(), -1)


def test_ratio_refuses_zero_denominator(g2_seq):
    _, seq = g2_seq
    with pytest.raises(DegeneratePoint):
        seq.ratio((3,), (1,))
    assert seq.ratio((0, 4), (2,)) == 0


def test_determinant_recursion_all_pairs(g2_seq):
    _, seq = g2_seq
    for m in range(3, M + 1):
        for n in range(2, m):
            assert recursion_residual_g2(seq, m, n) < 1e-8, (m, n)


def test_recursion_on_each_curve(g2_contexts):
    for ctx in g2_contexts.values():
        p = random_point(ctx.curve, np.random.default_rng(11))
        seq = psi_sequence_g2(ctx, p, 10)
        assert max(recursion_residual_g2(seq, m, n) for m in range(3, 6) for n in range(2, m)) < 1e-8


def test_recursion_independent_of_gamma(ctx2, g2_seq):
    p, seq = g2_seq
    c = 5.0
    other = psi_sequence_g2(ctx2.with_gamma_sq(c * ctx2.gamma_sq), p, seq.N)
    for k in (2, 3, 4):
        # each psi_k is homogeneous in gamma^2 of degree (1 - k^2) / 2
        assert abs(other.value(k) / seq.value(k) - c ** ((1 - k * k) / 2)) < 1e-9
    assert max(recursion_residual_g2(other, m, 2) for m in range(3, M + 1)) < 1e-8


def test_xi_closed_forms_and_assembly(ctx2, g2_seq):
    p, seq = g2_seq
    u = embed(ctx2.curve, ctx2.periods, p).u
    for m, n in ((4, 2), (5, 3), (6, 4)):
        b = xi_bundle(ctx2, seq, u, m, n)
        assert closed_residual(b.xi0, b.xi0_closed, b.xi0_scale) < 1e-6
        assert closed_residual(b.xi1_m, b.xi1_m_closed, b.xi1_scale) < 1e-6
        assert closed_residual(b.xi2, b.xi2_closed, b.xi2_scale) < 1e-6
        assert closed_residual(b.xi2, b.xi2_via_q, b.xi2_via_q_scale) < 1e-6
        assert assembly_residual(b) < 1e-8
        if n > 2:
            # xi2 vanishes identically when n = 2, hiding the ordering of its arguments
            assert assembly_residual_literal(b) > 1e-3


def test_xi_bundle_index_check(ctx2, g2_seq):
    p, seq = g2_seq
    with pytest.raises(ValueError):
        xi_bundle(ctx2, seq, embed(ctx2.curve, ctx2.periods, p).u, 2, 3)


def test_xi3_on_jacobian(ctx2, rng):
    u = random_jacobian_point(ctx2.curve, ctx2.periods, rng)
    for m in (1, 2, 3):
        by_def, closed, literal = xi3_jacobian(ctx2, u, m)
        assert abs(by_def - closed) < 1e-8 * max(abs(by_def), abs(closed))
        if m > 1:
            # at m = 1 the two sign patterns coincide
            assert abs(by_def - literal) > 1e-4 * abs(by_def)


def test_psi_addition_on_jacobian(ctx2, rng):
    u = random_jacobian_point(ctx2.curve, ctx2.periods, rng)
    assert psi_addition_residual(ctx2, u, 3, 2) < 1e-8
    assert psi_addition_residual(ctx2, u, 4, 1) < 1e-8


def test_phi_normalized_and_odd(ctx2, rng):
    u = random_jacobian_point(ctx2.curve, ctx2.periods, rng)
    seq = psi_sequence_jacobian(ctx2, u, 6, "Phi_on_J")
    assert abs(seq.value(1) - 1) < 1e-14
    assert abs(seq.value(-3) + seq.value(3)) < 1e-12 * abs(seq.value(3))
    # the genus-1 pattern is not expected to survive in genus 2
    assert phi_residual(seq, 3, 2) > 1e-3
    with pytest.raises(ValueError):
        phi_residual(psi_sequence_jacobian(ctx2, u, 4), 3, 2)


def test_q_expansions(ctx2, rng):
    p = random_point(ctx2.curve, rng)
    mu = 3 * embed(ctx2.curve, ctx2.periods, p).u
    e = q_expansions(ctx2, p.x, mu)
    for k in ("q12", "q22"):
        assert abs(e[k] - e[k + "_corrected"]) < 1e-8 * abs(e[k])


def test_limit_probes_converge_far_out(ctx2):
    p = random_point(ctx2.curve, np.random.default_rng(3))
    probes = {lp.name: lp for lp in limit_probes(ctx2, p, 3, (1e4, 1e5, 1e6))}
    for name in ("Psi1^2 wp11", "Psi1^2 wp12", "Psi1^2 wp22", "-sigma1/sigma2"):
        assert probes[name].monotone, name
        assert probes[name].final_error < 1e-2, name
    # sigma1/sigma2 tends to -x, so the x limit is missed by O(|x|)
    assert probes["sigma1/sigma2"].final_error > 0.1 * abs(p.x) / (1 + abs(p.x))


def test_relative_combination_zero_terms():
    assert relative_combination([(1, [None, 0j]), (-1, [None])]) == 0.0
    assert relative_combination([(1, [0j]), (-1, [0j])]) == 0.0


# --- genus 1 -------------------------------------------------------------------

@pytest.fixture(scope="module")
def g1_seq(ctx1):
    u = random_jacobian_point(ctx1.curve, ctx1.periods, np.random.default_rng(5))
    return psi_sequence_elliptic(ctx1, u, 14)


def test_elliptic_low_order(ctx1, g1_seq):
    assert g1_seq.value(1) == 1 and g1_seq.value(0) == 0
    assert abs(psi_elliptic(ctx1, g1_seq.base, 3) - g1_seq.value(3)) < 1e-12 * abs(g1_seq.value(3))


def test_elliptic_psi2_is_minus_wp_prime(ctx1, g1_seq):
    from hyperpsi.kleinian import wp_jet
    assert abs(g1_seq.value(2) + wp_jet(ctx1, g1_seq.base, 3).wp(1, 1, 1)) < 1e-8 * abs(g1_seq.value(2))


def test_elliptic_recursion(g1_seq):
    for m in range(2, 7):
        for n in range(1, m):
            assert elliptic_recursion_residual(g1_seq, m, n) < 1e-8


def test_elliptic_addition(ctx1, g1_seq):
    for m, n in ((3, 2), (5, 2), (4, 3)):
        r4, r5 = elliptic_addition_residuals(ctx1, g1_seq, m, n)
        assert r4 < 1e-8 and r5 < 1e-8


def test_near_lattice_rejected(ctx1):
    with pytest.raises(NearLattice):
        psi_sequence_elliptic(ctx1, 2 * ctx1.periods.omega1[:, 0] + 1e-12, 4)


def test_elliptic_needs_genus1(ctx2):
    with pytest.raises(ValueError):
        psi_sequence_elliptic(ctx2, np.ones(2), 4)
    with pytest.raises(ValueError):
        psi_sequence_jacobian(ctx2, np.ones(2), 2, "bad")


def test_painleve_fit_and_cross_validation(g1_seq):
    fit = painleve_fit(g1_seq, (2, 3), 10)
    assert max(fit.residuals.values()) < 1e-8
    other = painleve_fit(g1_seq, (5, 6), 10)
    assert abs(other.z - fit.z) < 1e-6 * abs(fit.z)
    assert abs(other.a - fit.a) < 1e-6 * max(abs(fit.a), 1)


def test_painleve_constant_beta_is_singular():
    # psi_k = exp(c k^2) makes every beta equal exp(2c)
    c = 0.3 + 0.1j
    seq = PsiSequence("elliptic", None, (None,) + tuple(c * k * k for k in range(1, 14)))
    with pytest.raises(SingularFit):
        painleve_fit(seq, (2, 3), 10)
    with pytest.raises(ValueError):
        painleve_fit(seq, (2, 3), 12)
