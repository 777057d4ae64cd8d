import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperpsi.curve import (Curve, CurvePoint, branch_points, continue_y, eval_f,
                            random_curve, random_point)
from hyperpsi.errors import DegenerateCurve


def test_eval_f_monomial():
    # x^5 is singular, so it is passed as a bare coefficient sequence
    assert eval_f((0, 0, 0, 0, 0, 1), 2) == 32


def test_eval_f_constant_term():
    c = random_curve(7)
    assert eval_f(c, 0) == c.lambdas[0]


@given(st.integers(0, 500), st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False))
@settings(max_examples=40, deadline=None)
def test_eval_f_matches_naive_power_sum(seed, x):
    c = random_curve(seed)
    naive = sum(l * x ** k for k, l in enumerate(c.lambdas))
    assert abs(eval_f(c, x) - naive) <= 1e-14 * max(1.0, sum(abs(l * x ** k) for k, l in enumerate(c.lambdas)))


def test_branch_points_quintic():
    b = branch_points(Curve(2, (0, -1, 0, 0, 0, 1)))
    expected = sorted([0, 1, -1, 1j, -1j], key=lambda z: (complex(z).real, complex(z).imag))
    assert np.allclose(b.finite_branch_points, expected, atol=1e-14)


def test_branch_points_cubic():
    b = branch_points(Curve(1, (0, -1, 0, 1)))
    assert np.allclose(b.finite_branch_points, [-1, 0, 1], atol=1e-14)
    assert b.pairing[-1][1] is None


@pytest.mark.parametrize("seed", range(10))
def test_random_curve_roots_are_zeros(seed):
    c = random_curve(seed)
    for e in c.branch.finite_branch_points:
        assert abs(eval_f(c, e)) < 1e-12


def test_random_curve_deterministic():
    assert random_curve(1).lambdas == random_curve(1).lambdas


roots_strategy = st.lists(
    st.tuples(st.floats(-3, 3), st.floats(-3, 3)).map(lambda t: complex(*t)),
    min_size=5, max_size=5,
).filter(lambda rs: min(abs(a - b) for i, a in enumerate(rs) for b in rs[i + 1:]) >= 0.5)


@given(roots_strategy)
@settings(max_examples=30, deadline=None)
def test_roots_round_trip(roots):
    c = Curve.from_roots(roots)
    got = np.asarray(c.branch.finite_branch_points)
    # multiset comparison: sorting is ambiguous when real parts tie up to rounding
    assert all(np.min(np.abs(got - r)) < 1e-10 for r in roots)
    assert all(np.min(np.abs(np.asarray(roots) - g)) < 1e-10 for g in got)


def test_repeated_roots_rejected():
    with pytest.raises(DegenerateCurve):
        Curve(2, (0, 0, 0, 0, 0, 1))


def test_model_must_be_monic_odd():
    with pytest.raises(ValueError):
        Curve(2, (1, 0, 0, 0, 0, 2))
    with pytest.raises(ValueError):
        Curve(2, (1, 0, 0, 0, 1))


def test_point_must_lie_on_curve():
    c = random_curve(2)
    with pytest.raises(ValueError):
        CurvePoint.affine(c, 0.3, 100.0)


def test_random_points_on_curve(rng):
    c = random_curve(3)
    for _ in range(20):
        p = random_point(c, rng)
        assert abs(p.y ** 2 - eval_f(c, p.x)) <= 1e-10 * (1 + abs(eval_f(c, p.x)))


def test_json_round_trip():
    c = random_curve(5)
    d = Curve.from_json(c.to_json())
    assert np.allclose(d.lambdas, c.lambdas, rtol=1e-15, atol=0)


def test_continue_constant_path():
    c = random_curve(1)
    y = np.sqrt(eval_f(c, 0.1 + 0.2j))
    assert continue_y(c, [0.1 + 0.2j, 0.1 + 0.2j], y) == y


def _loop(center, radius, n=400):
    t = np.linspace(0, 2 * np.pi, n)
    return list(center + radius * np.exp(1j * t))


def test_monodromy_random_loops(rng):
    c = random_curve(4)
    e = np.asarray(c.branch.finite_branch_points)
    sep = c.branch.min_separation
    for _ in range(10):
        k = rng.integers(len(e))
        path = _loop(e[k], 0.3 * sep)
        y0 = np.sqrt(complex(eval_f(c, path[0])))
        assert abs(continue_y(c, path, y0) + y0) < 1e-9 * abs(y0)
    for _ in range(10):
        i, j = rng.choice(len(e), 2, replace=False)
        mid, half = (e[i] + e[j]) / 2, abs(e[i] - e[j]) / 2
        others = [x for k, x in enumerate(e) if k not in (i, j)]
        # an ellipse tight around the segment e_i e_j
        d = (e[j] - e[i]) / abs(e[j] - e[i])
        t = np.linspace(0, 2 * np.pi, 800)
        path = list(mid + d * (1.05 * half * np.cos(t) + 1j * 0.05 * half * np.sin(t)))
        if min(abs(p - o) for p in path for o in others) < 0.05:
            continue
        y0 = np.sqrt(complex(eval_f(c, path[0])))
        assert abs(continue_y(c, path, y0) - y0) < 1e-9 * abs(y0)
