"""Continued-fraction evaluation: closed-form fixtures, the even/odd
truncation bracket (verified in exact rational arithmetic), and the
slope-at-zero formulas."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from instab import (
    DegenerateFraction,
    Direction,
    NoConvergence,
    TailSpec,
    b,
    eval_adaptive,
    eval_adaptive_coeffs,
    eval_trunc,
    even_trunc_slope_at_zero,
)
from conftest import make_params


# ---------------------------------------------------------------------------
# eval_trunc fixtures
# ---------------------------------------------------------------------------

def test_depth_one():
    assert eval_trunc([2.0]) == 0.5
    assert eval_trunc([1.0]) == 1.0


def test_depth_two():
    # 1/(1 + 1/1) = 1/2
    assert eval_trunc([1.0, 1.0]) == 0.5


def test_constant_two_converges_to_sqrt2_minus_1():
    got = eval_trunc([2.0] * 40)
    assert got == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-15)


@pytest.mark.parametrize("a", [0.16, 1.0, 7.5])
def test_constant_fraction_fixed_point(a):
    # x = 1/(a + x) has positive solution (sqrt(a^2+4) - a)/2
    expect = (math.sqrt(a * a + 4.0) - a) / 2.0
    got = eval_adaptive_coeffs(lambda d: [a] * d, tol=1e-14)
    assert got.value == pytest.approx(expect, rel=1e-13)
    assert got.lower <= got.value <= got.upper


def test_empty_truncation_rejected():
    with pytest.raises(ValueError):
        eval_trunc([])


def test_degenerate_intermediate_denominator():
    # tail of [1, -1] folds to exactly zero
    with pytest.raises(DegenerateFraction):
        eval_trunc([1.0, -1.0])


# ---------------------------------------------------------------------------
# even/odd truncation bracket, certified in exact arithmetic
# ---------------------------------------------------------------------------

def exact_truncations(coeffs):
    """All truncation values [a1], [a1;a2], ... as exact Fractions.

    Uses the continuant recurrence A_k = a_k A_{k-1} + A_{k-2}: the depth-k
    value is B_k / A_k where B is the continuant of the shifted sequence.
    """
    a_prev2, a_prev = Fraction(1), Fraction(coeffs[0])  # A_0, A_1
    b_prev2, b_prev = Fraction(0), Fraction(1)          # B_0, B_1
    out = [b_prev / a_prev]
    for a in coeffs[1:]:
        fa = Fraction(a)
        a_prev2, a_prev = a_prev, fa * a_prev + a_prev2
        b_prev2, b_prev = b_prev, fa * b_prev + b_prev2
        out.append(b_prev / a_prev)
    return out


positive_streams = st.lists(
    st.floats(min_value=0.01, max_value=100.0, allow_nan=False,
              allow_infinity=False),
    min_size=4, max_size=48,
)


@settings(max_examples=100, deadline=None)
@given(positive_streams)
def test_even_odd_bracket_is_exact(coeffs):
    vals = exact_truncations(coeffs)
    evens = vals[1::2]  # depths 2, 4, ...
    odds = vals[0::2]   # depths 1, 3, ...
    assert all(x <= y for x, y in zip(evens, evens[1:]))
    assert all(x >= y for x, y in zip(odds, odds[1:]))
    assert max(evens, default=Fraction(0)) <= min(odds)


@settings(max_examples=50, deadline=None)
@given(positive_streams)
def test_float_truncations_track_exact_values(coeffs):
    exact = exact_truncations(coeffs)
    for depth in (1, 2, len(coeffs)):
        got = eval_trunc(coeffs[:depth])
        assert got == pytest.approx(float(exact[depth - 1]), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(positive_streams)
def test_positive_stream_value_bounds(coeffs):
    got = eval_trunc(coeffs)
    assert 0.0 < got <= 1.0 / coeffs[0] + 1e-12


# ---------------------------------------------------------------------------
# adaptive evaluation on dispersion tails
# ---------------------------------------------------------------------------

def test_adaptive_bracket_contains_deep_value(fig_params):
    tail = TailSpec(Direction.FORWARD, fig_params, 0.1)
    br = eval_adaptive(tail, tol=1e-10)
    deep = eval_trunc(tail.coeffs(10_000))
    slack = 1e-14
    assert br.lower - slack <= deep <= br.upper + slack
    assert br.width <= 1e-10
    assert abs(br.value - deep) <= 1e-10


def test_backward_tail_agrees_with_mirror(fig_params):
    # the backward tail of q is the forward tail of the reflected orbit -q
    mirror = make_params(q=(1, -2))
    lam = 0.15
    bwd = eval_adaptive(TailSpec(Direction.BACKWARD, fig_params, lam), 1e-12)
    fwd = eval_adaptive(TailSpec(Direction.FORWARD, mirror, lam), 1e-12)
    assert bwd.value == pytest.approx(fwd.value, rel=1e-10)


def test_tail_continuous_at_zero(fig_params):
    tail0 = eval_adaptive(TailSpec(Direction.FORWARD, fig_params, 0.0), 1e-12)
    tail_eps = eval_adaptive(TailSpec(Direction.FORWARD, fig_params, 1e-10),
                             1e-12)
    assert tail0.value == pytest.approx(tail_eps.value, abs=1e-9)


def test_no_convergence_reports_depth():
    # constant coefficients 1e-6: truncations oscillate between ~1e6 and ~1e-6
    with pytest.raises(NoConvergence) as exc:
        eval_adaptive_coeffs(lambda d: [1e-6] * d, tol=1e-10, max_depth=64)
    assert exc.value.depth == 64
    assert exc.value.width > 1.0


# ---------------------------------------------------------------------------
# closed forms at lambda = 0
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("nu", [0.06, 0.3, 1.7])
def test_depth_two_closed_form(nu):
    # [nu*b1; nu*b2] folds to the rational function nu*b2/(1 + nu^2*b1*b2)
    pr = make_params(nu=nu)
    tail = TailSpec(Direction.FORWARD, pr, 0.0)
    b1, b2 = b(1, pr), b(2, pr)
    expect = nu * b2 / (1.0 + nu ** 2 * b1 * b2)
    got = eval_trunc(tail.coeffs(2))
    assert got == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("nu", [0.06, 0.3])
def test_depth_four_closed_form(nu):
    pr = make_params(nu=nu)
    tail = TailSpec(Direction.FORWARD, pr, 0.0)
    b1, b2, b3, b4 = (b(n, pr) for n in (1, 2, 3, 4))
    num = (b2 + b4) * nu + b2 * b3 * b4 * nu ** 3
    den = (1.0 + (b1 * b2 + b1 * b4 + b3 * b4) * nu ** 2
           + b1 * b2 * b3 * b4 * nu ** 4)
    got = eval_trunc(tail.coeffs(4))
    assert got == pytest.approx(num / den, rel=1e-11)


# ---------------------------------------------------------------------------
# slope of even truncations at nu = 0
# ---------------------------------------------------------------------------

def test_slope_formula_is_partial_b_sum(fig_params):
    assert even_trunc_slope_at_zero(1, Direction.FORWARD, fig_params) == (
        pytest.approx(b(2, fig_params), rel=1e-14))
    assert even_trunc_slope_at_zero(2, Direction.FORWARD, fig_params) == (
        pytest.approx(b(2, fig_params) + b(4, fig_params), rel=1e-14))
    assert even_trunc_slope_at_zero(1, Direction.BACKWARD, fig_params) == (
        pytest.approx(b(-2, fig_params), rel=1e-14))
    assert even_trunc_slope_at_zero(3, Direction.BACKWARD, fig_params) == (
        pytest.approx(sum(b(-2 * j, fig_params) for j in (1, 2, 3)),
                      rel=1e-14))


@pytest.mark.parametrize("k,direction", [(1, Direction.FORWARD),
                                         (2, Direction.FORWARD),
                                         (1, Direction.BACKWARD),
                                         (2, Direction.BACKWARD)])
def test_slope_matches_finite_difference(fig_params, k, direction):
    h = 1e-7

    def even_trunc(nu):
        pr = make_params(nu=nu)
        return eval_trunc(TailSpec(direction, pr, 0.0).coeffs(2 * k))

    # even truncations vanish at nu=0 and are odd in nu nearby, so the
    # one-sided quotient is second-order accurate
    fd = even_trunc(h) / h
    slope = even_trunc_slope_at_zero(k, direction, fig_params)
    assert fd == pytest.approx(slope, rel=1e-5)


def test_even_truncations_scale_linearly_in_nu(fig_params):
    # at nu=0 every coefficient is exactly zero (degenerate truncation);
    # just above, the even truncation is slope*nu to leading order
    degenerate = make_params(nu=0.0)
    with pytest.raises(DegenerateFraction):
        eval_trunc(TailSpec(Direction.FORWARD, degenerate, 0.0).coeffs(2))
    nu = 1e-8
    pr = make_params(nu=nu)
    got = eval_trunc(TailSpec(Direction.FORWARD, pr, 0.0).coeffs(2))
    slope = even_trunc_slope_at_zero(1, Direction.FORWARD, fig_params)
    assert got == pytest.approx(slope * nu, rel=1e-6)


def test_slope_rejects_bad_k(fig_params):
    with pytest.raises(ValueError):
        even_trunc_slope_at_zero(0, Direction.FORWARD, fig_params)
