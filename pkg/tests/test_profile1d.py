import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from convexpoincare.errors import DegenerateProfile, InvalidExponents
from convexpoincare.profile1d import (BOTH, RIGHT, DiscreteProfile, ExponentPair,
                                      closed_form_extremal_p1, closed_form_pi_p1, pi_p1_table,
                                      rayleigh_1d, rearrange, scaled_min, solve_a_pq, solve_pi_pq)

from oracles import hat, pi_p1, pi_pq_power


def pair(p, q):
    return ExponentPair(p, q, 1)


# --- exponent pairs --------------------------------------------------------------

def test_alpha_and_regime():
    e = ExponentPair(2, 4, 2)
    assert e.alpha == pytest.approx(0.75)
    assert e.regime == "q>p"
    assert ExponentPair(3, math.inf, 2).alpha == pytest.approx(2 / 3)
    assert ExponentPair(2, 2).regime == "q=p"


def test_validity_by_dimension():
    assert not ExponentPair(1.5, 6.0, 2).valid  # p* = 6
    assert ExponentPair(1.5, 5.9, 2).valid
    assert ExponentPair(2, 100, 2).valid
    assert ExponentPair(3, math.inf, 2).valid
    assert not ExponentPair(2, math.inf, 2).valid
    with pytest.raises(InvalidExponents):
        ExponentPair(0.9, 1)


# --- quotient ---------------------------------------------------------------------

def test_hat_quotient():
    u = DiscreteProfile(hat(1000))
    assert rayleigh_1d(u, pair(2, 2)) == pytest.approx(12.0, rel=1e-5)


def test_sine_quotient():
    u = DiscreteProfile.from_function(lambda t: np.sin(np.pi * t), 2000)
    assert rayleigh_1d(u, pair(2, 2)) == pytest.approx(math.pi ** 2, rel=1e-4)


def test_zero_profile():
    with pytest.raises(DegenerateProfile):
        rayleigh_1d(DiscreteProfile(np.zeros(10)), pair(2, 2))


def test_boundary_tag_enforced():
    with pytest.raises(ValueError):
        DiscreteProfile(np.array([1.0, 1.0, 0.0]), BOTH)
    DiscreteProfile(np.array([1.0, 1.0, 0.0]), RIGHT)


@given(st.floats(0.1, 100) | st.floats(-100, -0.1), st.sampled_from([(2, 2), (1.5, 3), (3, 1)]))
def test_homogeneity(c, pq):
    u = DiscreteProfile(hat(50) * (1 + 0.3 * np.sin(np.arange(51))))
    v = DiscreteProfile(c * u.values)
    assert rayleigh_1d(v, pair(*pq)) == pytest.approx(rayleigh_1d(u, pair(*pq)), rel=1e-12)


# --- closed forms -------------------------------------------------------------------

def test_closed_form_pi_p1():
    assert closed_form_pi_p1(2) == pytest.approx(2 * math.sqrt(3))
    for p in (1.5, 3, 7):
        assert closed_form_pi_p1(p) == pytest.approx(pi_p1(p))


def test_closed_form_extremal():
    u = closed_form_extremal_p1(2, 2000)
    assert np.allclose(u.values, 0.25 - (u.t - 0.5) ** 2)
    assert rayleigh_1d(u, pair(2, 1)) == pytest.approx(12.0, rel=1e-4)


def test_pi_p1_table_large_p_row():
    rows = pi_p1_table([2, 10, 100])
    assert rows[-1]["pi_p1"] == pytest.approx(4.0, rel=0.05)


def test_scaled_min():
    assert scaled_min(1.0, (2, 2)) == pytest.approx(pi_pq_power(2, 2), rel=1e-6)
    assert scaled_min(2.0, (2, 2), value=math.pi ** 2) == pytest.approx(math.pi ** 2 / 4)
    assert scaled_min(4.0, (2, 1), value=12.0) == pytest.approx(0.1875)


# --- solvers ------------------------------------------------------------------------

@pytest.mark.parametrize("p, q", [(2, 2), (2, 1), (3, 1), (1.5, 1), (1.5, 1.5), (2, 3),
                                  (3, 2), (2, 4), (1.5, 3), (4, 1.5)])
def test_solve_pi_against_beta_oracle(p, q):
    r = solve_pi_pq(pair(p, q))
    assert r.value == pytest.approx(pi_pq_power(p, q), rel=1e-3)
    assert r.value >= pi_pq_power(p, q) * (1 - 1e-6)  # discrete minimum sits above


@pytest.mark.parametrize("p, q, expected", [(2, 2, (math.pi / 2) ** 2), (2, 1, 3.0)])
def test_solve_a_examples(p, q, expected):
    assert solve_a_pq(pair(p, q)).value == pytest.approx(expected, rel=1e-3)


@pytest.mark.parametrize("p, q", [(1.5, 1.5), (2, 3), (3, 2)])
def test_half_interval_identity(p, q):
    a = solve_a_pq(pair(p, q)).value
    pi = solve_pi_pq(pair(p, q)).value
    assert a == pytest.approx((pi ** (1 / p) / 2) ** p, rel=1e-3)


@pytest.mark.parametrize("p, q", [(2, 2), (3, 1.5), (2, 4)])
def test_reflection_doubles(p, q):
    a = solve_a_pq(pair(p, q), n=1000)
    psi = a.profile.values
    # reflect about the free end; on the unit interval this gives 2^p A
    u = DiscreteProfile(np.concatenate([psi[::-1], psi[1:]]))
    assert rayleigh_1d(u, pair(p, q)) == pytest.approx(2 ** p * a.value, rel=1e-9)
    assert rayleigh_1d(u, pair(p, q)) == pytest.approx(pi_pq_power(p, q), rel=1e-3)


@pytest.mark.parametrize("p, q", [(2, 3), (3, 1.5)])
def test_refinement_error_shrinks(p, q):
    # trapezoid norms are not nested-monotone, so the error, not the value, is monotone
    ref = pi_pq_power(p, q)
    errs = [abs(solve_pi_pq(pair(p, q), n=n).value - ref) for n in (250, 500, 1000, 2000)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] / ref < 1e-5


def test_q_continuity_near_p():
    qs = np.arange(1.8, 2.21, 0.05)
    vals = [solve_pi_pq(pair(2, q), n=500).value ** 0.5 for q in qs]
    jumps = np.abs(np.diff(vals)) / np.array(vals[:-1])
    assert np.all(jumps < 0.05)


def test_q_infinity_value_and_limit():
    inf = solve_pi_pq(pair(3, math.inf)).value
    assert inf == pytest.approx(8.0, rel=1e-6)
    big = [solve_pi_pq(pair(3, q)).value for q in (50, 200)]
    assert big[0] == pytest.approx(pi_pq_power(3, 50), rel=1e-3)
    assert big[1] == pytest.approx(pi_pq_power(3, 200), rel=1e-3)
    # values decrease toward the q = inf constant
    assert big[0] > big[1] > inf


def test_rejects_p_too_close_to_one():
    with pytest.raises(InvalidExponents):
        solve_pi_pq(pair(1.02, 1))


def test_grid_too_small():
    with pytest.raises(ValueError):
        solve_pi_pq(pair(2, 2), n=100)


def test_multistart_reports_spread():
    r = solve_pi_pq(pair(2, 4))
    assert len(r.starts) == 9
    assert r.spread < 1e-3 and not r.flagged


# --- rearrangement -----------------------------------------------------------------

def profiles(n=40):
    return arrays(np.float64, n - 1, elements=st.floats(-10, 10, allow_nan=False)).map(
        lambda a: DiscreteProfile(np.concatenate([[0.0], a, [0.0]])))


def test_rearrange_example():
    u = DiscreteProfile(np.array([0, 3, 1, 4, 1, 5, 9, 2, 6, 0], dtype=float))
    assert rearrange(u).values.tolist() == [0, 1, 3, 5, 9, 6, 4, 2, 1, 0]


def test_rearrange_fixed_point():
    u = DiscreteProfile.from_function(lambda t: np.sin(np.pi * t), 201)
    assert np.allclose(rearrange(u).values, u.values, atol=1e-12)


@given(profiles())
def test_rearrange_preserves_norms(u):
    v = rearrange(u)
    if not np.any(u.values):
        return
    w = np.full(len(u.values), 1.0)
    for q in (1, 2, 3.5):
        assert np.sum(np.abs(v.values) ** q * w) == pytest.approx(np.sum(np.abs(u.values) ** q * w), rel=1e-10)
    assert np.max(v.values) == pytest.approx(np.max(np.abs(u.values)))


@given(profiles(), st.sampled_from([1.5, 2.0, 3.0]))
def test_rearrange_does_not_raise_gradient(u, p):
    v = rearrange(u)
    g = lambda x: np.sum(np.abs(np.diff(x)) ** p) ** (1 / p)
    assert g(v.values) <= g(u.values) + 1e-8


@given(profiles())
def test_rearrange_shape(u):
    v = rearrange(u).values
    m = len(v) // 2
    # non-increasing away from the centre on each side
    assert np.all(np.diff(v[m:]) <= 0)
    assert np.all(np.diff(v[: m + 1]) >= 0)


def test_rearrange_random_corpus():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        a = rng.normal(size=30)
        u = DiscreteProfile(np.concatenate([[0.0], a, [0.0]]))
        v = rearrange(u)
        assert np.sum(np.abs(np.diff(v.values)) ** 2) <= np.sum(np.abs(np.diff(u.values)) ** 2) + 1e-8
