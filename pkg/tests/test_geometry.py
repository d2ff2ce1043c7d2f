import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from convexpoincare.errors import BorderlineExponent, InvalidExponents, InvalidPolygon
from convexpoincare.geometry import (ConvexPolygon, ModelBody, cone_quantities, corpus,
                                     diam_bound_check, gamma_N, inner_parallel,
                                     inradius_diam_check, makai_check, parallel_profile,
                                     random_convex_polygon, slab_quantities, unit_ball_volume)

SQUARE = ConvexPolygon.rectangle(1.0)
HEX = ConvexPolygon.regular(6)
TRI345 = ConvexPolygon([[0, 0], [4, 0], [0, 3]])


def polygons():
    return st.builds(lambda seed, k: random_convex_polygon(np.random.default_rng(seed), k),
                     st.integers(0, 10_000), st.integers(3, 12))


# --- basic measurements --------------------------------------------------------

@pytest.mark.parametrize("P, area, per, diam", [
    (SQUARE, 1.0, 4.0, math.sqrt(2)),
    (ConvexPolygon([[0, 0], [1, 0], [0, 1]]), 0.5, 2 + math.sqrt(2), math.sqrt(2)),
    (HEX, 3 * math.sqrt(3) / 2, 6.0, 2.0),
    (ConvexPolygon.rectangle(10), 10.0, 22.0, math.sqrt(101)),
])
def test_area_perimeter_diameter(P, area, per, diam):
    assert P.area == pytest.approx(area, rel=1e-14)
    assert P.perimeter == pytest.approx(per, rel=1e-14)
    assert P.diameter == pytest.approx(diam, rel=1e-14)


@pytest.mark.parametrize("P, r", [
    (SQUARE, 0.5),
    (ConvexPolygon([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]), 1 / (2 * math.sqrt(3))),
    (ConvexPolygon.rectangle(7.5), 0.5),
    (TRI345, 1.0),
])
def test_inradius_closed_forms(P, r):
    assert abs(P.inradius - r) < 1e-10


def test_collinear_input_rejected():
    with pytest.raises(InvalidPolygon):
        ConvexPolygon([[0, 0], [1, 0], [2, 0]])


def test_nonconvex_rejected():
    with pytest.raises(InvalidPolygon):
        ConvexPolygon([[0, 0], [2, 0], [1, 0.2], [2, 2], [0, 2]])


def test_clockwise_reversed_with_warning():
    with pytest.warns(UserWarning):
        P = ConvexPolygon.from_points([[0, 0], [0, 1], [1, 1], [1, 0]])
    assert P.area == pytest.approx(1.0)


def test_duplicate_vertex_rejected():
    with pytest.raises(InvalidPolygon):
        ConvexPolygon([[0, 0], [1, 0], [1, 0], [0, 1]])


# --- inner parallel sets ----------------------------------------------------------

def test_inner_parallel_square():
    Q = inner_parallel(SQUARE, 0.25)
    assert Q.area == pytest.approx(0.25, rel=1e-12)
    assert np.allclose(Q.centroid, [0.5, 0.5])
    assert inner_parallel(SQUARE, 0.5) is None


def test_inner_parallel_similar_triangle():
    Q = inner_parallel(TRI345, 0.5)
    assert Q.area == pytest.approx(6.0 * (1 - 0.5) ** 2, rel=1e-12)
    assert Q.inradius == pytest.approx(0.5, abs=1e-10)


def test_profile_square_matches_hand_formulas():
    prof = parallel_profile(SQUARE, 64)
    assert prof.inradius == pytest.approx(0.5, abs=1e-10)
    assert np.allclose(prof.xi, (1 - 2 * prof.tau) ** 2, atol=1e-12)
    assert np.allclose(prof.perim, 4 * (1 - 2 * prof.tau), atol=1e-9)


def test_profile_regular_polygon_is_homothetic():
    P = ConvexPolygon.regular(64)
    prof = parallel_profile(P, 64)
    r = math.cos(math.pi / 64)
    assert prof.inradius == pytest.approx(r, abs=1e-10)
    assert np.allclose(prof.xi, P.area * (1 - prof.tau / r) ** 2, rtol=1e-8, atol=1e-12)
    assert P.area == pytest.approx(math.pi, rel=0.002)


def test_profile_rejects_coarse_grid():
    with pytest.raises(ValueError):
        parallel_profile(SQUARE, 8)


@given(polygons())
def test_profile_invariants(P):
    prof = parallel_profile(P, 32)
    assert prof.xi[0] == pytest.approx(P.area, rel=1e-12)
    assert prof.perim[0] == pytest.approx(P.perimeter, rel=1e-12)
    assert prof.xi[-1] == 0.0
    assert np.all(np.diff(prof.xi) < 0)
    assert np.all(np.diff(prof.perim) <= 0)
    # -d xi/d tau lies between the perimeters at the interval ends
    dxi = -np.diff(prof.xi) / np.diff(prof.tau)
    tol = 1e-8 * P.perimeter
    assert np.all(dxi <= prof.perim[:-1] + tol)
    assert np.all(dxi >= prof.perim[1:] - tol)


@given(polygons())
def test_coarea_integral_gives_area(P):
    prof = parallel_profile(P, 64)
    assert np.trapezoid(prof.perim, prof.tau) == pytest.approx(P.area, rel=1e-3)


@given(polygons(), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_inner_parallel_nested(P, a, b):
    t1, t2 = sorted((a * P.inradius, b * P.inradius))
    Q2 = inner_parallel(P, t2)
    Q1 = inner_parallel(P, t1)
    if Q2 is None:
        return
    assert Q1 is not None
    assert np.all(Q1.boundary_distance(Q2.vertices) >= -1e-9 * P.scale)


@given(polygons())
def test_makai_on_random_polygons(P):
    assert makai_check(P).passed


@given(polygons(), st.sampled_from([0.5, 3.0]))
def test_record_ratios_scale_invariant(P, t):
    Q = P.scaled(t)
    for f in (makai_check, diam_bound_check):
        assert f(Q).ratio == pytest.approx(f(P).ratio, rel=1e-12)
    for a in (0.75, 1.5):
        assert inradius_diam_check(Q, a).ratio == pytest.approx(inradius_diam_check(P, a).ratio, rel=1e-10)


@given(polygons())
def test_cyclic_relabeling_is_canonical(P):
    v = P.vertices
    Q = ConvexPolygon(np.roll(v, 2, axis=0))
    assert np.array_equal(Q.vertices, v)


def test_corpus_is_deterministic():
    a = corpus(3, 5)
    b = corpus(3, 5)
    assert all(np.array_equal(x.vertices, y.vertices) for x, y in zip(a, b))


# --- model bodies ------------------------------------------------------------------

def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_slab_quantities():
    assert slab_quantities(10, 2)[:2] == (10, 22)
    assert slab_quantities(2, 3)[:2] == (4, 16)
    assert slab_quantities(5, 4)[2] == 0.5


def test_slab_matches_rectangle():
    vol, per, r, diam = slab_quantities(7.0, 2)
    P = ConvexPolygon.rectangle(7.0)
    assert (vol, per) == pytest.approx((P.area, P.perimeter))
    assert r == pytest.approx(P.inradius, abs=1e-10)
    assert diam == pytest.approx(P.diameter)


def test_cone_inradius():
    for N in (2, 3, 5):
        assert cone_quantities(math.pi / 6, N)[2] == pytest.approx(1 / 3)


def test_cone_planar_volume_is_sector():
    for a in (0.1, math.pi / 4, 1.2):
        vol, per, _ = cone_quantities(a, 2)
        assert vol == pytest.approx(a, rel=1e-10)
        assert per == pytest.approx(2 * a + 2, rel=1e-10)


@pytest.mark.parametrize("N", [2, 3])
def test_cone_ratio_limit(N):
    vol, per, r = cone_quantities(1e-3, N)
    assert vol / (r * per) == pytest.approx(1 / N, rel=0.01)


def test_cone_out_of_range():
    with pytest.raises(ValueError):
        cone_quantities(0.0, 2)
    with pytest.raises(ValueError):
        cone_quantities(math.pi / 2, 2)


def test_makai_examples():
    ball = makai_check(ModelBody.ball(1.0, 2))
    assert ball.passed and ball.extra["lower_ratio"] == pytest.approx(1.0)
    rect = makai_check(ConvexPolygon.rectangle(50))
    assert rect.extra["ratio_vol_RP"] == pytest.approx(50 / (0.5 * 102))
    cone = makai_check(ModelBody.cone(1e-3, 2))
    assert cone.passed and cone.extra["ratio_vol_RP"] == pytest.approx(0.5, rel=0.01)


def test_gamma2():
    assert gamma_N(2) == pytest.approx(math.sqrt(3) / 2)


@pytest.mark.parametrize("P, left, right", [
    (SQUARE, math.sqrt(3) / 2 * math.sqrt(2), 4.0),
    (ConvexPolygon.rectangle(100), math.sqrt(3) / 2 * math.sqrt(10001), 202.0),
])
def test_diam_bound_examples(P, left, right):
    rec = diam_bound_check(P)
    assert rec.passed
    assert rec.left == pytest.approx(left)
    assert rec.right == pytest.approx(right)


def test_inradius_diam():
    with pytest.raises(BorderlineExponent):
        inradius_diam_check(SQUARE, 1.0)
    with pytest.raises(InvalidExponents):
        inradius_diam_check(SQUARE, 0.4)
    for P in (SQUARE, ConvexPolygon.rectangle(50)):
        rec = inradius_diam_check(P, 0.75)
        assert rec.passed and rec.extra["form"] == "good" and rec.extra["slack"] > 0
    assert inradius_diam_check(SQUARE, 1.5).extra["form"] == "bad"
