import math

import numpy as np
import pytest

from convexpoincare.bounds import a_constant
from convexpoincare.errors import BudgetExceeded, QNotGreaterThanP
from convexpoincare.geometry import ConvexPolygon
from convexpoincare.pde import SolverOptions
from convexpoincare.shapeopt import (ShapeOptOptions, ball_vs_rectangle, functional,
                                     maximize_over_polygons, rectangle_sweep)

FAST = SolverOptions(tol=1e-8, window=50, n_starts=3)
QUICK = ShapeOptOptions(max_evals=30, h_rel=0.08, n_random=1, rescore=False)


def test_functional_scale_invariant():
    P = ConvexPolygon.regular(6)
    a = functional(P, (2, 3), 0.1, FAST).F
    b = functional(P.scaled(2.0), (2, 3), 0.2, FAST).F
    assert b == pytest.approx(a, rel=1e-3)


def test_functional_square_value():
    r = functional(ConvexPolygon.rectangle(1), (2, 2), 0.05)
    assert r.F == pytest.approx(2 * math.pi ** 2 / 16, rel=0.01)
    assert r.F < r.bound


def test_sweep_increasing_for_q_equal_p():
    sw = rectangle_sweep((2, 2), [1, 2, 5, 10], h=0.1)
    assert sw.trend == "increasing" and sw.trend_ok
    assert all(r.F < r.bound for r in sw.records)
    assert sw.lengths == [1.0, 2.0, 5.0, 10.0]


def test_sweep_interior_for_q_above_p():
    sw = rectangle_sweep((2, 4), [1, 2, 3, 5, 20], h=0.1, opts=FAST, min_drop=0.05)
    assert sw.trend == "interior" and sw.trend_ok
    assert 1 < sw.argmax < 20


def test_maximizer_rejects_q_not_above_p():
    with pytest.raises(QNotGreaterThanP):
        maximize_over_polygons((2, 2), 6, QUICK)


def test_maximizer_budget_guard():
    with pytest.raises(BudgetExceeded):
        maximize_over_polygons((2, 3), 6, ShapeOptOptions(max_evals=2))


def test_maximizer_beats_its_starts_and_respects_bound():
    best = maximize_over_polygons((2, 4), 6, QUICK)
    assert best.F >= max(best.diagnostics["start_scores"].values()) - 1e-12
    assert best.F < a_constant(2, 4) * (1 - 1e-3)
    assert best.diagnostics["evaluations"] <= QUICK.max_evals


def test_maximizer_deterministic():
    a = maximize_over_polygons((2, 3), 6, QUICK)
    b = maximize_over_polygons((2, 3), 6, QUICK)
    assert a.F == b.F
    assert np.array_equal(a.polygon.vertices, b.polygon.vertices)


def test_maximizer_nondecreasing_in_k():
    vals = [maximize_over_polygons((2, 4), k, QUICK).F for k in (6, 8, 12)]
    assert all(b >= a * (1 - 0.005) for a, b in zip(vals, vals[1:]))


def test_crossover_table_near_q_equal_p():
    tab = ball_vs_rectangle(2, [2.05, 4.0], h=0.1, L_grid=(1, 2, 3, 5))
    assert len(tab.rows) == 2
    assert tab.rows[0]["rectangle_wins"]
    assert tab.crossover_q == 2.05
