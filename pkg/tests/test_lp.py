"""Oracle tests for the feasibility kernel.

Every value asserted here was computed by hand from the geometry of
the test polytope, so these double as regression pins on the simplex
implementation.
"""

import math

import numpy as np
import pytest

from tropcap import lp
from tropcap.errors import NumericalError


def test_interval_midpoint_slack():
    # x >= 0 and x <= 1: the deepest point is 0.5 with slack 0.5.
    slack, x, _ = lp.max_slack_point(
        np.array([[1.0], [-1.0]]), np.array([0.0, 1.0]), 1
    )
    assert abs(slack - 0.5) < 1e-9
    assert abs(x[0] - 0.5) < 1e-9


def test_triangle_inradius():
    # x >= 0, y >= 0, x + y <= 1: the Chebyshev radius is 1/(2+sqrt(2)).
    normals = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    offsets = np.array([0.0, 0.0, 1.0])
    slack, x, _ = lp.max_slack_point(normals, offsets, 2)
    r = 1.0 / (2.0 + math.sqrt(2.0))
    assert abs(slack - r) < 1e-9
    assert abs(x[0] - r) < 1e-8 and abs(x[1] - r) < 1e-8


def test_box_auto_growth():
    # x >= 1e7 lies outside the default box; the box must grow and the
    # optimum then sits on the far wall at x = 1e8.
    slack, x, radius = lp.max_slack_point(np.array([[1.0]]), np.array([-1e7]), 1)
    assert radius >= 1e8
    assert abs(slack - 9e7) / 9e7 < 1e-9
    assert x[0] > 1e7


def test_infeasible_interval():
    # x >= 1 and x <= 0 cannot be satisfied.
    slack, _, _ = lp.max_slack_point(np.array([[1.0], [-1.0]]), np.array([-1.0, 0.0]), 1)
    assert slack <= lp.EPS_LP


def test_unit_normalization_invariance():
    rng = np.random.default_rng(0)
    W = rng.normal(size=(6, 3))
    b = rng.normal(size=6)
    s1, x1, _ = lp.max_slack_point(W, b, 3, normalize=True)
    scale = rng.uniform(0.5, 10.0, size=6)
    s2, x2, _ = lp.max_slack_point(W * scale[:, None], b * scale, 3, normalize=True)
    assert abs(s1 - s2) < 1e-7
    assert np.allclose(x1, x2, atol=1e-5)


def test_maximize_linear_triangle():
    # max x + y over the triangle x,y >= 0, x + y <= 1 is 1.
    normals = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    offsets = np.array([0.0, 0.0, 1.0])
    out = lp.maximize_linear(np.array([1.0, 1.0]), normals, offsets)
    assert out.status == "optimal"
    assert abs(out.value - 1.0) < 1e-8
    assert np.all(normals @ out.x + offsets >= -1e-9)


def test_solve_bounded_known_optimum():
    # max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x, y >= 0 -> 12 at (4, 0).
    res = lp.solve_bounded(
        np.array([3.0, 2.0]),
        np.array([[-1.0, -1.0], [-1.0, -3.0]]),
        np.array([4.0, 6.0]),
        np.zeros(2),
        np.full(2, 100.0),
    )
    assert res.status == "optimal"
    assert abs(res.value - 12.0) < 1e-8
    assert np.allclose(res.x, [4.0, 0.0], atol=1e-8)


def test_solve_bounded_infeasible_status():
    res = lp.solve_bounded(
        np.array([1.0]),
        np.array([[1.0], [-1.0]]),
        np.array([-2.0, 1.0]),  # x >= 2 and x <= 1
        np.zeros(1),
        np.full(1, 10.0),
    )
    assert res.status == "infeasible"


def test_normalize_rows_rejects_nothing_but_scales():
    W = np.array([[3.0, 4.0], [0.0, 2.0]])
    b = np.array([5.0, 4.0])
    Wn, bn = lp.normalize_rows(W, b)
    assert np.allclose(np.linalg.norm(Wn, axis=1), 1.0)
    assert abs(bn[0] - 1.0) < 1e-12
    assert abs(bn[1] - 2.0) < 1e-12


def test_slack_witness_consistency():
    # The returned slack must be recomputed at the witness, not read
    # off the tableau.
    rng = np.random.default_rng(4)
    for _ in range(25):
        W = rng.normal(size=(8, 3))
        b = rng.normal(size=8)
        slack, x, _ = lp.max_slack_point(W, b, 3)
        if slack > lp.EPS_LP:
            Wn, bn = lp.normalize_rows(W, b)
            assert abs(np.min(Wn @ x + bn) - slack) < 1e-9
