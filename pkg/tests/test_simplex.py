import numpy as np
import pytest
from scipy.optimize import linprog

from lipcert.simplex import FEAS_TOL, LpResult, feasible_point, solve_lp


def test_simple_bounded_lp():
    # min x0 + x1 over the triangle x0 >= 0, x1 >= 0, x0 + x1 >= 1 is 1
    A = np.array([[-1.0, 0.0], [0.0, -1.0], [-1.0, -1.0]])
    b = np.array([0.0, 0.0, -1.0])
    res = solve_lp(A, b, np.array([1.0, 1.0]))
    assert res.status == "optimal"
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert np.all(A @ res.x <= b + FEAS_TOL)


def test_vertex_solution():
    # min x0 - x1 over the triangle with vertices (0,0), (1,0), (0,1) is -1 at (0,1)
    A = np.array([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]])
    b = np.array([0.0, 0.0, 1.0])
    res = solve_lp(A, b, np.array([1.0, -1.0]))
    assert res.status == "optimal"
    assert res.value == pytest.approx(-1.0, abs=1e-9)
    np.testing.assert_allclose(res.x, [0.0, 1.0], atol=1e-9)


def test_infeasible():
    # x <= -1 and x >= 1
    A = np.array([[1.0], [-1.0]])
    b = np.array([-1.0, -1.0])
    res = solve_lp(A, b, np.array([1.0]))
    assert res.status == "infeasible"
    assert feasible_point(A, b) is None


def test_unbounded():
    # min -x subject to x >= 0
    res = solve_lp(np.array([[-1.0]]), np.array([0.0]), np.array([-1.0]))
    assert res.status == "unbounded"


def test_free_variables():
    # min x over -3 <= x <= 5 with x free (negative optimum)
    A = np.array([[-1.0], [1.0]])
    b = np.array([3.0, 5.0])
    res = solve_lp(A, b, np.array([1.0]))
    assert res.status == "optimal"
    assert res.value == pytest.approx(-3.0, abs=1e-9)


def test_no_constraints_unbounded():
    res = solve_lp(np.zeros((0, 2)), np.zeros(0), np.array([1.0, 0.0]))
    assert res.status == "unbounded"
    res = solve_lp(np.zeros((0, 2)), np.zeros(0), np.zeros(2))
    assert res.status == "optimal"
    assert res.value == 0.0


def test_degenerate_redundant_rows():
    # duplicated and implied rows must not break phase 1
    A = np.array([[1.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    b = np.array([1.0, 1.0, 2.0, 1.0, 0.0, 0.0])
    res = solve_lp(A, b, np.array([-1.0, -1.0]))
    assert res.status == "optimal"
    assert res.value == pytest.approx(-2.0, abs=1e-9)


def test_equality_via_paired_rows():
    # x0 + x1 = 1 encoded as two inequalities, minimize x0
    A = np.array([[1.0, 1.0], [-1.0, -1.0], [-1.0, 0.0]])
    b = np.array([1.0, -1.0, 0.0])
    res = solve_lp(A, b, np.array([1.0, 0.0]))
    assert res.status == "optimal"
    assert res.value == pytest.approx(0.0, abs=1e-9)
    assert res.x[0] + res.x[1] == pytest.approx(1.0, abs=1e-9)


def random_bounded_lp(rng, d, m):
    """Feasible by construction around x0, bounded by a box."""
    A = rng.normal(size=(m, d))
    x0 = rng.normal(size=d)
    b = A @ x0 + rng.uniform(0.1, 2.0, size=m)
    box = np.vstack([np.eye(d), -np.eye(d)])
    box_b = np.full(2 * d, 10.0 + np.abs(x0).max())
    return np.vstack([A, box]), np.concatenate([b, box_b])


def test_cross_check_against_scipy():
    rng = np.random.default_rng(5)
    for _ in range(150):
        d = int(rng.integers(1, 5))
        m = int(rng.integers(1, 7))
        A, b = random_bounded_lp(rng, d, m)
        cost = rng.normal(size=d)
        res = solve_lp(A, b, cost)
        ref = linprog(cost, A_ub=A, b_ub=b, bounds=[(None, None)] * d, method="highs")
        assert res.status == "optimal"
        assert ref.status == 0
        assert res.value == pytest.approx(ref.fun, rel=1e-7, abs=1e-7)
        assert np.all(A @ res.x <= b + 1e-7)


def test_cross_check_infeasible_detection():
    rng = np.random.default_rng(6)
    hits = 0
    for _ in range(60):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(d + 1, d + 5))
        A = rng.normal(size=(m, d))
        b = rng.normal(size=m) - 1.5
        res = solve_lp(A, b, np.zeros(d))
        ref = linprog(np.zeros(d), A_ub=A, b_ub=b, bounds=[(None, None)] * d, method="highs")
        if ref.status == 2:
            assert res.status == "infeasible"
            hits += 1
        elif ref.status == 0:
            assert res.status == "optimal"
    assert hits > 5


def test_feasible_point_certificate():
    rng = np.random.default_rng(7)
    for _ in range(50):
        d = int(rng.integers(1, 4))
        A, b = random_bounded_lp(rng, d, int(rng.integers(1, 6)))
        x = feasible_point(A, b)
        assert x is not None
        assert np.all(A @ x <= b + FEAS_TOL)


def test_result_type():
    res = solve_lp(np.array([[1.0]]), np.array([1.0]), np.array([1.0]))
    assert isinstance(res, LpResult)
    assert res.status == "unbounded"
