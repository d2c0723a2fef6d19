import json

import numpy as np
import pytest
from scipy.optimize import linprog

import lipcert as lc
from lipcert import (
    InfeasibleRegionError,
    ModelFormatError,
    Polyhedron,
    affine_preimage,
    coordinate_bounds,
    is_feasible,
    linear_bounds,
    region_from_json,
    stack,
)
from lipcert.polyhedra import feasible_point, minimize_point, support_value


def test_row_normalization_and_dedup():
    P = Polyhedron([[2.0, 0.0], [1.0, 0.0], [0.0, 3.0]], [4.0, 2.0, 6.0])
    assert P.m == 2
    np.testing.assert_allclose(P.C, [[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(P.c, [2.0, 2.0])


def test_zero_rows():
    # 0 <= 1 is vacuous and dropped, 0 <= -1 marks infeasibility and stays
    P = Polyhedron([[0.0], [1.0]], [1.0, 3.0])
    assert P.m == 1
    Q = Polyhedron([[0.0]], [-1.0])
    assert Q.m == 1
    assert not is_feasible(Q)


def test_universe_and_box():
    U = Polyhedron.universe(3)
    assert U.m == 0 and U.dim == 3
    assert U.contains([100.0, -50.0, 0.0])
    B = Polyhedron.from_box([-1.0, -np.inf], [1.0, 2.0])
    assert B.m == 3
    assert B.contains([0.0, -1000.0])
    assert not B.contains([0.0, 2.5])


def test_contains_is_closed():
    B = Polyhedron.from_box([0.0], [1.0])
    assert B.contains([0.0]) and B.contains([1.0])
    assert not B.contains([1.0 + 1e-6])


def test_read_only():
    P = Polyhedron.from_box([0.0], [1.0])
    with pytest.raises(ValueError):
        P.C[0, 0] = 9.0


def test_stack():
    P = Polyhedron.from_box([0.0], [2.0])
    Q = Polyhedron([[1.0]], [1.0])
    S = stack(P, Q)
    assert S.contains([0.5]) and not S.contains([1.5])
    with pytest.raises(ValueError):
        stack(P, Polyhedron.universe(2))


def test_feasibility():
    assert is_feasible(Polyhedron.universe(2))
    assert not is_feasible(Polyhedron([[1.0], [-1.0]], [-1.0, -1.0]))
    x = feasible_point(Polyhedron.from_box([3.0, -1.0], [4.0, 0.0]))
    assert x is not None and 3.0 - 1e-9 <= x[0] <= 4.0 + 1e-9


def test_linear_bounds_examples():
    B = Polyhedron.from_box([-1.0], [1.0])
    lo, hi = linear_bounds(B, [1.0])
    assert lo == pytest.approx(-1.0, abs=1e-9)
    assert hi == pytest.approx(1.0, abs=1e-9)
    lo, hi = linear_bounds(Polyhedron.universe(1), [1.0])
    assert lo == -np.inf and hi == np.inf
    with pytest.raises(InfeasibleRegionError):
        linear_bounds(Polyhedron([[1.0], [-1.0]], [-1.0, -1.0]), [1.0])


def test_linear_bounds_triangle_vertices():
    # triangle (0,0), (1,0), (0,1); objective (1,1) spans [0, 1]
    T = Polyhedron([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])
    lo, hi = linear_bounds(T, [1.0, 1.0])
    assert lo == pytest.approx(0.0, abs=1e-9)
    assert hi == pytest.approx(1.0, abs=1e-9)
    assert support_value(T, [1.0, 1.0]) == pytest.approx(1.0, abs=1e-9)


def test_linear_bounds_cross_check_scipy():
    rng = np.random.default_rng(8)
    for _ in range(60):
        d = int(rng.integers(1, 4))
        lo = rng.uniform(-2.0, 0.0, size=d)
        hi = rng.uniform(0.1, 2.0, size=d)
        P = Polyhedron.from_box(lo, hi)
        extra = rng.normal(size=(2, d))
        P = stack(P, Polyhedron(extra, extra @ ((lo + hi) / 2) + 0.5))
        obj = rng.normal(size=d)
        blo, bhi = linear_bounds(P, obj)
        for sign, val in ((1.0, blo), (-1.0, -bhi)):
            ref = linprog(sign * obj, A_ub=P.C, b_ub=P.c,
                          bounds=[(None, None)] * d, method="highs")
            assert ref.status == 0
            assert val == pytest.approx(ref.fun, rel=1e-7, abs=1e-7)


def test_linear_bounds_sandwich_random_points():
    rng = np.random.default_rng(9)
    P = Polyhedron([[1.0, 1.0], [-1.0, 2.0], [0.0, -1.0]], [2.0, 1.0, 0.5])
    obj = np.array([0.7, -0.3])
    lo, hi = linear_bounds(P, obj)
    pts = 0
    while pts < 200:
        x = rng.uniform(-4, 4, size=2)
        if P.contains(x):
            v = obj @ x
            assert lo - 1e-9 <= v <= hi + 1e-9
            pts += 1


def test_minimize_point():
    B = Polyhedron.from_box([-1.0, -1.0], [1.0, 1.0])
    x = minimize_point(B, [1.0, 1.0])
    np.testing.assert_allclose(x, [-1.0, -1.0], atol=1e-9)
    assert minimize_point(Polyhedron.universe(1), [1.0]) is None


def test_coordinate_bounds():
    P = Polyhedron([[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], [1.0, 0.0, 0.0])
    lo, hi = coordinate_bounds(P)
    np.testing.assert_allclose(lo, [0.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(hi, [1.0, 1.0], atol=1e-9)
    lo, hi = coordinate_bounds(Polyhedron.universe(2))
    assert np.all(np.isinf(lo)) and np.all(np.isinf(hi))


def test_affine_preimage_membership():
    # preimage of [0, inf) under x -> x - 1 is x >= 1
    Q = Polyhedron([[-1.0]], [0.0])
    P = affine_preimage(Q, [[1.0]], [-1.0])
    assert P.contains([1.0]) and P.contains([2.0])
    assert not P.contains([0.5])


def test_affine_preimage_random_equivalence():
    rng = np.random.default_rng(10)
    for _ in range(40):
        dq, dp = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        Q = Polyhedron(rng.normal(size=(3, dq)), rng.uniform(0.5, 2.0, size=3))
        J = rng.normal(size=(dq, dp))
        b = rng.normal(size=dq)
        P = affine_preimage(Q, J, b)
        for _ in range(25):
            x = rng.normal(size=dp)
            assert P.contains(x, tol=1e-9) == Q.contains(J @ x + b, tol=1e-9) or (
                # row normalization rescales tolerances; decide off the boundary
                min(np.abs(Q.C @ (J @ x + b) - Q.c)) < 1e-6)


def test_region_json_forms():
    R = region_from_json({"global": 2})
    assert R.m == 0 and R.dim == 2
    R = region_from_json({"box": {"lower": [-1.0, None], "upper": [1.0, 0.0]}})
    assert R.dim == 2
    assert R.contains([0.0, -99.0]) and not R.contains([0.0, 0.5])
    R = region_from_json({"dim": 2, "C": [[1.0, 0.0]], "c": [3.0]})
    assert R.contains([2.0, 50.0]) and not R.contains([3.5, 0.0])


def test_region_json_errors(tmp_path):
    for bad in [
        {"box": {"lower": [0.0], "upper": [1.0, 2.0]}},
        {"dim": 2, "C": [[1.0, 0.0]]},
        {"global": 0},
        {"box": {"lower": [2.0], "upper": [1.0]}},
        [],
    ]:
        with pytest.raises(ModelFormatError):
            region_from_json(bad)
    p = tmp_path / "r.json"
    p.write_text("{not json")
    with pytest.raises(ModelFormatError):
        lc.load_region(str(p))


def test_load_region_roundtrip(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"box": {"lower": [-2.0], "upper": [2.0]}}))
    R = lc.load_region(str(p))
    assert R.contains([1.5]) and not R.contains([2.5])
