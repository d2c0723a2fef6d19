import itertools
import math

import numpy as np
import pytest

import lipcert as lc
from lipcert import (
    ComponentwiseActivation,
    GroupSortActivation,
    IdentityActivation,
    MaxPoolActivation,
    NormPair,
    fullsort,
    groupsort,
    leaky_relu,
    maxmin,
    prelu,
    relu,
    spline,
)

ALL_PAIRS = [NormPair(1, 1), NormPair(2, 2), NormPair(np.inf, np.inf)]


def lowest_piece_at(pieces, x):
    for np_ in pieces:
        if np_.region.contains(x):
            return np_
    return None


def group_ids(act):
    return [g for g, _ in act.branch_groups()]


# componentwise

def test_relu_decomposition_shape():
    act = relu(2)
    pieces = act.neuron_decomposition(0)
    assert len(pieces) == 2
    inactive, active = pieces
    assert inactive.fixed_neurons == (0,)
    np.testing.assert_array_equal(inactive.piece.T, [[0.0, 0.0]])
    np.testing.assert_array_equal(active.piece.T, [[1.0, 0.0]])
    assert inactive.region.contains([-1.0, 99.0])
    assert active.region.contains([1.0, -99.0])
    # pieces meet on the breakpoint face
    assert inactive.region.contains([0.0, 0.0])
    assert active.region.contains([0.0, 0.0])


def test_relu_piece_intervals():
    act = relu(1)
    assert act.piece_interval(0) == (-np.inf, 0.0)
    assert act.piece_interval(1) == (0.0, np.inf)


def test_spline_three_pieces():
    # hinge at -1 and 1, slopes 0 / 1 / 0, clamps to [-?]: pick continuous intercepts
    act = spline(1, breakpoints=[-1.0, 1.0], slopes=[[0.0, 1.0, 0.0]],
                 intercepts=[[-1.0, 0.0, 1.0]])
    pieces = act.neuron_decomposition(0)
    assert len(pieces) == 3
    assert act.evaluate([-5.0]) == pytest.approx(-1.0)
    assert act.evaluate([0.3]) == pytest.approx(0.3)
    assert act.evaluate([5.0]) == pytest.approx(1.0)
    assert act.activation_lipschitz(NormPair(2, 2)) == 1.0


def test_spline_continuity_enforced():
    with pytest.raises(ValueError):
        spline(1, breakpoints=[0.0], slopes=[[1.0, 1.0]], intercepts=[[0.0, 5.0]])
    with pytest.raises(ValueError):
        spline(1, breakpoints=[1.0, 0.0], slopes=[[1.0, 1.0, 1.0]],
               intercepts=[[0.0, 0.0, 0.0]])


def test_leaky_and_prelu():
    act = leaky_relu(2, 0.1)
    np.testing.assert_allclose(act.evaluate([-1.0, 2.0]), [-0.1, 2.0])
    assert act.activation_lipschitz(NormPair(np.inf, np.inf)) == 1.0
    act = prelu(2, [0.5, -2.0])
    np.testing.assert_allclose(act.evaluate([-1.0, -1.0]), [-0.5, 2.0])
    assert act.activation_lipschitz(NormPair(2, 2)) == 2.0


def test_componentwise_lowest_piece_tie_break():
    act = relu(1)
    piece = lowest_piece_at(act.neuron_decomposition(0), np.array([0.0]))
    # the inactive piece comes first at the shared breakpoint
    np.testing.assert_array_equal(piece.piece.T, [[0.0]])
    T, t, flagged = act.local_linearization(np.array([0.0]))
    np.testing.assert_array_equal(T, [[0.0]])
    assert flagged
    T, t, flagged = act.local_linearization(np.array([0.5]))
    np.testing.assert_array_equal(T, [[1.0]])
    assert not flagged


# groupsort family

def test_maxmin_pieces():
    act = maxmin(2)
    pieces = act.neuron_decomposition(0)
    assert len(pieces) == 2
    twin = act.neuron_decomposition(1)
    assert [p.fixed_neurons for p in twin] == [p.fixed_neurons for p in pieces]
    for np_ in pieces:
        assert np_.fixed_neurons == (0, 1)
    # ascending sort: identity when x0 <= x1, swap otherwise
    mats = {tuple(map(tuple, np_.piece.T)) for np_ in pieces}
    assert ((1.0, 0.0), (0.0, 1.0)) in mats
    assert ((0.0, 1.0), (1.0, 0.0)) in mats
    np.testing.assert_allclose(act.evaluate([3.0, 1.0]), [1.0, 3.0])
    np.testing.assert_allclose(act.evaluate([1.0, 3.0]), [1.0, 3.0])


def test_fullsort_factorial_pieces():
    for width in (2, 3, 4):
        act = fullsort(width)
        pieces = act.neuron_decomposition(0)
        assert len(pieces) == math.factorial(width)
        for np_ in pieces:
            assert np_.fixed_neurons == tuple(range(width))
            # permutation matrix rows
            T = np_.piece.T
            assert np.all(T.sum(axis=0) == 1.0) and np.all(T.sum(axis=1) == 1.0)


def test_groupsort_remainder_group():
    act = groupsort(5, 2)
    assert group_ids(act) == [(0, 1), (2, 3), (4,)]
    assert len(act.neuron_decomposition(4)) == 1
    x = np.array([5.0, -1.0, 2.0, 0.0, 7.0])
    np.testing.assert_allclose(act.evaluate(x), [-1.0, 5.0, 0.0, 2.0, 7.0])


def test_groupsort_size_cap():
    with pytest.raises(ValueError):
        groupsort(8, 8)
    fullsort(7)  # boundary size is allowed
    with pytest.raises(ValueError):
        fullsort(8)


def test_groupsort_matches_numpy_sort():
    rng = np.random.default_rng(12)
    for width, gs in [(2, 2), (3, 3), (6, 3), (5, 4)]:
        act = groupsort(width, gs)
        for _ in range(200):
            x = rng.normal(size=width)
            out = act.evaluate(x)
            for g in group_ids(act):
                np.testing.assert_allclose(out[list(g)], np.sort(x[list(g)]))


def test_groupsort_lipschitz_one():
    for pair in ALL_PAIRS:
        assert maxmin(4).activation_lipschitz(pair) == 1.0
        assert fullsort(3).activation_lipschitz(pair) == 1.0


def test_groupsort_local_linearization_boundary():
    act = maxmin(2)
    T, t, flagged = act.local_linearization(np.array([1.0, 1.0]))
    assert flagged
    np.testing.assert_allclose(T @ np.array([1.0, 1.0]) + t, [1.0, 1.0])
    T, t, flagged = act.local_linearization(np.array([2.0, 1.0]))
    assert not flagged
    np.testing.assert_array_equal(T, [[0.0, 1.0], [1.0, 0.0]])


# maxpool

def test_maxpool_basic():
    act = MaxPoolActivation(2, [(0, 1)])
    assert act.in_width == 2 and act.out_width == 1
    assert act.evaluate([0.5, -2.0]) == pytest.approx(0.5)
    pieces = act.neuron_decomposition(0)
    assert len(pieces) == 2
    chosen = {tuple(np_.piece.T[0]) for np_ in pieces}
    assert chosen == {(1.0, 0.0), (0.0, 1.0)}
    for np_ in pieces:
        assert np_.fixed_neurons == (0,)


def test_maxpool_windows_validated():
    with pytest.raises(ValueError):
        MaxPoolActivation(3, [(0, 1), (1, 2)])  # overlap
    with pytest.raises(ValueError):
        MaxPoolActivation(2, [(0,), ()])
    with pytest.raises(ValueError):
        MaxPoolActivation(2, [(0, 5)])


def test_maxpool_uncovered_inputs_are_dropped():
    act = MaxPoolActivation(3, [(0, 1)])
    assert act.out_width == 1
    assert act.evaluate([1.0, 2.0, 99.0]) == pytest.approx(2.0)


def test_maxpool_first_argmax_tie_break():
    act = MaxPoolActivation(2, [(0, 1)])
    T, t, flagged = act.local_linearization(np.array([1.0, 1.0]))
    assert flagged
    np.testing.assert_array_equal(T, [[1.0, 0.0]])
    assert act.activation_lipschitz(NormPair(np.inf, np.inf)) == 1.0


def test_maxpool_multi_window():
    act = MaxPoolActivation(4, [(0, 1), (2, 3)])
    np.testing.assert_allclose(act.evaluate([1.0, 3.0, -5.0, -2.0]), [3.0, -2.0])
    assert act.out_width == 2
    assert group_ids(act) == [(0,), (1,)]


# identity

def test_identity():
    act = IdentityActivation(3)
    x = np.array([1.0, -2.0, 3.0])
    np.testing.assert_array_equal(act.evaluate(x), x)
    assert len(act.neuron_decomposition(1)) == 1
    assert act.activation_lipschitz(NormPair(1, 1)) == 1.0
    _, _, flagged = act.local_linearization(x)
    assert not flagged


# shared properties

ACTS = [
    relu(3),
    leaky_relu(2, 0.1),
    prelu(2, [0.3, 1.7]),
    spline(2, [-1.0, 1.0], [[0.0, 1.0, 0.0], [1.0, 0.5, 2.0]],
           [[-1.0, 0.0, 1.0], [0.5, 0.0, -1.5]]),
    maxmin(4),
    fullsort(3),
    groupsort(5, 3),
    MaxPoolActivation(4, [(0, 1, 2), (3,)]),
    IdentityActivation(2),
]


@pytest.mark.parametrize("act", ACTS, ids=lambda a: repr(a))
def test_pieces_cover_space(act):
    rng = np.random.default_rng(13)
    for _ in range(300):
        x = rng.normal(size=act.in_width) * 3.0
        for _, pieces in act.branch_groups():
            assert lowest_piece_at(pieces, x) is not None


@pytest.mark.parametrize("act", ACTS, ids=lambda a: repr(a))
def test_piece_map_matches_evaluate(act):
    rng = np.random.default_rng(14)
    for _ in range(300):
        x = rng.normal(size=act.in_width) * 3.0
        y = act.evaluate(x)
        for key, pieces in act.branch_groups():
            np_ = lowest_piece_at(pieces, x)
            out = np_.piece.T @ x + np_.piece.t
            # ties can pick a different but value-equal piece
            np.testing.assert_allclose(out, y[list(key)], atol=1e-9)


@pytest.mark.parametrize("act", ACTS, ids=lambda a: repr(a))
def test_local_linearization_consistent(act):
    rng = np.random.default_rng(15)
    for _ in range(200):
        x = rng.normal(size=act.in_width) * 3.0
        T, t, flagged = act.local_linearization(x)
        np.testing.assert_allclose(T @ x + t, act.evaluate(x), atol=1e-9)
        if not flagged:
            # the same piece holds in a small neighborhood
            for _ in range(5):
                dx = rng.normal(size=act.in_width) * 1e-12
                np.testing.assert_allclose(T @ (x + dx) + t, act.evaluate(x + dx),
                                           atol=1e-9)


@pytest.mark.parametrize("act", ACTS, ids=lambda a: repr(a))
def test_evaluate_is_activation_lipschitz(act):
    rng = np.random.default_rng(16)
    for pair in ALL_PAIRS:
        L = act.activation_lipschitz(pair)
        for _ in range(100):
            x = rng.normal(size=act.in_width) * 2.0
            y = rng.normal(size=act.in_width) * 2.0
            dxy = np.linalg.norm(x - y, ord=pair.p)
            dfxy = np.linalg.norm(act.evaluate(x) - act.evaluate(y), ord=pair.q)
            assert dfxy <= L * dxy + 1e-9


def test_branch_groups_cover_all_neurons():
    for act in ACTS:
        flat = sorted(n for g in group_ids(act) for n in g)
        assert flat == list(range(act.out_width))


def test_star_pieces_are_parameter_distinct():
    # the relu pieces genuinely differ, so a mixed region yields a star
    act = relu(1)
    a, b = act.neuron_decomposition(0)
    assert not np.array_equal(a.piece.T, b.piece.T)
