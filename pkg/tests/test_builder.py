from fractions import Fraction

import numpy as np
import pytest

from boxlab.builder import STAGES, FortressBuildFailed, build_fortress, check_goal
from boxlab.errors import PreconditionError
from boxlab.reduced import ReducedHypergraph, fortress_to_clique, is_reduced_clique, verify_fortress
from boxlab.systems import KMTree


def check_tree(Z, X0, m):
    assert Z.arity == m and Z.height == X0.height
    assert set(Z.leaves) <= set(X0.leaves)
    assert len(Z.leaves) == m**Z.height


def test_complete_2_4_system():
    T = KMTree.full(2, 4)
    A = ReducedHypergraph.complete(T.leaves, 2)
    res = build_fortress(A, T, r=2, m=2, eps=Fraction(1, 2), seed=0)
    check_tree(res.tree, T, 2)
    assert verify_fortress(A, res.fortress) == []
    K = fortress_to_clique(res.fortress)
    assert len(K.indices) == 4 and is_reduced_clique(A, K)


def test_emptied_constituent_fails_in_part_three():
    T = KMTree.full(2, 4)
    A = ReducedHypergraph.complete(T.leaves, 2)
    a, b, c = (0, 0), (0, 1), (1, 0)
    B = A.with_constituent(a, b, c, np.zeros((2, 2, 2), dtype=bool))
    with pytest.raises(FortressBuildFailed) as info:
        build_fortress(B, T, r=2, m=2, eps=Fraction(1, 2), seed=0)
    assert info.value.stage == "Part III admissibility"
    assert repr(a) in info.value.detail and repr(b) in info.value.detail and repr(c) in info.value.detail


def test_k1_is_the_base_sampler():
    T = KMTree.full(1, 3)
    A = ReducedHypergraph.complete([(0,), (1,), (2,), "y1", "y2"], 2)
    sel = {(x, y): 1 for x in T.leaves for y in ("y1", "y2")}
    res = build_fortress(A, T, [["y1", "y2"]], [sel], r=2, k=1, m=2, seed=0)
    check_tree(res.tree, T, 2)
    assert res.Y == [["y1", "y2"]]
    assert set(res.fortress.vertices) == {((0,), (1,), ())}


def test_extra_sets_and_goal():
    T = KMTree.full(2, 3)
    ys = ["y0", "y1", "y2"]
    A = ReducedHypergraph.complete(list(T.leaves) + ys, 2)
    sel = {(x, y): 0 for x in T.leaves for y in ys}
    res = build_fortress(A, T, [ys], [sel], r=3, k=2, m=2, seed=1)
    assert verify_fortress(A, res.fortress) == []
    assert check_goal(A, res.fortress, res.Y, [sel]) == []
    assert res.Y == [ys]


def test_height_three_binary():
    T = KMTree.full(3, 3)
    A = ReducedHypergraph.complete(T.leaves, 2)
    res = build_fortress(A, T, r=3, m=2, seed=2)
    check_tree(res.tree, T, 2)
    assert verify_fortress(A, res.fortress) == []
    assert is_reduced_clique(A, fortress_to_clique(res.fortress))


def test_dense_random_host():
    T = KMTree.full(2, 4)
    A = ReducedHypergraph.random(T.leaves, 3, 0.97, seed=5)
    try:
        res = build_fortress(A, T, r=2, m=2, seed=3, retries=200)
    except FortressBuildFailed as exc:
        assert exc.stage in STAGES
    else:
        assert verify_fortress(A, res.fortress) == []


def test_input_validation():
    T = KMTree.full(2, 3)
    A = ReducedHypergraph.complete(T.leaves, 2)
    with pytest.raises(ValueError):
        build_fortress(A, T, r=2, k=3)
    with pytest.raises(PreconditionError):
        build_fortress(A, T, r=2, m=4)
    with pytest.raises(ValueError):
        build_fortress(A, T, r=3, m=2)  # one extra set expected


def test_inadmissible_input_selection():
    T = KMTree.full(1, 2)
    ys = ["y"]
    A = ReducedHypergraph.complete(list(T.leaves) + ys, 2)
    for p in range(2):
        A = A.without_edge((0,), (1,), "y", p, 0, 0)
    sel = {((0,), "y"): 0, ((1,), "y"): 0}
    with pytest.raises(PreconditionError):
        build_fortress(A, T, [ys], [sel], r=2, k=1, m=2, seed=0)


def test_seeded_runs_are_reproducible():
    T = KMTree.full(2, 4)
    A = ReducedHypergraph.random(T.leaves, 2, 0.99, seed=1)
    outs = []
    for _ in range(2):
        try:
            res = build_fortress(A, T, r=2, m=2, seed=9, retries=100)
            outs.append((res.tree, res.fortress.vertices))
        except FortressBuildFailed as exc:
            outs.append((exc.stage, exc.detail))
    assert outs[0] == outs[1]
