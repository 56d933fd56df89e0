import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boxlab.construct import (
    AuditSpec,
    EdgeColouring,
    audit_density,
    build_hypergraph,
    colour_class_pairs,
    random_colouring,
)
from boxlab.hypercore import PairSet, find_clique
from boxlab.palette import Palette, all_patterns, standard_palette
from oracles import edges_of, naive_palette_hypergraph


def test_single_colour():
    phi = random_colouring(10, 1, seed=0)
    assert all(c == 1 for _, _, c in phi.pairs())
    assert colour_class_pairs(phi, 1) == PairSet.all_pairs(10)


def test_colouring_deterministic():
    assert random_colouring(40, 3, seed=11) == random_colouring(40, 3, seed=11)
    assert random_colouring(40, 3, seed=11) != random_colouring(40, 3, seed=12)


def test_class_sizes_binomial():
    n = 1000
    phi = random_colouring(n, 3, seed=2)
    N = n * (n - 1) // 2
    sigma = (N * (1 / 3) * (2 / 3)) ** 0.5
    for size in phi.class_sizes().values():
        assert abs(size - N / 3) <= 3 * sigma


def test_colour_classes_partition():
    n = 300
    phi = random_colouring(n, 3, seed=5)
    mats = [colour_class_pairs(phi, c).matrix for c in (1, 2, 3)]
    total = sum(m.astype(int) for m in mats)
    off = ~np.eye(n, dtype=bool)
    assert np.all(total[off] == 1) and np.all(total[~off] == 0)
    N = n * (n - 1)
    sigma = (N * (1 / 3) * (2 / 3)) ** 0.5
    for m in mats:
        assert abs(int(m.sum()) - N / 3) <= 3 * sigma * 2  # ordered pairs come in symmetric twins
    with pytest.raises(ValueError):
        colour_class_pairs(phi, 4)


def test_trivial_palettes():
    phi = random_colouring(12, 3, seed=1)
    assert build_hypergraph(phi, Palette(3, all_patterns(3))).num_edges == 220
    assert build_hypergraph(phi, Palette(3, [])).num_edges == 0
    with pytest.raises(ValueError):
        build_hypergraph(phi, standard_palette("two_colour_nonmono"))


def test_cyclic_hypergraph_matches_loop():
    phi = random_colouring(30, 3, seed=4)
    P = standard_palette("cyclic3")
    H = build_hypergraph(phi, P)
    assert edges_of(H) == naive_palette_hypergraph(30, phi.colour, list(P))


pattern_st = st.tuples(*[st.integers(1, 3)] * 3)


@settings(max_examples=25, deadline=None)
@given(st.lists(pattern_st, max_size=8), st.lists(pattern_st, max_size=8), st.integers(0, 10**6))
def test_union_of_palettes(p1, p2, seed):
    phi = random_colouring(9, 3, seed=seed)
    A, B = Palette(3, p1), Palette(3, p2)
    union = build_hypergraph(phi, A | B)
    assert union == build_hypergraph(phi, A).union(build_hypergraph(phi, B))
    assert edges_of(union) == naive_palette_hypergraph(9, phi.colour, list(A | B))


def test_from_pairs_validation():
    with pytest.raises(ValueError):
        EdgeColouring.from_pairs(3, 2, [(0, 1, 1), (0, 2, 1)])
    phi = EdgeColouring.from_pairs(3, 2, [(0, 1, 1), (0, 2, 2), (1, 2, 1)])
    assert phi.colour(2, 0) == 2


def test_audit_all_patterns_is_one():
    phi = random_colouring(20, 2, seed=3)
    H = build_hypergraph(phi, Palette(2, all_patterns(2)))
    rep = audit_density(H, phi, Palette(2, all_patterns(2)), AuditSpec(seed=1))
    assert rep.min_ratio == 1 and rep.all_hold


@pytest.mark.parametrize("name,target", [("cyclic3", 1 / 3), ("exactly_two_of_three", 2 / 3)])
def test_colour_class_ratios(name, target):
    P = standard_palette(name)
    phi = random_colouring(300, 3, seed=21)
    H = build_hypergraph(phi, P)
    rep = audit_density(H, phi, P, AuditSpec(families=("colour",), seed=0))
    assert abs(float(rep.min_ratio) - target) <= 0.03
    assert rep.all_hold
    # each (c, c') row tracks the compatible-third-colour share of that pair
    for row in rep.rows:
        c, c2 = (int(s[s.index("(") + 1]) for s in row.label.split("x"))
        share = sum(tuple(sorted((c, c2, c3))) in P for c3 in (1, 2, 3)) / 3
        assert abs(float(row.ratio) - share) <= 0.03


def test_audit_skips_empty_families():
    phi = random_colouring(6, 3, seed=0)
    P = standard_palette("cyclic3")
    H = build_hypergraph(phi, P)
    rep = audit_density(H, phi, P, AuditSpec(families=("product",), product_trials=3, seed=3))
    assert len(rep.rows) + len(rep.notes) == 3


def test_audit_spec_validation():
    with pytest.raises(ValueError):
        AuditSpec(random_densities=(0.0,))
    with pytest.raises(ValueError):
        AuditSpec(random_trials=0)


@pytest.mark.parametrize("seed", range(3))
def test_cyclic3_has_no_k5(seed):
    phi = random_colouring(40, 3, seed=seed)
    H = build_hypergraph(phi, standard_palette("cyclic3"))
    assert not find_clique(H, 5).found
