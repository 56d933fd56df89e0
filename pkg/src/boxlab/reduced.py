"""Reduced hypergraphs, admissible selections, cliques and fortresses.

A reduced hypergraph has an index set ``I``, a nonempty vertex class for
every pair of indices and, for every triple ``{i, j, k}``, a tripartite
constituent on the classes of ``{i, j}``, ``{i, k}`` and ``{j, k}``.
Class vertices are the integers ``0..size-1`` of their class.

Each constituent is stored once, for the triple in declared index order,
as a boolean array with axes ``(ij, ik, jk)``.  :meth:`ReducedHypergraph.constituent`
returns the transposed view for any other order of the same three indices.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import PreconditionError, StructuralError
from .hypercore import CliqueResult, CliqueVerdict
from .systems import KMTree, q_set, wedge

__all__ = [
    "ReducedHypergraph",
    "DenseCheck",
    "ReducedClique",
    "Fortress",
    "BaseSelection",
    "check_box_dense",
    "check_admissible",
    "find_reduced_clique",
    "is_reduced_clique",
    "verify_fortress",
    "fortress_to_clique",
    "clique_to_fortress",
    "draw_base_selection",
    "sample_base_selection",
    "admissibility_level",
]


def _frac(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def admissibility_level(r: int, eps) -> Fraction:
    """The selection threshold ``(r-2)/(r-1) + eps``."""
    if r < 2:
        raise ValueError("r must be at least 2")
    return Fraction(r - 2, r - 1) + _frac(eps)


class ReducedHypergraph:
    """Index set, vertex classes and constituents of a reduced hypergraph."""

    def __init__(self, indices: Sequence[Hashable], class_sizes: Mapping, constituents: Mapping | None = None):
        indices = tuple(indices)
        if len(set(indices)) != len(indices):
            raise ValueError("indices must be distinct")
        self.indices = indices
        self._pos = {i: p for p, i in enumerate(indices)}
        sizes: dict[frozenset, int] = {}
        for key, size in class_sizes.items():
            i, j = tuple(key)
            self._check_index(i)
            self._check_index(j)
            if int(size) != size or size < 1:
                raise ValueError(f"class {{{i}, {j}}} must be nonempty, got size {size}")
            sizes[frozenset((i, j))] = int(size)
        for i, j in itertools.combinations(indices, 2):
            if frozenset((i, j)) not in sizes:
                raise ValueError(f"no vertex class for pair {{{i!r}, {j!r}}}")
        self._sizes = sizes
        self._cons: dict[tuple, np.ndarray] = {}
        for triple in itertools.combinations(indices, 3):
            self._cons[triple] = np.zeros(self._shape(triple), dtype=bool)
        for key, arr in (constituents or {}).items():
            i, j, k = key
            arr = np.asarray(arr, dtype=bool)
            canon, axes = self._canon(i, j, k)
            # arr has axes (ij, ik, jk) for the given order; undo the view transpose
            want = tuple(self.class_size(*p) for p in ((i, j), (i, k), (j, k)))
            if arr.shape != want:
                raise ValueError(f"constituent {key!r} has shape {arr.shape}, expected {want}")
            self._cons[canon] = np.transpose(arr, np.argsort(axes)).copy()
        for arr in self._cons.values():
            arr.setflags(write=False)

    # construction helpers

    @classmethod
    def complete(cls, indices: Sequence, size: int = 1) -> "ReducedHypergraph":
        """Every constituent complete, every class of the given size."""
        sizes = {frozenset(p): size for p in itertools.combinations(indices, 2)}
        A = cls(indices, sizes)
        for key in A._cons:
            A._cons[key] = np.ones(A._shape(key), dtype=bool)
            A._cons[key].setflags(write=False)
        return A

    @classmethod
    def random(cls, indices: Sequence, size: int, p: float, seed=None) -> "ReducedHypergraph":
        """Each potential constituent edge present independently with probability p."""
        rng = np.random.default_rng(seed)
        sizes = {frozenset(q): size for q in itertools.combinations(indices, 2)}
        A = cls(indices, sizes)
        for key in A._cons:
            arr = rng.random(A._shape(key)) < p
            arr.setflags(write=False)
            A._cons[key] = arr
        return A

    def _copy(self) -> "ReducedHypergraph":
        new = object.__new__(ReducedHypergraph)
        new.indices = self.indices
        new._pos = self._pos
        new._sizes = self._sizes
        new._cons = dict(self._cons)
        return new

    def with_constituent(self, i, j, k, arr) -> "ReducedHypergraph":
        """Copy with constituent ``{i, j, k}`` replaced (``arr`` in axes ij, ik, jk)."""
        new = self._copy()
        canon, axes = self._canon(i, j, k)
        arr = np.asarray(arr, dtype=bool)
        want = self.constituent(i, j, k).shape
        if arr.shape != want:
            raise ValueError(f"constituent has shape {arr.shape}, expected {want}")
        stored = np.transpose(arr, np.argsort(axes)).copy()
        stored.setflags(write=False)
        new._cons[canon] = stored
        return new

    def without_edge(self, i, j, k, p: int, q: int, s: int) -> "ReducedHypergraph":
        arr = self.constituent(i, j, k).copy()
        arr[p, q, s] = False
        return self.with_constituent(i, j, k, arr)

    def with_edge(self, i, j, k, p: int, q: int, s: int) -> "ReducedHypergraph":
        arr = self.constituent(i, j, k).copy()
        arr[p, q, s] = True
        return self.with_constituent(i, j, k, arr)

    # queries

    def _check_index(self, i) -> None:
        if i not in self._pos:
            raise ValueError(f"unknown index {i!r}")

    def _shape(self, triple) -> tuple[int, int, int]:
        u, v, w = triple
        return (self.class_size(u, v), self.class_size(u, w), self.class_size(v, w))

    def _canon(self, i, j, k):
        # canonical triple plus, for each requested axis (ij, ik, jk), its axis in storage
        for x in (i, j, k):
            self._check_index(x)
        if len({i, j, k}) != 3:
            raise ValueError("a constituent needs three distinct indices")
        canon = tuple(sorted((i, j, k), key=self._pos.__getitem__))
        u, v, w = canon
        slot = {frozenset((u, v)): 0, frozenset((u, w)): 1, frozenset((v, w)): 2}
        axes = (slot[frozenset((i, j))], slot[frozenset((i, k))], slot[frozenset((j, k))])
        return canon, axes

    def position(self, i) -> int:
        return self._pos[i]

    def class_size(self, i, j) -> int:
        try:
            return self._sizes[frozenset((i, j))]
        except KeyError:
            raise ValueError(f"no vertex class for pair {{{i!r}, {j!r}}}") from None

    def constituent(self, i, j, k) -> np.ndarray:
        """Read-only boolean array with axes ``({i,j}, {i,k}, {j,k})``."""
        canon, axes = self._canon(i, j, k)
        return np.transpose(self._cons[canon], axes)

    def has_edge(self, i, j, k, p_ij: int, p_ik: int, p_jk: int) -> bool:
        return bool(self.constituent(i, j, k)[p_ij, p_ik, p_jk])

    def pair_degree(self, i, j, k, p_ij: int, p_ik: int) -> int:
        """Number of vertices of class ``{j, k}`` completing the pair to an edge."""
        return int(np.count_nonzero(self.constituent(i, j, k)[p_ij, p_ik, :]))

    def num_edges(self) -> int:
        return int(sum(np.count_nonzero(a) for a in self._cons.values()))

    def triples(self):
        """Stored triples in declared index order with their constituents (ij, ik, jk)."""
        return iter(self._cons.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReducedHypergraph):
            return NotImplemented
        return (
            self.indices == other.indices
            and self._sizes == other._sizes
            and all(np.array_equal(a, other._cons[key]) for key, a in self._cons.items())
        )

    def __repr__(self) -> str:
        return f"ReducedHypergraph(|I|={len(self.indices)}, edges={self.num_edges()})"


# density


@dataclass
class DenseCheck:
    """Outcome of the box-density check of a reduced hypergraph."""

    d: Fraction
    delta: Fraction
    violations: list = field(default_factory=list)  # (i, j, k, bad_pairs)
    checked: int = 0
    note: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations


def check_box_dense(A: ReducedHypergraph, d, delta) -> DenseCheck:
    """Check every ordered triple of distinct indices for the pair-degree condition.

    For ``(i, j, k)`` a pair ``(P^ij, P^ik)`` is bad when fewer than
    ``d * |P^jk|`` vertices of ``P^jk`` complete it to a constituent edge.
    The triple violates the condition when more than ``delta * |P^ij| |P^ik|``
    pairs are bad.  All comparisons are exact.
    """
    d, delta = _frac(d), _frac(delta)
    if not (0 <= d <= 1 and 0 <= delta <= 1):
        raise ValueError("d and delta must lie in [0, 1]")
    out = DenseCheck(d, delta)
    if len(A.indices) < 3:
        out.note = "fewer than three indices: condition holds vacuously"
        return out
    for i, j, k in itertools.permutations(A.indices, 3):
        C = A.constituent(i, j, k)
        deg = np.count_nonzero(C, axis=2)
        size_jk = C.shape[2]
        # deg < d * size  <=>  deg * den < num * size
        bad = int(np.count_nonzero(deg * d.denominator < d.numerator * size_jk))
        out.checked += 1
        if bad * delta.denominator > delta.numerator * C.shape[0] * C.shape[1]:
            out.violations.append((i, j, k, bad))
    return out


def check_admissible(A: ReducedHypergraph, X: Iterable, Y: Iterable, selection: Mapping, d) -> list[tuple]:
    """Violations ``(x, x', y)`` of the d-admissibility of an (X, Y)-selection.

    ``selection`` maps ``(x, y)`` to a vertex of class ``{x, y}``.  Returns an
    empty list when the selection is admissible.
    """
    X, Y = list(X), list(Y)
    d = _frac(d)
    if set(X) & set(Y):
        raise ValueError("X and Y must be disjoint")
    for x in X:
        for y in Y:
            if (x, y) not in selection:
                raise ValueError(f"selection has no vertex for ({x!r}, {y!r})")
            v = selection[(x, y)]
            if not 0 <= v < A.class_size(x, y):
                raise ValueError(f"vertex {v} outside class {{{x!r}, {y!r}}}")
    bad = []
    for x, x2 in itertools.combinations(X, 2):
        size = A.class_size(x, x2)
        for y in Y:
            deg = A.pair_degree(y, x, x2, selection[(x, y)], selection[(x2, y)])
            if deg * d.denominator < d.numerator * size:
                bad.append((x, x2, y))
    return bad


# cliques


@dataclass(frozen=True)
class ReducedClique:
    """Indices ``J`` and one class vertex per pair, keyed by ``frozenset({i, j})``."""

    indices: tuple
    choice: Mapping

    def vertex(self, i, j) -> int:
        return self.choice[frozenset((i, j))]


def is_reduced_clique(A: ReducedHypergraph, clique: ReducedClique) -> bool:
    J = clique.indices
    if len(set(J)) != len(J):
        return False
    for i, j in itertools.combinations(J, 2):
        v = clique.choice.get(frozenset((i, j)))
        if v is None or not 0 <= v < A.class_size(i, j):
            return False
    return all(
        A.has_edge(i, j, k, clique.vertex(i, j), clique.vertex(i, k), clique.vertex(j, k))
        for i, j, k in itertools.combinations(J, 3)
    )


class _OutOfNodes(Exception):
    pass


def find_reduced_clique(A: ReducedHypergraph, t: int, budget: int | None = None) -> CliqueResult:
    """Backtracking search for a clique of order ``t``.

    Indices are added in declared order; after each new index ``v`` the
    vertices of the classes ``{u, v}`` for earlier ``u`` are chosen one at a
    time, checking each triangle as soon as its three vertices are fixed.
    The witness is a :class:`ReducedClique`.
    """
    if int(t) != t or t < 3:
        raise ValueError("t must be an integer >= 3")
    start = time.perf_counter()
    I = A.indices
    if t > len(I):
        return CliqueResult(CliqueVerdict.NONE, None, 0, 0.0)
    nodes = 0
    J: list = []
    choice: dict = {}

    def grow_all(start_pos: int) -> bool:
        # every consistent vertex choice for the classes of a new index is a branch
        if len(J) == t:
            return True
        for q in range(start_pos, len(I) - (t - len(J)) + 1):
            v = I[q]
            if extend_vertex(v, 0, q):
                return True
        return False

    def extend_vertex(v, pos: int, q: int) -> bool:
        nonlocal nodes
        if pos == len(J):
            J.append(v)
            if grow_all(q + 1):
                return True
            J.pop()
            return False
        u = J[pos]
        for p in range(A.class_size(u, v)):
            nodes += 1
            if budget is not None and nodes > budget:
                raise _OutOfNodes
            if all(
                A.has_edge(w, u, v, choice[frozenset((w, u))], choice[frozenset((w, v))], p)
                for w in J[:pos]
            ):
                choice[frozenset((u, v))] = p
                if extend_vertex(v, pos + 1, q):
                    return True
                del choice[frozenset((u, v))]
        return False

    try:
        found = grow_all(0)
    except _OutOfNodes:
        return CliqueResult(CliqueVerdict.UNKNOWN, None, nodes, time.perf_counter() - start)
    elapsed = time.perf_counter() - start
    if not found:
        return CliqueResult(CliqueVerdict.NONE, None, nodes, elapsed)
    Jt = tuple(J)
    picked = {frozenset(p): choice[frozenset(p)] for p in itertools.combinations(Jt, 2)}
    return CliqueResult(CliqueVerdict.FOUND, ReducedClique(Jt, picked), nodes, elapsed)


# fortresses


class Fortress:
    """Vertices ``P^{ab}_d`` on the leaves of a tree.

    ``vertices`` maps ``(a, b, d)`` with leaves ``a < b`` and ``d`` in
    ``Q(a ^ b)`` to a vertex of the class of the pair of indices of ``a`` and
    ``b``.  ``index`` maps each leaf to its index in the reduced hypergraph
    (identity when omitted).
    """

    def __init__(self, tree: KMTree, vertices: Mapping, index: Mapping | None = None):
        self.tree = tree
        self.vertices = {}
        for (a, b, d), v in vertices.items():
            a, b, d = tuple(a), tuple(b), tuple(d)
            if b < a:
                a, b = b, a
            self.vertices[(a, b, d)] = int(v)
        self.index = dict(index) if index is not None else {leaf: leaf for leaf in tree.leaves}
        missing = [leaf for leaf in tree.leaves if leaf not in self.index]
        if missing:
            raise StructuralError(f"leaf {missing[0]!r} has no index")

    def vertex(self, a, b, d=()) -> int:
        a, b = tuple(a), tuple(b)
        if b < a:
            a, b = b, a
        return self.vertices[(a, b, tuple(d))]

    def domain(self):
        """All keys ``(a, b, d)`` the fortress must define."""
        for a, b in itertools.combinations(self.tree.leaves, 2):
            for d in q_set(self.tree, wedge(a, b)):
                yield a, b, d

    def restrict(self, tree: KMTree) -> "Fortress":
        """The fortress on a subsystem ``tree`` of the host tree."""
        keep = {}
        for key in Fortress._domain_of(tree):
            keep[key] = self.vertices[key]
        return Fortress(tree, keep, {leaf: self.index[leaf] for leaf in tree.leaves})

    @staticmethod
    def _domain_of(tree: KMTree):
        for a, b in itertools.combinations(tree.leaves, 2):
            for d in q_set(tree, wedge(a, b)):
                yield a, b, d

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fortress):
            return NotImplemented
        return (self.tree, self.vertices, self.index) == (other.tree, other.vertices, other.index)

    def __repr__(self) -> str:
        return f"Fortress({self.tree!r}, {len(self.vertices)} vertices)"


def verify_fortress(A: ReducedHypergraph, F: Fortress) -> list[tuple]:
    """Violations ``(a, b, c, d)`` of the fortress axiom; empty means F is a fortress.

    For distinct leaves with ``s = |a^b| = |a^c| < |b^c|`` and every ``d`` in
    ``Q(b^c)`` with ``d[s] == a[s]`` the triple
    ``{P^{ab}_{d|s}, P^{ac}_{d|s}, P^{bc}_d}`` must be an edge of the
    constituent on the indices of ``a, b, c``.  Here ``b < c``.
    """
    missing = [key for key in F.domain() if key not in F.vertices]
    if missing:
        shown = ", ".join(repr(m) for m in missing[:5])
        raise StructuralError(f"fortress undefined at {len(missing)} (a, b, d) keys, e.g. {shown}")
    idx = F.index
    for (a, b, d), v in F.vertices.items():
        if not 0 <= v < A.class_size(idx[a], idx[b]):
            raise StructuralError(f"vertex {v} at {(a, b, d)!r} lies outside its class")
    leaves = F.tree.leaves
    bad = []
    if F.tree.height == 1:
        return bad
    for a in leaves:
        for b, c in itertools.combinations(leaves, 2):
            if a == b or a == c:
                continue
            s = len(wedge(a, b))
            if len(wedge(a, c)) != s or len(wedge(b, c)) <= s:
                continue
            C = A.constituent(idx[a], idx[b], idx[c])
            for d in q_set(F.tree, wedge(b, c)):
                if d[s] != a[s]:
                    continue
                ds = d[:s]
                if not C[F.vertex(a, b, ds), F.vertex(a, c, ds), F.vertex(b, c, d)]:
                    bad.append((a, b, c, d))
    return bad


def fortress_to_clique(F: Fortress) -> ReducedClique:
    """Read the clique of order ``2**height`` off a binary fortress."""
    if F.tree.arity != 2:
        raise ValueError(f"only binary fortresses encode cliques, got arity {F.tree.arity}")
    J = tuple(F.index[leaf] for leaf in F.tree.leaves)
    choice = {}
    for a, b in itertools.combinations(F.tree.leaves, 2):
        (d,) = q_set(F.tree, wedge(a, b))
        choice[frozenset((F.index[a], F.index[b]))] = F.vertex(a, b, d)
    return ReducedClique(J, choice)


def clique_to_fortress(A: ReducedHypergraph, clique: ReducedClique) -> Fortress:
    """Relabel a clique of order ``2**r`` by the leaves of the full binary tree of height r.

    The indices are taken in declared order and leaf ``p`` is the binary
    expansion of ``p`` (most significant digit first).
    """
    size = len(clique.indices)
    r = size.bit_length() - 1
    if size < 2 or size != 1 << r:
        raise ValueError(f"clique order {size} is not a power of two >= 2")
    J = sorted(clique.indices, key=A.position)
    tree = KMTree.full(r, 2)
    index = {}
    for p, i in enumerate(J):
        leaf = tuple((p >> (r - 1 - t)) & 1 for t in range(r))
        index[leaf] = i
    vertices = {}
    for a, b in itertools.combinations(tree.leaves, 2):
        (d,) = q_set(tree, wedge(a, b))
        vertices[(a, b, d)] = clique.vertex(index[a], index[b])
    return Fortress(tree, vertices, index)


# the base sampler


@dataclass
class BaseSelection:
    """Result of sampling the pair vertices on ``X0``.

    ``choice`` maps ``frozenset({x, x'})`` to the sampled vertex; ``Y[j]``
    lists the members of ``X_j`` compatible with every sampled vertex.
    """

    success: bool
    choice: dict
    Y: list
    attempts: int
    threshold: Fraction
    empty: list = field(default_factory=list)  # j with X_j empty (vacuous)


def _y_sets(A, X0, Xs, selections, choice) -> list[list]:
    pairs = list(itertools.combinations(X0, 2))
    out = []
    for Xj, Cj in zip(Xs, selections):
        keep = []
        for y in Xj:
            if all(A.has_edge(x, x2, y, choice[frozenset((x, x2))], Cj[(x, y)], Cj[(x2, y)]) for x, x2 in pairs):
                keep.append(y)
        out.append(keep)
    return out


def draw_base_selection(A: ReducedHypergraph, X0: Sequence, Xs: Sequence, selections: Sequence, rng) -> tuple[dict, list]:
    """One uniform draw of the pair vertices on X0 and the resulting sets Y_j."""
    choice = {}
    for x, x2 in itertools.combinations(X0, 2):
        choice[frozenset((x, x2))] = int(rng.integers(A.class_size(x, x2)))
    return choice, _y_sets(A, X0, Xs, selections, choice)


def _large_enough(count: int, total: int, threshold: Fraction) -> bool:
    return count >= threshold * total


def sample_base_selection(
    A: ReducedHypergraph,
    X0: Sequence,
    Xs: Sequence[Sequence],
    selections: Sequence[Mapping],
    eps,
    seed=None,
    retries: int = 64,
    m: int | None = None,
    level=None,
    check: bool = True,
) -> BaseSelection:
    """Sample pair vertices on X0 until every Y_j keeps a ``(eps/2)**C(m,2)`` share.

    ``r = len(Xs) + 1``.  Unless ``check`` is False the selections are first
    verified to be admissible at ``level`` (default ``(r-2)/(r-1) + eps``);
    a failure raises :class:`PreconditionError`.  When every draw misses the
    size bound the result has ``success=False``.
    """
    X0 = list(X0)
    Xs = [list(x) for x in Xs]
    eps = _frac(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if m is not None and len(X0) != m:
        raise PreconditionError(f"|X0| = {len(X0)} but m = {m}")
    if len(X0) < 2:
        raise PreconditionError("X0 needs at least two indices")
    if len(selections) != len(Xs):
        raise ValueError("need one selection per set X_j")
    if retries < 1:
        raise ValueError("retries must be at least 1")
    seen = set(X0)
    for Xj in Xs:
        if seen & set(Xj) or len(set(Xj)) != len(Xj):
            raise PreconditionError("X0, X1, ... must be pairwise disjoint")
        seen |= set(Xj)
    r = len(Xs) + 1
    if check:
        lvl = admissibility_level(max(r, 2), eps) if level is None else _frac(level)
        for j, (Xj, Cj) in enumerate(zip(Xs, selections), start=1):
            bad = check_admissible(A, X0, Xj, Cj, lvl)
            if bad:
                raise PreconditionError(f"selection {j} is not {lvl}-admissible at {bad[0]!r}")
    threshold = (eps / 2) ** math.comb(len(X0), 2)
    empty = [j for j, Xj in enumerate(Xs, start=1) if not Xj]
    rng = np.random.default_rng(seed)
    choice, Y = {}, [[] for _ in Xs]
    for attempt in range(1, retries + 1):
        choice, Y = draw_base_selection(A, X0, Xs, selections, rng)
        if all(_large_enough(len(Yj), len(Xj), threshold) for Yj, Xj in zip(Y, Xs)):
            return BaseSelection(True, choice, Y, attempt, threshold, empty)
    return BaseSelection(False, choice, Y, retries, threshold, empty)
