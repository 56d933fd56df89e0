"""Hypergraphs, pair sets and exact density counters.

A :class:`Hypergraph3` keeps a symmetric boolean tensor ``adj`` of shape
``(n, n, n)`` so that ``adj[x, y, z]`` answers triple membership in constant
time.  Memory grows as n**3 bytes, which is fine up to a few hundred vertices.

All three counters use the convention that a candidate incidence only counts
when its three vertices are pairwise distinct.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError

__all__ = [
    "Hypergraph3",
    "PairSet",
    "DensityReport",
    "RegularityParams",
    "CliqueVerdict",
    "CliqueResult",
    "count_boxtimes",
    "count_ev",
    "count_vvv",
    "find_clique",
    "count_triangles_tripartite",
    "vertex_subset",
]


class Hypergraph3:
    """A 3-uniform hypergraph on vertices ``0..n-1``."""

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj = np.zeros((n, n, n), dtype=bool)
        triples = np.asarray(list(edges), dtype=np.int64).reshape(-1, 3)
        if len(triples):
            if triples.min() < 0 or triples.max() >= n:
                raise ValueError(f"edge vertex out of range 0..{n - 1}")
            x, y, z = triples.T
            if np.any((x == y) | (x == z) | (y == z)):
                raise ValueError("edge with repeated vertex")
            for a, b, c in itertools.permutations((x, y, z)):
                adj[a, b, c] = True
        self._init(adj)

    def _init(self, adj: np.ndarray) -> None:
        adj.setflags(write=False)
        self.n = adj.shape[0]
        self.adj = adj

    @classmethod
    def from_tensor(cls, adj: np.ndarray) -> "Hypergraph3":
        """Wrap a symmetric boolean tensor (no validation beyond shape)."""
        adj = np.ascontiguousarray(adj, dtype=bool)
        if adj.ndim != 3 or len(set(adj.shape)) != 1:
            raise ValueError("adjacency tensor must have shape (n, n, n)")
        obj = cls.__new__(cls)
        obj._init(adj.copy() if adj.flags.writeable else adj)
        return obj

    @classmethod
    def complete(cls, n: int) -> "Hypergraph3":
        idx = np.arange(n)
        adj = (idx[:, None, None] != idx[None, :, None]) & (idx[:, None, None] != idx[None, None, :])
        adj &= idx[None, :, None] != idx[None, None, :]
        return cls.from_tensor(adj)

    @classmethod
    def random(cls, n: int, p: float, seed=None) -> "Hypergraph3":
        """Binomial random hypergraph: each triple is an edge with probability p."""
        rng = np.random.default_rng(seed)
        triples = np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64).reshape(-1, 3)
        keep = rng.random(len(triples)) < p
        return cls(n, triples[keep])

    def __contains__(self, triple) -> bool:
        x, y, z = triple
        return bool(self.adj[x, y, z])

    def has_edge(self, x: int, y: int, z: int) -> bool:
        return bool(self.adj[x, y, z])

    def edges(self) -> np.ndarray:
        """Edges as an ``(m, 3)`` array of increasing triples, lexicographically sorted."""
        x, y, z = np.nonzero(self.adj)
        keep = (x < y) & (y < z)
        return np.stack([x[keep], y[keep], z[keep]], axis=1)

    def edge_set(self) -> frozenset:
        return frozenset(map(tuple, self.edges().tolist()))

    @property
    def num_edges(self) -> int:
        return int(self.adj.sum()) // 6

    def degrees(self) -> np.ndarray:
        """Number of edges through each vertex."""
        return self.adj.reshape(self.n, -1).sum(axis=1) // 2

    def union(self, other: "Hypergraph3") -> "Hypergraph3":
        _same_n(self.n, other.n)
        return Hypergraph3.from_tensor(self.adj | other.adj)

    def with_edge(self, x: int, y: int, z: int) -> "Hypergraph3":
        return self.union(Hypergraph3(self.n, [(x, y, z)]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph3):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.adj, other.adj))

    def __hash__(self):
        return hash((self.n, self.adj.tobytes()))

    def __repr__(self) -> str:
        return f"Hypergraph3(n={self.n}, edges={self.num_edges})"


class PairSet:
    """A set of ordered pairs ``(x, y)`` with ``x != y`` over ``0..n-1``."""

    def __init__(self, n: int, pairs: Iterable[Sequence[int]] = ()):
        n = int(n)
        mat = np.zeros((n, n), dtype=bool)
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if len(arr):
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError(f"pair vertex out of range 0..{n - 1}")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise ValueError("loops (x, x) are not allowed in a pair set")
            mat[arr[:, 0], arr[:, 1]] = True
        self._init(mat)

    def _init(self, mat: np.ndarray) -> None:
        mat.setflags(write=False)
        self.n = mat.shape[0]
        self.matrix = mat

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "PairSet":
        mat = np.array(mat, dtype=bool)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("pair matrix must be square")
        if np.any(np.diagonal(mat)):
            raise ValueError("loops (x, x) are not allowed in a pair set")
        obj = cls.__new__(cls)
        obj._init(mat)
        return obj

    @classmethod
    def all_pairs(cls, n: int) -> "PairSet":
        return cls.from_matrix(~np.eye(n, dtype=bool))

    @classmethod
    def product(cls, n: int, xs: Iterable[int], ys: Iterable[int]) -> "PairSet":
        """All pairs (x, y) with x in xs, y in ys and x != y."""
        mat = np.zeros((n, n), dtype=bool)
        mat[np.ix_(vertex_subset(n, xs), vertex_subset(n, ys))] = True
        np.fill_diagonal(mat, False)
        return cls.from_matrix(mat)

    @classmethod
    def random(cls, n: int, density: float, seed=None) -> "PairSet":
        rng = np.random.default_rng(seed)
        mat = rng.random((n, n)) < density
        np.fill_diagonal(mat, False)
        return cls.from_matrix(mat)

    def __contains__(self, pair) -> bool:
        x, y = pair
        return bool(self.matrix[x, y])

    def __len__(self) -> int:
        return int(self.matrix.sum())

    def __iter__(self):
        return iter(map(tuple, np.argwhere(self.matrix).tolist()))

    def row(self, x: int) -> np.ndarray:
        """The vertices y with (x, y) in the set."""
        return np.flatnonzero(self.matrix[x])

    def union(self, other: "PairSet") -> "PairSet":
        _same_n(self.n, other.n)
        return PairSet.from_matrix(self.matrix | other.matrix)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.n, self.matrix.tobytes()))

    def __repr__(self) -> str:
        return f"PairSet(n={self.n}, pairs={len(self)})"


@dataclass(frozen=True)
class DensityReport:
    e: int
    total: int

    def __post_init__(self):
        if not 0 <= self.e <= self.total:
            raise ValueError(f"inconsistent counts e={self.e}, total={self.total}")

    @property
    def ratio(self) -> Fraction | None:
        """Exact ``e / total``; None when there are no candidate incidences."""
        return Fraction(self.e, self.total) if self.total else None

    def margin(self, d, eta, n: int) -> Fraction:
        """``e - d * total + eta * n**3``; nonnegative iff the density inequality holds."""
        return self.e - _frac(d) * self.total + _frac(eta) * n**3


@dataclass(frozen=True)
class RegularityParams:
    """Target density and tolerance of a regular bipartite graph."""

    d2: float
    delta2: float

    def __post_init__(self):
        for name in ("d2", "delta2"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")

    def triangle_bound(self, x: int, y: int, z: int) -> float:
        """Upper bound ``d2**3 |X||Y||Z| + 3 delta2 |X||Y||Z|`` on tripartite triangles."""
        return (self.d2**3 + 3 * self.delta2) * x * y * z


def _frac(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


def _same_n(*ns: int) -> None:
    if len(set(ns)) > 1:
        raise DimensionError(f"vertex counts differ: {ns}")


def vertex_subset(n: int, vertices: Iterable[int]) -> np.ndarray:
    """Sorted array of distinct vertices, checked to lie in ``0..n-1``."""
    arr = np.unique(np.asarray(list(vertices), dtype=np.int64))
    if len(arr) and (arr[0] < 0 or arr[-1] >= n):
        raise ValueError(f"vertex out of range 0..{n - 1}")
    return arr


def count_boxtimes(H: Hypergraph3, P: PairSet, Q: PairSet) -> DensityReport:
    """Count pairs of pairs ``((x, y), (x, z))`` in P x Q hitting an edge.

    ``total`` counts all such pairs of pairs with x, y, z pairwise distinct and
    ``e`` those for which {x, y, z} is an edge of H.
    """
    _same_n(H.n, P.n, Q.n)
    p = P.matrix.astype(np.int64)
    q = Q.matrix.astype(np.int64)
    # P and Q carry no loops, so only y == z has to be removed from the total.
    total = int((p.sum(axis=1) * q.sum(axis=1)).sum() - (p * q).sum())
    e = 0
    for x in range(H.n):
        ys = np.flatnonzero(P.matrix[x])
        zs = np.flatnonzero(Q.matrix[x])
        if len(ys) and len(zs):
            e += int(np.count_nonzero(H.adj[x][np.ix_(ys, zs)]))
    return DensityReport(e, total)


def count_ev(H: Hypergraph3, X: Iterable[int], P: PairSet) -> DensityReport:
    """Count pairs ``(x, (y, z))`` in X x P with {x, y, z} an edge."""
    _same_n(H.n, P.n)
    xs = vertex_subset(H.n, X)
    m = P.matrix
    degenerate = int(m[xs, :].sum() + m[:, xs].sum())
    total = len(xs) * len(P) - degenerate
    e = 0
    for x in xs:
        e += int(np.count_nonzero(H.adj[x] & m))
    return DensityReport(e, total)


def count_vvv(H: Hypergraph3, X: Iterable[int], Y: Iterable[int], Z: Iterable[int]) -> DensityReport:
    """Count triples ``(x, y, z)`` in X x Y x Z with {x, y, z} an edge."""
    xs, ys, zs = (vertex_subset(H.n, s) for s in (X, Y, Z))
    sx, sy, sz = set(xs.tolist()), set(ys.tolist()), set(zs.tolist())
    total = (
        len(xs) * len(ys) * len(zs)
        - len(sx & sy) * len(zs)
        - len(sx & sz) * len(ys)
        - len(sy & sz) * len(xs)
        + 2 * len(sx & sy & sz)
    )
    e = int(np.count_nonzero(H.adj[np.ix_(xs, ys, zs)])) if total else 0
    return DensityReport(e, total)


class CliqueVerdict(enum.Enum):
    FOUND = "found"
    NONE = "none"
    UNKNOWN = "unknown"


@dataclass
class CliqueResult:
    verdict: CliqueVerdict
    witness: tuple | None = None
    nodes: int = 0
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.verdict is CliqueVerdict.FOUND


class _BudgetExhausted(Exception):
    pass


def find_clique(H: Hypergraph3, k: int, budget: int | None = None) -> CliqueResult:
    """Search for a copy of the complete 3-graph on k vertices.

    Vertices are tried in order of decreasing degree (ties by index), so the
    witness is deterministic.  ``budget`` caps the number of search nodes;
    reaching it yields ``UNKNOWN``.  ``NONE`` is an exhaustive certificate.
    """
    if int(k) != k or k < 3:
        raise ValueError("clique order k must be an integer >= 3")
    start = time.perf_counter()
    n = H.n
    if k > n:
        return CliqueResult(CliqueVerdict.NONE, elapsed=time.perf_counter() - start)

    deg = H.degrees()
    order = sorted(range(n), key=lambda v: (-int(deg[v]), v))
    rank_adj = H.adj[np.ix_(order, order, order)]
    link_cache: dict[tuple[int, int], int] = {}

    def link(u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        val = link_cache.get(key)
        if val is None:
            bits = np.packbits(rank_adj[key[0], key[1]], bitorder="little")
            val = int.from_bytes(bits.tobytes(), "little")
            link_cache[key] = val
        return val

    nodes = 0
    chosen: list[int] = []

    def extend(cand: int) -> bool:
        nonlocal nodes
        if len(chosen) == k:
            return True
        nodes += 1
        if budget is not None and nodes > budget:
            raise _BudgetExhausted
        need = k - len(chosen)
        while cand and cand.bit_count() >= need:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            nxt = cand
            for s in chosen:
                nxt &= link(s, v)
                if not nxt:
                    break
            if nxt.bit_count() < need - 1:
                continue
            chosen.append(v)
            if extend(nxt):
                return True
            chosen.pop()
        return False

    full = (1 << n) - 1
    try:
        ok = extend(full)
    except _BudgetExhausted:
        return CliqueResult(CliqueVerdict.UNKNOWN, nodes=nodes, elapsed=time.perf_counter() - start)
    elapsed = time.perf_counter() - start
    if ok:
        witness = tuple(sorted(order[v] for v in chosen))
        return CliqueResult(CliqueVerdict.FOUND, witness, nodes, elapsed)
    return CliqueResult(CliqueVerdict.NONE, None, nodes, elapsed)


def count_triangles_tripartite(adj, X: Iterable[int], Y: Iterable[int], Z: Iterable[int]) -> int:
    """Exact number of triangles ``x y z`` with x in X, y in Y, z in Z.

    ``adj`` is a symmetric boolean adjacency matrix of a graph; only the
    edges between the three parts are used.  The parts must be disjoint.
    """
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    xs, ys, zs = (vertex_subset(n, s) for s in (X, Y, Z))
    if np.intersect1d(xs, ys).size or np.intersect1d(xs, zs).size or np.intersect1d(ys, zs).size:
        raise ValueError("parts of a tripartite graph must be disjoint")
    xy = adj[np.ix_(xs, ys)].astype(np.int64)
    xz = adj[np.ix_(xs, zs)].astype(np.int64)
    yz = adj[np.ix_(ys, zs)].astype(np.int64)
    return int((xy * (xz @ yz.T)).sum())
