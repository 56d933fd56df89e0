"""Exact search for edge colourings of K_k whose triangles all follow a palette.

The search colours the edges of K_k vertex by vertex: once vertex ``v`` is
reached, the edges ``(0, v), (1, v), ..., (v-1, v)`` are coloured in order, so
every new edge closes triangles with already coloured edges only.  Each
pending edge of the current vertex keeps a bitmask of colours still allowed
(forward checking); a wiped-out domain prunes immediately.

Colour symmetry is broken with a lex-leader condition: the sequence of edge
colours must be lexicographically no larger than its image under every
colour permutation preserving the palette.  This is sound for any palette and
reduces to first-use ordering when the palette is invariant under all
permutations.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .construct import EdgeColouring
from .palette import Palette, min_codegree, pattern

__all__ = [
    "Verdict",
    "SearchBudget",
    "SearchOutcome",
    "LowerBound",
    "search_palette_colouring",
    "lower_bound_report",
    "validate_colouring",
    "brute_force_colourable",
]


class Verdict(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int | None = 10**9
    time_limit: float | None = 600.0
    symmetry_breaking: bool = True

    def __post_init__(self):
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node limit must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")


@dataclass
class SearchOutcome:
    verdict: Verdict
    witness: EdgeColouring | None = None
    nodes_explored: int = 0
    elapsed: float = 0.0
    palette: Palette | None = field(default=None, repr=False)
    k: int = 0


class _OutOfBudget(Exception):
    pass


def validate_colouring(phi: EdgeColouring, palette: Palette) -> list[tuple[int, int, int]]:
    """Triangles of ``phi`` whose colour pattern is not in the palette."""
    bad = []
    for x, y, z in itertools.combinations(range(phi.n), 3):
        p = pattern(phi.colour(x, y), phi.colour(x, z), phi.colour(y, z))
        if p not in palette.patterns:
            bad.append((x, y, z))
    return bad


def _third_masks(palette: Palette) -> list[list[int]]:
    ell = palette.colours
    masks = [[0] * (ell + 1) for _ in range(ell + 1)]
    for a in range(1, ell + 1):
        for b in range(1, ell + 1):
            m = 0
            for c in range(1, ell + 1):
                if pattern(a, b, c) in palette.patterns:
                    m |= 1 << c
            masks[a][b] = m
    return masks


def search_palette_colouring(palette: Palette, k: int, budget: SearchBudget | None = None) -> SearchOutcome:
    """Decide whether K_k has an edge colouring with every triangle in the palette.

    Returns a feasible outcome with a witness colouring, an infeasible
    outcome after exhausting the search tree, or unknown when the node or
    time budget ran out first.
    """
    if int(k) != k or k < 3:
        raise ValueError("k must be an integer >= 3")
    budget = budget or SearchBudget()
    ell = palette.colours
    third = _third_masks(palette)
    full = sum(1 << c for c in range(1, ell + 1))

    if budget.symmetry_breaking:
        perms = [g for g in palette.automorphisms() if any(g[c] != c for c in range(1, ell + 1))]
    else:
        perms = []

    col = [[0] * k for _ in range(k)]
    nodes = 0
    start = time.perf_counter()
    node_limit = budget.node_limit
    deadline = None if budget.time_limit is None else start + budget.time_limit

    def extend(v: int, u: int, dom: list[int], tied: tuple) -> bool:
        nonlocal nodes
        if u == v:
            v += 1
            if v == k:
                return True
            u = 0
            dom = [full] * v
        d = dom[u]
        row_u = col[u]
        for c in range(1, ell + 1):
            if not (d >> c) & 1:
                continue
            still = tied
            if tied:
                ok = True
                keep = []
                for g in tied:
                    gc = g[c]
                    if c > gc:
                        ok = False
                        break
                    if c == gc:
                        keep.append(g)
                if not ok:
                    continue
                still = tuple(keep)
            nodes += 1
            if node_limit is not None and nodes > node_limit:
                raise _OutOfBudget
            if deadline is not None and not nodes & 0x3FFF and time.perf_counter() > deadline:
                raise _OutOfBudget
            row_u[v] = c
            col[v][u] = c
            masks = third
            nd = dom[:]
            alive = True
            for w in range(u + 1, v):
                m = nd[w] & masks[row_u[w]][c]
                if not m:
                    alive = False
                    break
                nd[w] = m
            if alive and extend(v, u + 1, nd, still):
                return True
        row_u[v] = 0
        col[v][u] = 0
        return False

    try:
        found = extend(1, 0, [full], tuple(perms))
    except _OutOfBudget:
        return SearchOutcome(Verdict.UNKNOWN, None, nodes, time.perf_counter() - start, palette, k)
    elapsed = time.perf_counter() - start
    if found:
        phi = EdgeColouring(k, ell, np.array(col, dtype=np.int8))
        return SearchOutcome(Verdict.FEASIBLE, phi, nodes, elapsed, palette, k)
    return SearchOutcome(Verdict.INFEASIBLE, None, nodes, elapsed, palette, k)


def brute_force_colourable(palette: Palette, k: int) -> bool:
    """Check all ``ell ** C(k, 2)`` colourings of K_k; for small k only."""
    ell = palette.colours
    edges = list(itertools.combinations(range(k), 2))
    eidx = {e: i for i, e in enumerate(edges)}
    tri = np.array(
        [[eidx[(x, y)], eidx[(x, z)], eidx[(y, z)]] for x, y, z in itertools.combinations(range(k), 3)],
        dtype=np.int64,
    ).reshape(-1, 3)
    ok_code = np.zeros(3 * 4 ** (ell - 1) + 1, dtype=bool)
    for p in palette.patterns:
        ok_code[sum(4 ** (c - 1) for c in p)] = True
    total = ell ** len(edges)
    chunk = 1 << 16
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        digits = np.empty((len(idx), len(edges)), dtype=np.int64)
        rest = idx.copy()
        for i in range(len(edges)):
            digits[:, i] = rest % ell
            rest //= ell
        weights = 4 ** digits  # colour c -> 4**(c-1) with digits 0-based
        codes = weights[:, tri].sum(axis=2)
        if np.any(ok_code[codes].all(axis=1)):
            return True
    return False


@dataclass
class LowerBound:
    palette: Palette
    k: int
    outcome: SearchOutcome
    bound: Fraction | None

    @property
    def inconclusive(self) -> bool:
        return self.outcome.verdict is Verdict.UNKNOWN


def lower_bound_report(palette: Palette, k: int, budget: SearchBudget | None = None) -> LowerBound:
    """Certified lower bound on the box Turan density of K_k^(3).

    The palette's min codegree is a lower bound exactly when no colouring of
    K_k keeps all triangles inside the palette.  Otherwise ``bound`` is None.
    """
    outcome = search_palette_colouring(palette, k, budget)
    bound = min_codegree(palette) if outcome.verdict is Verdict.INFEASIBLE else None
    return LowerBound(palette, k, outcome, bound)
