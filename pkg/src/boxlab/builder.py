"""Recursive construction of a fortress on a subsystem of a tree of indices.

The skeleton follows the induction on the height k:

* the root keeps its first m children ``A``;
* every pair of leaves below distinct children of ``A`` gets a random class
  vertex (the empty-label vertices), retried until these form admissible
  selections between the subtrees and keep a large part of each extra set;
* for every ordered pair ``(a, b)`` of ``A`` the subtree below ``a`` is
  handled by the height k-1 case with the subtree below ``b`` as one more
  extra set; the compatible part of the ``b`` subtree is then shrunk to a
  subsystem, and all other subtrees are pruned to the same arity;
* the pieces are assembled into one fortress.

The arity used at step h drops linearly from the supplied arity to m.  The
theoretical arities from :mod:`boxlab.constants` guarantee success on every
dense input but are far too large to run, so failures are reported by stage
instead.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import BoxlabError, PreconditionError
from .reduced import (
    Fortress,
    ReducedHypergraph,
    admissibility_level,
    check_admissible,
    sample_base_selection,
)
from .systems import KMTree, extract_subsystem, q_set, wedge

__all__ = ["FortressBuildFailed", "BuildResult", "build_fortress", "check_goal", "STAGES"]

STAGES = (
    "base selection",
    "Part III admissibility",
    "Part III Y0 size",
    "Part IV recursion",
    "Part IV W extraction",
)


class FortressBuildFailed(BoxlabError):
    """A randomized or size-bounded stage ran out of budget."""

    def __init__(self, stage: str, detail: str = ""):
        self.stage = stage
        self.detail = detail
        super().__init__(f"{stage}: {detail}" if detail else stage)


@dataclass
class BuildResult:
    tree: KMTree  # Z0, arity m
    fortress: Fortress
    Y: list  # Y_1 .. Y_{r-k}, lists of indices
    log: list = field(default_factory=list)


def _frac(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def _share_ok(count: int, total: int, base: Fraction, exponent: int) -> bool:
    # count >= base**exponent * total, without forming huge powers when avoidable
    if total == 0 or count >= total:
        return True
    if count == 0:
        return False
    # base**exponent <= 2**-exponent since base <= 1/2
    if exponent >= total.bit_length() + 1:
        return True
    return count >= base**exponent * total


def build_fortress(
    A: ReducedHypergraph,
    X0: KMTree,
    Xs: Sequence[Sequence] = (),
    selections: Sequence[Mapping] = (),
    r: int = 2,
    k: int | None = None,
    m: int = 2,
    eps=Fraction(1, 2),
    seed=None,
    retries: int = 64,
    index: Mapping | None = None,
) -> BuildResult:
    """Find an m-ary subsystem ``Z0`` of ``X0`` carrying a fortress.

    ``index`` maps leaves of ``X0`` to indices of ``A`` (identity when
    omitted).  ``Xs`` are the extra index sets ``X_1..X_{r-k}`` and
    ``selections[j]`` maps ``(index of x, y)`` to a vertex of the class of
    that pair.  On success the fortress verifies and every ``y`` in ``Y_j``
    is compatible with every fortress vertex (see :func:`check_goal`).

    Raises :class:`FortressBuildFailed` naming the stage that gave up.
    """
    k = X0.height if k is None else k
    eps = _frac(eps)
    if X0.height != k:
        raise ValueError(f"X0 has height {X0.height}, expected k = {k}")
    if not 1 <= k <= r:
        raise ValueError("need 1 <= k <= r")
    if m < 2 or X0.arity < m:
        raise PreconditionError(f"need 2 <= m <= arity, got m = {m}, arity = {X0.arity}")
    if len(Xs) != r - k or len(selections) != r - k:
        raise ValueError(f"need r - k = {r - k} extra sets and selections")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    index = {leaf: leaf for leaf in X0.leaves} if index is None else dict(index)
    tokens = [index[leaf] for leaf in X0.leaves]
    level = admissibility_level(r, eps)
    seen = set(tokens)
    for Xj, Cj in zip(Xs, selections):
        if seen & set(Xj):
            raise PreconditionError("X0, X1, ... must be pairwise disjoint")
        seen |= set(Xj)
        bad = check_admissible(A, tokens, Xj, Cj, level)
        if bad:
            raise PreconditionError(f"input selection is not {level}-admissible at {bad[0]!r}")
    rng = np.random.default_rng(seed)
    log: list[str] = []
    return _build(A, X0, index, [list(x) for x in Xs], list(selections), r, k, m, eps, rng, retries, log)


def _child_rng(rng) -> np.random.Generator:
    return np.random.default_rng(int(rng.integers(2**63)))


def _build(A, T: KMTree, index, Xs, sels, r, k, m, eps, rng, retries, log) -> BuildResult:
    level = admissibility_level(r, eps)
    if k == 1:
        Z0 = T.prune(m)
        X0 = [index[leaf] for leaf in Z0.leaves]
        res = sample_base_selection(
            A, X0, Xs, sels, eps, seed=_child_rng(rng), retries=retries, level=level, check=False
        )
        if not res.success:
            sizes = ", ".join(f"{len(y)}/{len(x)}" for y, x in zip(res.Y, Xs))
            raise FortressBuildFailed("base selection", f"no draw kept a large enough share (last: {sizes})")
        vertices = {
            (a, b, ()): res.choice[frozenset((index[a], index[b]))]
            for a, b in itertools.combinations(Z0.leaves, 2)
        }
        log.append(f"k=1 m={m}: base selection after {res.attempts} draw(s)")
        return BuildResult(Z0, Fortress(Z0, vertices, {z: index[z] for z in Z0.leaves}), res.Y, log)

    # Part II: the first level
    roots = list(T.successors(()))[:m]
    Z = {a: T.subtree((a,)) for a in roots}
    idx = {a: {z: index[(a,) + z] for z in Z[a].leaves} for a in roots}
    M1 = T.arity

    # Part III: empty-label vertices between distinct subtrees
    pairs = [(a, b) for a, b in itertools.permutations(roots, 2)]
    cross = [
        (a, z, b, w)
        for a, b in itertools.combinations(roots, 2)
        for z in Z[a].leaves
        for w in Z[b].leaves
    ]
    N0 = m * m * M1 ** (2 * (k - 1))
    base = eps / 2
    empty: dict = {}
    Y: list = []
    failure = None
    for attempt in range(1, retries + 1):
        empty = {}
        for a, z, b, w in cross:
            u, v = idx[a][z], idx[b][w]
            p = int(rng.integers(A.class_size(u, v)))
            empty[(u, v)] = p
            empty[(v, u)] = p
        failure = None
        for a, b in pairs:
            sel = {(idx[a][z], idx[b][w]): empty[(idx[a][z], idx[b][w])] for z in Z[a].leaves for w in Z[b].leaves}
            bad = check_admissible(A, [idx[a][z] for z in Z[a].leaves], [idx[b][w] for w in Z[b].leaves], sel, level)
            if bad:
                x, x2, y = bad[0]
                failure = ("Part III admissibility", f"pair {{{x!r}, {x2!r}}} against {y!r} is below {level}")
                break
        if failure:
            continue
        Y = []
        for j, (Xj, Cj) in enumerate(zip(Xs, sels), start=1):
            keep = [
                y
                for y in Xj
                if all(
                    A.has_edge(idx[a][z], idx[b][w], y, empty[(idx[a][z], idx[b][w])], Cj[(idx[a][z], y)], Cj[(idx[b][w], y)])
                    for a, z, b, w in cross
                )
            ]
            if not _share_ok(len(keep), len(Xj), base, N0):
                failure = ("Part III Y0 size", f"Y0_{j} kept {len(keep)} of {len(Xj)}")
                break
            Y.append(keep)
        if not failure:
            log.append(f"k={k} m={m}: Part III after {attempt} draw(s)")
            break
    if failure:
        raise FortressBuildFailed(*failure)

    # Part IV: one subfortress per ordered pair of roots
    steps = m * (m - 1)
    inner: dict = {}  # (a, b) -> Fortress on Z[a] (leaves without the root label)
    for h, (a, b) in enumerate(pairs, start=1):
        target = m + math.ceil(Fraction((M1 - m) * (steps - h), steps))
        extra_sets = [[idx[b][w] for w in Z[b].leaves]] + Y
        extra_sels = [{(idx[a][z], idx[b][w]): empty[(idx[a][z], idx[b][w])] for z in Z[a].leaves for w in Z[b].leaves}]
        for Cj, Yj in zip(sels, Y):
            extra_sels.append({(idx[a][z], y): Cj[(idx[a][z], y)] for z in Z[a].leaves for y in Yj})
        try:
            sub = _build(A, Z[a], idx[a], extra_sets, extra_sels, r, k - 1, target, eps, _child_rng(rng), retries, log)
        except (FortressBuildFailed, PreconditionError) as exc:
            stage = getattr(exc, "stage", "precondition")
            raise FortressBuildFailed("Part IV recursion", f"step {h} ({a!r}, {b!r}) at height {k - 1}: {stage}: {exc}") from exc
        W_tokens = set(sub.Y[0])
        W = [w for w in Z[b].leaves if idx[b][w] in W_tokens]
        if not W:
            raise FortressBuildFailed("Part IV W extraction", f"step {h} ({a!r}, {b!r}): W is empty")
        got, Zb = extract_subsystem(Z[b], W, Fraction(len(W), len(Z[b])), best_effort=True)
        if got < target:
            raise FortressBuildFailed(
                "Part IV W extraction", f"step {h} ({a!r}, {b!r}): W holds only a {got}-ary subsystem, need {target}"
            )
        Z[a] = sub.tree
        Z[b] = Zb.prune(target)
        for c in roots:
            if c not in (a, b):
                Z[c] = Z[c].prune(target)
        Y = sub.Y[1:]
        inner[(a, b)] = sub.fortress
        for key, F in inner.items():
            if F.tree != Z[key[0]]:
                inner[key] = F.restrict(Z[key[0]])
        log.append(f"k={k} m={m}: step {h} ({a!r}, {b!r}) arity {target}")

    # Part V: assemble
    Z0 = KMTree.graft({a: Z[a] for a in roots})
    vertices = {}
    for u, v in itertools.combinations(Z0.leaves, 2):
        a, b = u[0], v[0]
        if a != b:
            vertices[(u, v, ())] = empty[(index[u], index[v])]
            continue
        z, z2 = u[1:], v[1:]
        for d in q_set(Z0, wedge(u, v)):
            F = inner[(a, d[0])]
            vertices[(u, v, d)] = F.vertex(z, z2, d[1:])
    return BuildResult(Z0, Fortress(Z0, vertices, {z: index[z] for z in Z0.leaves}), Y, log)


def check_goal(A: ReducedHypergraph, F: Fortress, Y: Sequence[Sequence], selections: Sequence[Mapping]) -> list[tuple]:
    """Violations ``(z, z', d, j, y)`` of the compatibility of the fortress with each Y_j."""
    bad = []
    idx = F.index
    for (z, z2, d), p in F.vertices.items():
        for j, (Yj, Cj) in enumerate(zip(Y, selections), start=1):
            for y in Yj:
                if not A.has_edge(idx[z], idx[z2], y, p, Cj[(idx[z], y)], Cj[(idx[z2], y)]):
                    bad.append((z, z2, d, j, y))
    return bad
