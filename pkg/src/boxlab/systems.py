"""Finite sequences, M-ary trees of fixed height and their leaf systems.

Sequences are plain tuples of labels.  Labels are opaque, hashable and
mutually comparable, so every choice below ("the first m children") is made
in sorted label order and is therefore deterministic.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionError, StructuralError

__all__ = [
    "restrict",
    "wedge",
    "concat",
    "KMTree",
    "q_set",
    "extract_subsystem",
    "max_subsystem_arity",
]


def restrict(a: tuple, length: int) -> tuple:
    """Initial segment ``a|length``."""
    if not 0 <= length <= len(a):
        raise ValueError(f"cannot restrict a length-{len(a)} sequence to {length}")
    return tuple(a[:length])


def wedge(a: Sequence, b: Sequence) -> tuple:
    """Longest common initial segment of ``a`` and ``b``."""
    out = []
    for x, y in zip(a, b):
        if x != y:
            break
        out.append(x)
    return tuple(out)


def concat(a: Sequence, b: Sequence) -> tuple:
    return tuple(a) + tuple(b)


class KMTree:
    """An M-ary tree of height k, stored through its leaves.

    Every node is a prefix of some leaf; every node of length < k has exactly
    ``arity`` direct continuations.
    """

    def __init__(self, height: int, arity: int, leaves: Iterable[Sequence]):
        if height < 1 or arity < 1:
            raise ValueError("height and arity must be at least 1")
        leaf_set = {tuple(x) for x in leaves}
        for leaf in leaf_set:
            if len(leaf) != height:
                raise StructuralError(f"leaf {leaf!r} has length {len(leaf)}, expected {height}")
        children: dict[tuple, set] = {}
        for leaf in leaf_set:
            for i in range(height):
                children.setdefault(leaf[:i], set()).add(leaf[i])
        for node, kids in children.items():
            if len(kids) != arity:
                raise StructuralError(
                    f"node {node!r} has {len(kids)} direct continuations, expected {arity}"
                )
        if not leaf_set:
            raise StructuralError("a tree needs at least one leaf")
        self.height = height
        self.arity = arity
        self._children = {node: tuple(sorted(kids)) for node, kids in children.items()}
        self._leaves = tuple(sorted(leaf_set))
        self._leaf_set = frozenset(leaf_set)

    @classmethod
    def full(cls, height: int, arity: int, labels: Sequence | None = None) -> "KMTree":
        """The tree with leaves ``labels ** height`` (default labels ``0..arity-1``)."""
        labels = list(range(arity)) if labels is None else list(labels)
        if len(labels) != arity:
            raise ValueError("need exactly `arity` labels")
        return cls(height, arity, itertools.product(labels, repeat=height))

    @classmethod
    def from_leaves(cls, leaves: Iterable[Sequence]) -> "KMTree":
        """Infer height and arity from a leaf list and validate the tree axioms."""
        leaves = [tuple(x) for x in leaves]
        if not leaves:
            raise StructuralError("a tree needs at least one leaf")
        height = len(leaves[0])
        arity = len({x[0] for x in leaves}) if height else 0
        return cls(height, arity, leaves)

    @property
    def leaves(self) -> tuple:
        """The leaf system, sorted."""
        return self._leaves

    def nodes(self) -> list[tuple]:
        out = set()
        for leaf in self._leaves:
            for i in range(self.height + 1):
                out.add(leaf[:i])
        return sorted(out, key=lambda a: (len(a), a))

    def __contains__(self, a) -> bool:
        a = tuple(a)
        if len(a) == self.height:
            return a in self._leaf_set
        return a in self._children

    def is_leaf(self, a) -> bool:
        return tuple(a) in self._leaf_set

    def successors(self, a: Sequence) -> tuple:
        """Labels extending ``a`` to a direct continuation inside the tree."""
        a = tuple(a)
        if a not in self._children:
            if a in self._leaf_set:
                return ()
            raise ValueError(f"{a!r} is not a node of the tree")
        return self._children[a]

    def subtree(self, a: Sequence) -> "KMTree":
        """Suffix tree below node ``a`` (height ``k - |a|``)."""
        a = tuple(a)
        if a not in self or len(a) >= self.height:
            raise ValueError(f"{a!r} is not an inner node")
        n = len(a)
        return KMTree(self.height - n, self.arity, (x[n:] for x in self._leaves if x[:n] == a))

    def prune(self, arity: int) -> "KMTree":
        """Subsystem keeping the first ``arity`` children at every node."""
        if arity > self.arity:
            raise ValueError(f"cannot grow arity {self.arity} to {arity}")
        if arity == self.arity:
            return self
        keep = []

        def walk(node):
            if len(node) == self.height:
                keep.append(node)
                return
            for lab in self._children[node][:arity]:
                walk(node + (lab,))

        walk(())
        return KMTree(self.height, arity, keep)

    @classmethod
    def graft(cls, children: dict) -> "KMTree":
        """Tree whose root children are the keys, each carrying the given subtree."""
        subs = list(children.values())
        if not subs:
            raise StructuralError("graft needs at least one child")
        height = subs[0].height + 1
        arity = len(children)
        leaves = [(lab,) + leaf for lab, sub in children.items() for leaf in sub.leaves]
        if any(sub.arity != arity or sub.height != height - 1 for sub in subs):
            raise StructuralError("grafted subtrees must share height and have arity = #children")
        return cls(height, arity, leaves)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KMTree):
            return NotImplemented
        return (self.height, self.arity, self._leaf_set) == (other.height, other.arity, other._leaf_set)

    def __hash__(self):
        return hash((self.height, self.arity, self._leaf_set))

    def __len__(self) -> int:
        return len(self._leaves)

    def __repr__(self) -> str:
        return f"KMTree(height={self.height}, arity={self.arity})"


def q_set(tree: KMTree, c: Sequence) -> list[tuple]:
    """Sequences deviating from ``c`` at every level among that level's siblings.

    ``d`` belongs to the result iff ``d_i`` is a successor of ``c|(i-1)``
    different from ``c_i`` for every ``i``.  Returned in lexicographic order;
    there are ``(arity - 1) ** len(c)`` of them.
    """
    c = tuple(c)
    if c not in tree:
        raise ValueError(f"{c!r} is not a node of the tree")
    options = [[s for s in tree.successors(c[:i]) if s != c[i]] for i in range(len(c))]
    return [tuple(d) for d in itertools.product(*options)]


def _as_fraction(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def _best_arities(tree: KMTree, chosen: set) -> dict:
    # node -> largest m with an m-ary subtree of the right height below it inside `chosen`
    memo: dict[tuple, int] = {}

    def best(node) -> int:
        if len(node) == tree.height - 1:
            val = sum(1 for lab in tree.successors(node) if node + (lab,) in chosen)
        else:
            vals = sorted((best(node + (lab,)) for lab in tree.successors(node)), reverse=True)
            val = max((min(i + 1, v) for i, v in enumerate(vals)), default=0)
        memo[node] = val
        return val

    best(())
    return memo


def max_subsystem_arity(tree: KMTree, subset: Iterable[Sequence]) -> int:
    """Largest m such that ``subset`` contains the leaves of an m-ary subtree."""
    return _best_arities(tree, {tuple(x) for x in subset})[()]


def _select(tree: KMTree, chosen: set, memo: dict, node: tuple, m: int) -> list[tuple]:
    # first-label-first m-ary subtree below `node`; the caller guarantees one exists
    out: list[tuple] = []
    taken = 0
    for lab in tree.successors(node):
        child = node + (lab,)
        if len(child) == tree.height:
            if child not in chosen:
                continue
            out.append(child)
        elif memo[child] >= m:
            out.extend(_select(tree, chosen, memo, child, m))
        else:
            continue
        taken += 1
        if taken == m:
            return out
    raise AssertionError("no subsystem of the requested arity")


def extract_subsystem(tree: KMTree, subset: Iterable[Sequence], eps, best_effort: bool = False):
    """Find an m-ary subtree of the same height whose leaves lie in ``subset``.

    Requires ``|subset| >= eps * M**k``.  By default follows the averaging
    argument level by level and returns ``m = ceil(eps*M/k)``: at each node
    keep the children whose part of the subset has size at least
    ``(k-1)/k * eps * M**(k-1)``, take the first ``m`` of them and recurse
    with ``eps * (k-1)/k``.

    With ``best_effort=True`` the largest achievable arity is returned
    instead (it is never smaller than the guaranteed one).

    Returns ``(m, subtree)``.
    """
    chosen = {tuple(x) for x in subset}
    if not chosen <= set(tree.leaves):
        raise ValueError("subset contains sequences that are not leaves of the tree")
    eps = _as_fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    k, M = tree.height, tree.arity
    if len(chosen) < eps * M**k:
        raise PreconditionError(f"|X| = {len(chosen)} < eps * M^k = {float(eps * M**k):g}")
    m = math.ceil(eps * M / k)

    if best_effort:
        memo = _best_arities(tree, chosen)
        best = memo[()]
        assert best >= m
        return best, KMTree(k, best, _select(tree, chosen, memo, (), best))

    def rec(node: tuple, depth_left: int, e: Fraction) -> list[tuple]:
        below = [x for x in chosen if x[: len(node)] == node]
        if depth_left == 1:
            kids = [node + (lab,) for lab in tree.successors(node) if node + (lab,) in chosen]
            assert len(kids) >= m
            return kids[:m]
        threshold = e * (depth_left - 1) / depth_left * M ** (depth_left - 1)
        good = []
        for lab in tree.successors(node):
            child = node + (lab,)
            size = sum(1 for x in below if x[len(node)] == lab)
            if size >= threshold:
                good.append(child)
        assert len(good) >= m, "averaging bound violated"
        out = []
        for child in good[:m]:
            out.extend(rec(child, depth_left - 1, e * (depth_left - 1) / depth_left))
        return out

    return m, KMTree(k, m, rec((), k, eps))
