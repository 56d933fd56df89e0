"""Line-oriented text formats for every boxlab object.

All formats share the same lexical rules: ``#`` starts a comment, blank
lines are ignored, fields are separated by whitespace and integers are
plain ASCII decimals.  Parsers raise :class:`FormatError` carrying the
1-based line number of the offending line.

hypergraph   ``vertices <n>`` then ``x y z`` lines with x < y < z
pairset      ``vertices <n>`` then ``x y`` lines (ordered, x != y)
subset       one line of vertex indices
palette      ``colors <l>`` then ``a b c`` lines with 1 <= a <= b <= c <= l
colouring    ``vertices <n> colors <l>`` then ``x y c`` lines with x < y
tree         ``height <k> arity <M>`` then one leaf per line, labels separated by spaces
leaves       one leaf per line (a subset of a tree's leaves)
reduced      ``indices ...``, ``class <i> <j> <size>``, ``edge <i> <j> <k> <p> <q> <s>``
fortress     tree header and leaves, then ``vertex <a> <b> <d|-> <v>`` with comma-joined labels
selections   ``set <j> <index>...`` and ``pick <j> <x> <y> <v>``

Tree labels are integers when every label in the file is an integer
literal and strings otherwise.  The reduced-hypergraph index of a leaf is
its labels joined by commas.
"""

from __future__ import annotations

import itertools
import re
from pathlib import Path
from typing import Iterable

import numpy as np

from .construct import EdgeColouring
from .errors import FormatError, StructuralError
from .hypercore import Hypergraph3, PairSet
from .palette import Palette
from .reduced import Fortress, ReducedHypergraph
from .systems import KMTree

__all__ = [
    "parse_hypergraph", "format_hypergraph",
    "parse_pairset", "format_pairset",
    "parse_subset", "format_subset",
    "parse_palette", "format_palette",
    "parse_colouring", "format_colouring",
    "parse_tree", "format_tree",
    "parse_leaves", "format_leaves",
    "parse_reduced", "format_reduced",
    "parse_fortress", "format_fortress",
    "parse_selections", "format_selections",
    "read_text", "leaf_token",
    "MAX_HYPERGRAPH_VERTICES", "MAX_VERTICES",
]

# dense storage limits: a hypergraph is an n^3 boolean tensor
MAX_HYPERGRAPH_VERTICES = 640
MAX_VERTICES = 20000
MAX_CLASS_SIZE = 4096
MAX_CONSTITUENT_CELLS = 50_000_000

_INT = re.compile(r"-?[0-9]+\Z")


def read_text(path) -> str:
    """Read a file as UTF-8, mapping decoding problems to FormatError."""
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"not valid UTF-8 ({exc.reason} at byte {exc.start})", source=str(path)) from None


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _int(tok: str, no, source, what="integer", lo=None, hi=None) -> int:
    if not _INT.match(tok) or len(tok) > 40:
        raise FormatError(f"expected {what}, got {tok[:40]!r}", no, source)
    v = int(tok)
    if lo is not None and v < lo:
        raise FormatError(f"{what} {v} is below {lo}", no, source)
    if hi is not None and v > hi:
        raise FormatError(f"{what} {v} is above {hi}", no, source)
    return v


def _header(lines, keys: tuple, source, limits: dict) -> tuple[int, ...]:
    try:
        no, toks = next(lines)
    except StopIteration:
        raise FormatError(f"empty input, expected a `{' '.join(k + ' <int>' for k in keys)}` header", None, source) from None
    if len(toks) != 2 * len(keys) or any(toks[2 * i] != key for i, key in enumerate(keys)):
        want = " ".join(f"{k} <int>" for k in keys)
        raise FormatError(f"expected header `{want}`", no, source)
    return tuple(
        _int(toks[2 * i + 1], no, source, key, *limits.get(key, (0, None))) for i, key in enumerate(keys)
    )


def _fields(toks, count: int, no, source, what: str) -> None:
    if len(toks) != count:
        raise FormatError(f"{what} needs {count} fields, got {len(toks)}", no, source)


# hypergraphs, pair sets, subsets


def parse_hypergraph(text: str, source=None) -> Hypergraph3:
    lines = _lines(text)
    (n,) = _header(lines, ("vertices",), source, {"vertices": (0, MAX_HYPERGRAPH_VERTICES)})
    adj = np.zeros((n, n, n), dtype=bool)
    for no, toks in lines:
        _fields(toks, 3, no, source, "an edge line")
        x, y, z = (_int(t, no, source, "vertex", 0, n - 1) for t in toks)
        if not x < y < z:
            raise FormatError(f"edge {x} {y} {z} must satisfy x < y < z", no, source)
        for a, b, c in itertools.permutations((x, y, z)):
            adj[a, b, c] = True
    return Hypergraph3.from_tensor(adj)


def format_hypergraph(H: Hypergraph3) -> str:
    out = [f"vertices {H.n}"]
    out += [f"{x} {y} {z}" for x, y, z in H.edges().tolist()]
    return "\n".join(out) + "\n"


def parse_pairset(text: str, source=None) -> PairSet:
    lines = _lines(text)
    (n,) = _header(lines, ("vertices",), source, {"vertices": (0, MAX_VERTICES)})
    mat = np.zeros((n, n), dtype=bool)
    for no, toks in lines:
        _fields(toks, 2, no, source, "a pair line")
        x, y = (_int(t, no, source, "vertex", 0, n - 1) for t in toks)
        if x == y:
            raise FormatError(f"pair ({x}, {y}) is a loop", no, source)
        mat[x, y] = True
    return PairSet.from_matrix(mat)


def format_pairset(P: PairSet) -> str:
    return "\n".join([f"vertices {P.n}"] + [f"{x} {y}" for x, y in P]) + "\n"


def parse_subset(text: str, source=None, n: int | None = None) -> list[int]:
    rows = list(_lines(text))
    if len(rows) > 1:
        raise FormatError("a vertex subset is a single line", rows[1][0], source)
    if not rows:
        return []
    no, toks = rows[0]
    hi = None if n is None else n - 1
    vals = [_int(t, no, source, "vertex", 0, hi) for t in toks]
    return sorted(set(vals))


def format_subset(vertices: Iterable[int]) -> str:
    return " ".join(str(int(v)) for v in vertices) + "\n"


# palettes and colourings


def parse_palette(text: str, source=None) -> Palette:
    lines = _lines(text)
    (ell,) = _header(lines, ("colors",), source, {"colors": (1, 64)})
    pats = []
    for no, toks in lines:
        _fields(toks, 3, no, source, "a pattern line")
        a, b, c = (_int(t, no, source, "colour", 1, ell) for t in toks)
        if not a <= b <= c:
            raise FormatError(f"pattern {a} {b} {c} must be listed in non-decreasing order", no, source)
        pats.append((a, b, c))
    return Palette(ell, pats)


def format_palette(P: Palette) -> str:
    return "\n".join([f"colors {P.colours}"] + [" ".join(map(str, p)) for p in P]) + "\n"


def parse_colouring(text: str, source=None) -> EdgeColouring:
    lines = _lines(text)
    n, ell = _header(lines, ("vertices", "colors"), source, {"vertices": (0, MAX_VERTICES), "colors": (1, 64)})
    mat = np.zeros((n, n), dtype=np.int8)
    for no, toks in lines:
        _fields(toks, 3, no, source, "a coloured pair line")
        x = _int(toks[0], no, source, "vertex", 0, n - 1)
        y = _int(toks[1], no, source, "vertex", 0, n - 1)
        c = _int(toks[2], no, source, "colour", 1, ell)
        if not x < y:
            raise FormatError(f"pair {x} {y} must satisfy x < y", no, source)
        if mat[x, y]:
            raise FormatError(f"pair {x} {y} coloured twice", no, source)
        mat[x, y] = mat[y, x] = c
    missing = np.argwhere(np.triu(mat == 0, 1))
    if len(missing):
        x, y = missing[0]
        raise FormatError(f"pair {x} {y} has no colour ({len(missing)} pairs missing)", None, source)
    return EdgeColouring(n, ell, mat)


def format_colouring(phi: EdgeColouring) -> str:
    out = [f"vertices {phi.n} colors {phi.colours}"]
    out += [f"{x} {y} {c}" for x, y, c in phi.pairs()]
    return "\n".join(out) + "\n"


# trees and fortresses


def _check_label(tok: str, no, source) -> None:
    if "," in tok:
        raise FormatError(f"label {tok!r} may not contain a comma", no, source)


def _convert_labels(leaves: list[tuple]) -> list[tuple]:
    if all(_INT.match(t) for leaf in leaves for t in leaf):
        return [tuple(int(t) for t in leaf) for leaf in leaves]
    return leaves


def leaf_token(leaf) -> str:
    """Index of a leaf in a reduced hypergraph: its labels joined by commas."""
    return ",".join(str(x) for x in leaf)


def _tree_body(lines, source, k: int, M: int, extra: dict | None = None):
    raw: list[tuple] = []
    rest = []
    for no, toks in lines:
        if extra is not None and toks[0] in extra:
            rest.append((no, toks))
            continue
        if rest:
            raise FormatError("leaf lines must come before vertex lines", no, source)
        if len(toks) != k:
            raise FormatError(f"leaf has {len(toks)} labels, expected {k}", no, source)
        for t in toks:
            _check_label(t, no, source)
        raw.append((no, tuple(toks)))
    seen: dict[tuple, int] = {}
    for no, leaf in raw:
        if leaf in seen:
            raise FormatError(f"leaf {' '.join(leaf)} repeats line {seen[leaf]}", no, source)
        seen[leaf] = no
    if len(raw) != M**k:
        raise FormatError(f"{len(raw)} leaves listed, a height {k} arity {M} tree has {M ** k}", None, source)
    leaves = _convert_labels([leaf for _, leaf in raw])
    try:
        tree = KMTree(k, M, leaves)
    except (StructuralError, ValueError) as exc:
        raise FormatError(f"leaves do not form a tree: {exc}", None, source) from None
    return tree, rest


def parse_tree(text: str, source=None) -> KMTree:
    lines = _lines(text)
    k, M = _header(lines, ("height", "arity"), source, {"height": (1, 64), "arity": (1, 1 << 20)})
    if M**k > 10_000_000:
        raise FormatError(f"a height {k} arity {M} tree is too large", 1, source)
    tree, _ = _tree_body(lines, source, k, M)
    return tree


def format_tree(T: KMTree) -> str:
    out = [f"height {T.height} arity {T.arity}"]
    out += [" ".join(str(x) for x in leaf) for leaf in T.leaves]
    return "\n".join(out) + "\n"


def parse_leaves(text: str, source=None, tree: KMTree | None = None) -> list[tuple]:
    """Leaf lines; with ``tree`` given, labels are matched against its leaves."""
    rows = []
    for no, toks in _lines(text):
        for t in toks:
            _check_label(t, no, source)
        rows.append((no, tuple(toks)))
    if tree is None:
        return _convert_labels([leaf for _, leaf in rows])
    by_text = {tuple(str(x) for x in leaf): leaf for leaf in tree.leaves}
    out = []
    for no, leaf in rows:
        if leaf not in by_text:
            raise FormatError(f"{' '.join(leaf)} is not a leaf of the tree", no, source)
        out.append(by_text[leaf])
    return out


def format_leaves(leaves: Iterable) -> str:
    return "".join(" ".join(str(x) for x in leaf) + "\n" for leaf in leaves)


def parse_fortress(text: str, source=None) -> Fortress:
    lines = _lines(text)
    k, M = _header(lines, ("height", "arity"), source, {"height": (1, 64), "arity": (1, 1 << 20)})
    if M**k > 100_000:
        raise FormatError(f"a height {k} arity {M} fortress is too large", 1, source)
    tree, rest = _tree_body(lines, source, k, M, extra={"vertex"})
    by_text = {leaf_token(leaf): leaf for leaf in tree.leaves}
    label_of = {str(x): x for leaf in tree.leaves for x in leaf}
    vertices = {}
    for no, toks in rest:
        _fields(toks, 5, no, source, "a vertex line")
        a = by_text.get(toks[1])
        b = by_text.get(toks[2])
        if a is None or b is None:
            bad = toks[1] if a is None else toks[2]
            raise FormatError(f"{bad!r} is not a leaf", no, source)
        if a == b:
            raise FormatError("a vertex needs two distinct leaves", no, source)
        if toks[3] == "-":
            d = ()
        else:
            parts = toks[3].split(",")
            if any(p not in label_of for p in parts):
                raise FormatError(f"sequence {toks[3]!r} uses labels outside the tree", no, source)
            d = tuple(label_of[p] for p in parts)
        v = _int(toks[4], no, source, "class vertex", 0)
        key = (min(a, b), max(a, b), d)
        if key in vertices:
            raise FormatError(f"vertex for {toks[1]} {toks[2]} {toks[3]} given twice", no, source)
        vertices[key] = v
    index = {leaf: leaf_token(leaf) for leaf in tree.leaves}
    return Fortress(tree, vertices, index)


def format_fortress(F: Fortress) -> str:
    out = [format_tree(F.tree).rstrip("\n")]
    for (a, b, d), v in sorted(F.vertices.items()):
        dd = leaf_token(d) if d else "-"
        out.append(f"vertex {leaf_token(a)} {leaf_token(b)} {dd} {v}")
    return "\n".join(out) + "\n"


# reduced hypergraphs


def _index_token(i) -> str:
    return leaf_token(i) if isinstance(i, tuple) else str(i)


def parse_reduced(text: str, source=None) -> ReducedHypergraph:
    lines = _lines(text)
    try:
        no, toks = next(lines)
    except StopIteration:
        raise FormatError("empty input, expected an `indices ...` line", None, source) from None
    if toks[0] != "indices":
        raise FormatError("first line must be `indices <i1> <i2> ...`", no, source)
    indices = toks[1:]
    if len(set(indices)) != len(indices):
        raise FormatError("indices repeat", no, source)
    if len(indices) > 256:
        raise FormatError("too many indices", no, source)
    pos = {i: p for p, i in enumerate(indices)}
    sizes: dict[frozenset, int] = {}
    edges: dict[tuple, list] = {}
    for no, toks in lines:
        kind = toks[0]
        if kind == "class":
            _fields(toks, 4, no, source, "a class line")
            i, j = toks[1], toks[2]
            for t in (i, j):
                if t not in pos:
                    raise FormatError(f"unknown index {t!r}", no, source)
            if i == j:
                raise FormatError("a class needs two distinct indices", no, source)
            key = frozenset((i, j))
            if key in sizes:
                raise FormatError(f"class {i} {j} declared twice", no, source)
            if edges:
                raise FormatError("class lines must come before edge lines", no, source)
            sizes[key] = _int(toks[3], no, source, "class size", 1, MAX_CLASS_SIZE)
        elif kind == "edge":
            _fields(toks, 7, no, source, "an edge line")
            i, j, k = toks[1:4]
            for t in (i, j, k):
                if t not in pos:
                    raise FormatError(f"unknown index {t!r}", no, source)
            if not pos[i] < pos[j] < pos[k]:
                raise FormatError("edge indices must follow the declared index order", no, source)
            dims = []
            for pair in ((i, j), (i, k), (j, k)):
                if frozenset(pair) not in sizes:
                    raise FormatError(f"no class declared for {pair[0]} {pair[1]}", no, source)
                dims.append(sizes[frozenset(pair)])
            p, q, s = (_int(t, no, source, "class vertex", 0, dim - 1) for t, dim in zip(toks[4:], dims))
            edges.setdefault((i, j, k), []).append((p, q, s))
        else:
            raise FormatError(f"unknown line kind {kind!r}", no, source)
    for i, j in itertools.combinations(indices, 2):
        if frozenset((i, j)) not in sizes:
            raise FormatError(f"no class declared for {i} {j}", None, source)
    cells = 0
    for i, j, k in itertools.combinations(indices, 3):
        cells += sizes[frozenset((i, j))] * sizes[frozenset((i, k))] * sizes[frozenset((j, k))]
        if cells > MAX_CONSTITUENT_CELLS:
            raise FormatError("constituents are too large to store", None, source)
    cons = {}
    for key, trip in edges.items():
        i, j, k = key
        arr = np.zeros((sizes[frozenset((i, j))], sizes[frozenset((i, k))], sizes[frozenset((j, k))]), dtype=bool)
        arr[tuple(np.array(trip).T)] = True
        cons[key] = arr
    return ReducedHypergraph(indices, sizes, cons)


def format_reduced(A: ReducedHypergraph) -> str:
    tok = {i: _index_token(i) for i in A.indices}
    for t in tok.values():
        if not t or any(c.isspace() for c in t) or "#" in t:
            raise ValueError(f"index {t!r} cannot be written as a token")
    out = ["indices " + " ".join(tok[i] for i in A.indices)]
    for i, j in itertools.combinations(A.indices, 2):
        out.append(f"class {tok[i]} {tok[j]} {A.class_size(i, j)}")
    for (i, j, k), arr in A.triples():
        for p, q, s in np.argwhere(arr).tolist():
            out.append(f"edge {tok[i]} {tok[j]} {tok[k]} {p} {q} {s}")
    return "\n".join(out) + "\n"


# extra sets and selections for the fortress builder


def parse_selections(text: str, source=None) -> tuple[list[list[str]], list[dict]]:
    sets: dict[int, list[str]] = {}
    picks: dict[int, dict] = {}
    for no, toks in _lines(text):
        if toks[0] == "set":
            if len(toks) < 2:
                raise FormatError("`set` needs a set number", no, source)
            j = _int(toks[1], no, source, "set number", 1, 64)
            if j in sets:
                raise FormatError(f"set {j} declared twice", no, source)
            sets[j] = toks[2:]
        elif toks[0] == "pick":
            _fields(toks, 5, no, source, "a pick line")
            j = _int(toks[1], no, source, "set number", 1, 64)
            if j not in sets:
                raise FormatError(f"set {j} is not declared", no, source)
            if toks[3] not in sets[j]:
                raise FormatError(f"{toks[3]!r} is not in set {j}", no, source)
            picks.setdefault(j, {})[(toks[2], toks[3])] = _int(toks[4], no, source, "class vertex", 0)
        else:
            raise FormatError(f"unknown line kind {toks[0]!r}", no, source)
    if sorted(sets) != list(range(1, len(sets) + 1)):
        raise FormatError("sets must be numbered 1, 2, ... without gaps", None, source)
    return [sets[j] for j in sorted(sets)], [picks.get(j, {}) for j in sorted(sets)]


def format_selections(sets: list, selections: list) -> str:
    out = []
    for j, (Xj, Cj) in enumerate(zip(sets, selections), start=1):
        out.append(f"set {j} " + " ".join(_index_token(y) for y in Xj))
        for (x, y), v in sorted(Cj.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
            out.append(f"pick {j} {_index_token(x)} {_index_token(y)} {v}")
    return "\n".join(out) + "\n"
