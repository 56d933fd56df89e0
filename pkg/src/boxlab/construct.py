"""Random edge colourings and the hypergraphs they induce through a palette.

Given a colouring of the pairs of ``V`` and a palette, the induced hypergraph
keeps exactly the triples whose three pair colours form a palette pattern.
:func:`audit_density` then measures the box-density of that hypergraph on a
few families of pair sets (colour classes, random pair sets, products).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .hypercore import DensityReport, Hypergraph3, PairSet, count_boxtimes
from .palette import Palette, min_codegree

log = logging.getLogger(__name__)

__all__ = [
    "EdgeColouring",
    "AuditSpec",
    "AuditRow",
    "AuditReport",
    "random_colouring",
    "build_hypergraph",
    "colour_class_pairs",
    "audit_density",
    "FAMILIES",
]

FAMILIES = ("colour", "random", "product")


class EdgeColouring:
    """A colouring of the unordered pairs of ``0..n-1`` with colours ``1..colours``.

    The colours sit in a symmetric ``(n, n)`` int8 matrix whose diagonal is 0.
    """

    def __init__(self, n: int, colours: int, matrix):
        mat = np.array(matrix, dtype=np.int8)
        if mat.shape != (n, n):
            raise ValueError(f"colour matrix has shape {mat.shape}, expected {(n, n)}")
        if not np.array_equal(mat, mat.T):
            raise ValueError("colour matrix must be symmetric")
        if np.any(np.diagonal(mat) != 0):
            raise ValueError("diagonal of the colour matrix must be 0")
        off = mat[~np.eye(n, dtype=bool)]
        if off.size and (off.min() < 1 or off.max() > colours):
            raise ValueError(f"pair colour outside 1..{colours}")
        mat.setflags(write=False)
        self.n = int(n)
        self.colours = int(colours)
        self.matrix = mat

    @classmethod
    def from_pairs(cls, n: int, colours: int, entries) -> "EdgeColouring":
        """Build from ``(x, y, c)`` triples; every pair must be coloured once."""
        mat = np.zeros((n, n), dtype=np.int8)
        for x, y, c in entries:
            if x == y:
                raise ValueError(f"pair ({x}, {y}) is a loop")
            if mat[x, y]:
                raise ValueError(f"pair ({x}, {y}) coloured twice")
            mat[x, y] = mat[y, x] = c
        missing = np.argwhere(np.triu(mat == 0, 1))
        if len(missing):
            x, y = missing[0]
            raise ValueError(f"pair ({x}, {y}) has no colour ({len(missing)} pairs missing)")
        return cls(n, colours, mat)

    def colour(self, x: int, y: int) -> int:
        if x == y:
            raise ValueError("a vertex pair needs two distinct vertices")
        return int(self.matrix[x, y])

    def pairs(self):
        """Yield ``(x, y, c)`` for all x < y."""
        xs, ys = np.triu_indices(self.n, 1)
        for x, y in zip(xs.tolist(), ys.tolist()):
            yield x, y, int(self.matrix[x, y])

    def class_sizes(self) -> dict[int, int]:
        """Number of unordered pairs of each colour."""
        upper = self.matrix[np.triu_indices(self.n, 1)]
        counts = np.bincount(upper, minlength=self.colours + 1)
        return {c: int(counts[c]) for c in range(1, self.colours + 1)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeColouring):
            return NotImplemented
        return (self.n, self.colours) == (other.n, other.colours) and np.array_equal(
            self.matrix, other.matrix
        )

    def __repr__(self) -> str:
        return f"EdgeColouring(n={self.n}, colours={self.colours})"


def random_colouring(n: int, colours: int, seed=None) -> EdgeColouring:
    """Colour each unordered pair independently and uniformly from ``1..colours``."""
    if n < 2:
        raise ValueError("need at least two vertices")
    if colours < 1:
        raise ValueError("need at least one colour")
    rng = np.random.default_rng(seed)
    mat = np.zeros((n, n), dtype=np.int8)
    iu = np.triu_indices(n, 1)
    mat[iu] = rng.integers(1, colours + 1, size=len(iu[0]), dtype=np.int8)
    mat = mat + mat.T
    return EdgeColouring(n, colours, mat)


def _pattern_table(palette: Palette) -> np.ndarray:
    # multiset {a,b,c} -> sum of 4**(colour-1); multiplicities are at most 3
    ell = palette.colours
    table = np.zeros(3 * 4 ** (ell - 1) + 1, dtype=bool)
    for p in palette.patterns:
        table[sum(4 ** (c - 1) for c in p)] = True
    return table


def build_hypergraph(phi: EdgeColouring, palette: Palette, chunk: int = 32) -> Hypergraph3:
    """The hypergraph of all triples whose colour pattern lies in the palette."""
    if phi.colours != palette.colours:
        raise ValueError(
            f"colouring uses {phi.colours} colours but the palette is over {palette.colours}"
        )
    n = phi.n
    table = _pattern_table(palette)
    weight = np.zeros(phi.colours + 1, dtype=np.int32)
    weight[1:] = 4 ** np.arange(phi.colours, dtype=np.int32)
    w = weight[phi.matrix]  # diagonal maps to 0
    adj = np.zeros((n, n, n), dtype=bool)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        code = w[lo:hi, :, None] + w[lo:hi, None, :] + w[None, :, :]
        adj[lo:hi] = table[code]
    # triples with a repeated vertex involve a zero weight pair; mask them out
    idx = np.arange(n)
    distinct = (idx[:, None] != idx[None, :])
    adj &= distinct[:, :, None] & distinct[:, None, :] & distinct[None, :, :]
    return Hypergraph3.from_tensor(adj)


def colour_class_pairs(phi: EdgeColouring, c: int) -> PairSet:
    """Ordered pairs ``(x, y)`` with ``phi(x, y) == c``, both orientations."""
    if not 1 <= c <= phi.colours:
        raise ValueError(f"colour {c} outside 1..{phi.colours}")
    return PairSet.from_matrix(phi.matrix == c)


@dataclass
class AuditSpec:
    """Which pair-set families to test and with what randomness."""

    families: Sequence[str] = FAMILIES
    eta: float = 0.02
    random_densities: Sequence[float] = (0.25, 0.5, 0.75)
    random_trials: int = 2
    product_trials: int = 4
    seed: int = 0

    def __post_init__(self):
        unknown = set(self.families) - set(FAMILIES)
        if unknown:
            raise ValueError(f"unknown audit families {sorted(unknown)}; choose from {FAMILIES}")
        if any(not 0 < rho <= 1 for rho in self.random_densities):
            raise ValueError("random pair densities must lie in (0, 1]")
        if self.random_trials < 1 or self.product_trials < 1:
            raise ValueError("trial counts must be at least 1")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")


@dataclass(frozen=True)
class AuditRow:
    family: str
    label: str
    report: DensityReport
    margin: Fraction

    @property
    def ratio(self) -> Fraction:
        return self.report.ratio

    @property
    def holds(self) -> bool:
        return self.margin >= 0


@dataclass
class AuditReport:
    d: Fraction
    eta: float
    n: int
    rows: list[AuditRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def min_ratio(self) -> Fraction | None:
        return min((r.ratio for r in self.rows), default=None)

    @property
    def worst(self) -> AuditRow | None:
        return min(self.rows, key=lambda r: r.ratio, default=None)

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.rows)

    def family_min(self, family: str) -> Fraction | None:
        return min((r.ratio for r in self.rows if r.family == family), default=None)


def _family_instances(phi: EdgeColouring, spec: AuditSpec):
    n = phi.n
    rng = np.random.default_rng(spec.seed)
    if "colour" in spec.families:
        classes = {c: colour_class_pairs(phi, c) for c in range(1, phi.colours + 1)}
        for c in classes:
            for c2 in classes:
                yield "colour", f"class({c})xclass({c2})", classes[c], classes[c2]
    if "random" in spec.families:
        for rho in spec.random_densities:
            for t in range(spec.random_trials):
                P = PairSet.random(n, rho, rng)
                Q = PairSet.random(n, rho, rng)
                yield "random", f"rho={rho}#{t}", P, Q
    if "product" in spec.families:
        for t in range(spec.product_trials):
            X, Y, Z = (np.flatnonzero(rng.random(n) < 0.5) for _ in range(3))
            yield "product", f"XxY,XxZ#{t}", PairSet.product(n, X, Y), PairSet.product(n, X, Z)


def audit_density(H: Hypergraph3, phi: EdgeColouring, palette: Palette, spec: AuditSpec | None = None) -> AuditReport:
    """Empirical box-density audit of ``H`` against the palette's min codegree.

    For every tested ``(P, Q)`` the row records the exact ratio and the
    margin ``e - d*total + eta*n**3`` with ``d = min_codegree(palette)``;
    the density inequality held for the instance iff the margin is >= 0.
    Instances with no candidate incidences are skipped and noted.
    """
    spec = spec or AuditSpec()
    if H.n != phi.n:
        raise DimensionError(f"hypergraph has {H.n} vertices, colouring has {phi.n}")
    if phi.colours != palette.colours:
        raise ValueError("colouring and palette use different colour counts")
    d = min_codegree(palette)
    report = AuditReport(d=d, eta=spec.eta, n=H.n)
    for family, label, P, Q in _family_instances(phi, spec):
        counts = count_boxtimes(H, P, Q)
        if counts.total == 0:
            report.notes.append(f"skipped {family} {label}: no candidate pairs")
            continue
        report.rows.append(AuditRow(family, label, counts, counts.margin(d, spec.eta, H.n)))
    log.debug("audit: %d rows, min ratio %s", len(report.rows), report.min_ratio)
    return report
