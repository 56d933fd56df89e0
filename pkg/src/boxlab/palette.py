"""Colour patterns and palettes over the colours 1..ell.

A pattern is a multiset of three colours, stored as a sorted 3-tuple.  A
palette is a set of patterns together with the size of its colour set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

__all__ = [
    "Palette",
    "pattern",
    "all_patterns",
    "min_codegree",
    "third_colours",
    "standard_palette",
    "STANDARD_NAMES",
]

STANDARD_NAMES = ("cyclic3", "two_colour_nonmono", "exactly_two_of_three", "nonmono")


def pattern(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Canonical form of the colour multiset {a, b, c}."""
    return tuple(sorted((a, b, c)))  # type: ignore[return-value]


def all_patterns(colours: int) -> list[tuple[int, int, int]]:
    return list(itertools.combinations_with_replacement(range(1, colours + 1), 3))


@dataclass(frozen=True)
class Palette:
    colours: int
    patterns: frozenset

    def __init__(self, colours: int, patterns: Iterable = ()):
        if int(colours) != colours or colours < 1:
            raise ValueError(f"colour count must be a positive integer, got {colours!r}")
        canon = set()
        for p in patterns:
            p = tuple(p)
            if len(p) != 3:
                raise ValueError(f"pattern {p!r} does not have exactly three colours")
            for c in p:
                if int(c) != c or not 1 <= c <= colours:
                    raise ValueError(f"colour {c!r} in pattern {p!r} outside 1..{colours}")
            canon.add(pattern(*(int(c) for c in p)))
        object.__setattr__(self, "colours", int(colours))
        object.__setattr__(self, "patterns", frozenset(canon))

    def __contains__(self, p) -> bool:
        return pattern(*p) in self.patterns

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(sorted(self.patterns))

    def __or__(self, other: "Palette") -> "Palette":
        if other.colours != self.colours:
            raise ValueError("palettes over different colour sets")
        return Palette(self.colours, self.patterns | other.patterns)

    def __le__(self, other: "Palette") -> bool:
        return self.colours == other.colours and self.patterns <= other.patterns

    def automorphisms(self) -> list[tuple[int, ...]]:
        """Colour permutations mapping the palette onto itself.

        Each permutation is returned as a tuple ``g`` with ``g[c]`` the image
        of colour ``c`` (index 0 unused).  The identity is included.
        """
        result = []
        for perm in itertools.permutations(range(1, self.colours + 1)):
            g = (0,) + perm
            if all(pattern(g[a], g[b], g[c]) in self.patterns for a, b, c in self.patterns):
                result.append(g)
        return result

    def __repr__(self) -> str:
        body = ", ".join("".join(map(str, p)) for p in sorted(self.patterns))
        return f"Palette(colours={self.colours}, {{{body}}})"


def third_colours(palette: Palette, c: int, c2: int) -> list[int]:
    """Colours ``x`` such that ``{c, c2, x}`` is a pattern of the palette."""
    return [x for x in range(1, palette.colours + 1) if pattern(c, c2, x) in palette.patterns]


def min_codegree(palette: Palette) -> Fraction:
    """Largest ``d`` for which the palette is (d, box)-dense.

    Every ordered pair of (not necessarily distinct) colours must extend to
    at least ``d * ell`` patterns; the result is the exact minimum ratio.
    """
    ell = palette.colours
    worst = min(
        len(third_colours(palette, c, c2))
        for c in range(1, ell + 1)
        for c2 in range(1, ell + 1)
    )
    return Fraction(worst, ell)


def standard_palette(name: str, colours: int | None = None) -> Palette:
    """The named palettes used by the lower-bound constructions.

    ``cyclic3``               {112, 223, 133} over three colours
    ``two_colour_nonmono``    {112, 122} over two colours
    ``exactly_two_of_three``  all patterns with exactly two distinct colours, ell = 3
    ``nonmono``               all non-monochromatic patterns over ``colours`` colours

    ``nonmono(5)`` style names are accepted as well.
    """
    key = name.strip().lower().replace("-", "_")
    if key.startswith("nonmono(") and key.endswith(")"):
        colours = int(key[len("nonmono("):-1])
        key = "nonmono"
    if key == "cyclic3":
        return Palette(3, [(1, 1, 2), (2, 2, 3), (3, 3, 1)])
    if key == "two_colour_nonmono":
        return Palette(2, [(1, 1, 2), (2, 2, 1)])
    if key == "exactly_two_of_three":
        return Palette(3, [p for p in all_patterns(3) if len(set(p)) == 2])
    if key == "nonmono":
        if colours is None or colours < 2:
            raise ValueError("nonmono needs at least two colours")
        return Palette(colours, [p for p in all_patterns(colours) if len(set(p)) > 1])
    raise ValueError(f"unknown palette name {name!r}; expected one of {', '.join(STANDARD_NAMES)}")
