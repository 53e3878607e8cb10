"""Depth-D boundary arcs and the exact boundary measures.

A boundary point is only ever seen through the cylinder arc of the rays that
share a given reduced prefix.  All measures are exact ``Fraction`` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .tree_core import (
    E0,
    Edge,
    TreeError,
    TruncationError,
    V0,
    Vertex,
    check_vertex,
    children,
    dist_e,
    dist_v,
    make_edge,
    word_to_str,
)


@dataclass(frozen=True, order=True)
class Arc:
    """The cylinder of boundary points whose ray from v0 starts with ``prefix``."""

    prefix: Vertex

    def __post_init__(self) -> None:
        p = check_vertex(self.prefix)
        if not p:
            raise TreeError("an arc needs a nonempty prefix")
        object.__setattr__(self, "prefix", p)

    @property
    def depth(self) -> int:
        return len(self.prefix)

    def to_str(self, q: int) -> str:
        return word_to_str(self.prefix, q)


# A depth-D ray carries exactly the information of its depth-D arc.
Ray = Arc


def ray(word: Vertex) -> Ray:
    return Arc(tuple(word))


def extend(prefix: Vertex, length: int, q: int, avoid: int | None = None) -> Vertex:
    """Deterministically extend a reduced word to the given length.

    The first appended letter also differs from ``avoid``.
    """
    w = list(prefix)
    while len(w) < length:
        last = w[-1] if w else None
        for a in range(q + 1):
            if a != last and not (avoid is not None and len(w) == len(prefix) and a == avoid):
                w.append(a)
                break
    return tuple(w)


def iter_arcs(D: int, q: int) -> Iterator[Arc]:
    def rec(v: Vertex) -> Iterator[Vertex]:
        if len(v) == D:
            yield v
            return
        for c in children(v, q):
            yield from rec(c)

    for w in rec(V0):
        yield Arc(w)


def partition(D: int, q: int) -> list[Arc]:
    """The (q+1)q^(D-1) depth-D arcs in lexicographic order."""
    if D < 1:
        raise TreeError("depth must be >= 1")
    return list(iter_arcs(D, q))


def arc_measure_v(a: Arc, q: int) -> Fraction:
    """Measure of the arc for the isotropic measure seen from v0."""
    return Fraction(1, (q + 1) * q ** (a.depth - 1))


def nu_vertex(a: Arc, q: int, center: Vertex = V0) -> Fraction:
    """Measure of the arc for the isotropic measure seen from ``center``.

    Exact as long as the prefix is longer than the center word, so that the
    arc is a cylinder from the center's point of view as well.
    """
    if a.depth <= len(center):
        raise TruncationError(f"arc depth {a.depth} does not resolve center of length {len(center)}")
    return Fraction(1, (q + 1) * q ** (dist_v(center, a.prefix) - 1))


def nu_edge(a: Arc, q: int, center: Edge = E0) -> Fraction:
    """Measure of the arc for the edge-isotropic measure seen from ``center``.

    Each side of the center edge carries mass 1/2 and every further edge
    splits its mass among q forward edges.
    """
    if a.depth < len(center.far):
        raise TruncationError(f"arc depth {a.depth} does not resolve edge {center!r}")
    last = make_edge(a.prefix[:-1], a.prefix)
    return Fraction(1, 2 * q ** dist_e(center, last))


def arc_measure_e(a: Arc, q: int) -> Fraction:
    return nu_edge(a, q, E0)


def xi_tube_measure(a: Arc, n: int, q: int) -> Fraction:
    """Invariant measure of the tube of horospheres tangent in ``a`` with index n."""
    return Fraction(q) ** n * arc_measure_v(a, q)
