"""Exact combinatorics of the homogeneous tree T_q.

The tree is realized as the Cayley graph of the free product of q+1 copies
of Z/2.  Vertices are reduced words over the letters 0..q, stored as tuples
of ints; the empty tuple is the reference vertex.  Edges are stored with the
endpoint nearer the reference vertex as ``base``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

Vertex = tuple[int, ...]

V0: Vertex = ()


class TreeError(ValueError):
    """Malformed word, edge or flag."""


class TruncationError(ValueError):
    """A request reaches beyond the truncation radius or depth."""


@dataclass(frozen=True)
class TreeParams:
    q: int
    R: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or self.q < 2:
            raise TreeError(f"q must be an integer >= 2, got {self.q!r}")
        if not isinstance(self.R, int) or self.R < 0:
            raise TreeError(f"radius must be a nonnegative integer, got {self.R!r}")


@dataclass(frozen=True)
class FlagMetricParam:
    xi_flag: Fraction = Fraction(1, 8)

    def __post_init__(self) -> None:
        xi = Fraction(self.xi_flag)
        if not 0 < xi < Fraction(1, 4):
            raise TreeError(f"xi_flag must lie in (0, 1/4), got {xi}")
        object.__setattr__(self, "xi_flag", xi)


class Edge(NamedTuple):
    base: Vertex
    letter: int

    @property
    def far(self) -> Vertex:
        return self.base + (self.letter,)

    @property
    def endpoints(self) -> tuple[Vertex, Vertex]:
        return (self.base, self.far)


E0 = Edge(V0, 0)


class Flag(NamedTuple):
    edge: Edge
    end: int  # 0 selects edge.base, 1 selects edge.far

    @property
    def vertex(self) -> Vertex:
        return self.edge.far if self.end else self.edge.base

    @property
    def other(self) -> Vertex:
        return self.edge.base if self.end else self.edge.far

    def flip(self) -> "Flag":
        return Flag(self.edge, 1 - self.end)


F0 = Flag(E0, 0)


# ---------------------------------------------------------------------------
# words and the word group
# ---------------------------------------------------------------------------


def is_reduced(word: Iterable[int], q: int | None = None) -> bool:
    prev = None
    for a in word:
        if a == prev or a < 0 or (q is not None and a > q):
            return False
        prev = a
    return True


def check_vertex(v: Vertex, q: int | None = None) -> Vertex:
    v = tuple(v)
    if not is_reduced(v, q):
        raise TreeError(f"not a reduced word: {v!r}")
    return v


def reduce_word(letters: Iterable[int]) -> Vertex:
    """Cancel adjacent equal letters (each generator is an involution)."""
    out: list[int] = []
    for a in letters:
        if out and out[-1] == a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def group_mul(u: Vertex, v: Vertex) -> Vertex:
    return reduce_word(u + v)


def group_inv(u: Vertex) -> Vertex:
    return tuple(reversed(u))


def lcp(u: Vertex, v: Vertex) -> int:
    """Length of the longest common prefix."""
    k = 0
    for a, b in zip(u, v):
        if a != b:
            break
        k += 1
    return k


def neighbors(v: Vertex, params: TreeParams | int) -> list[Vertex]:
    q = params.q if isinstance(params, TreeParams) else params
    v = check_vertex(v, q)
    out = [v[:-1]] if v else []
    last = v[-1] if v else None
    out.extend(v + (a,) for a in range(q + 1) if a != last)
    return sorted(out)


def children(v: Vertex, q: int) -> list[Vertex]:
    last = v[-1] if v else None
    return [v + (a,) for a in range(q + 1) if a != last]


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def dist_v(u: Vertex, v: Vertex) -> int:
    return len(u) + len(v) - 2 * lcp(u, v)


def join3(u: Vertex, v: Vertex, w: Vertex) -> Vertex:
    """The vertex common to the three pairwise geodesics (the median)."""
    # two of the three rooted meets coincide; the median is the deepest one
    meets = [u[: lcp(u, v)], u[: lcp(u, w)], v[: lcp(v, w)]]
    return max(meets, key=len)


def make_edge(u: Vertex, v: Vertex) -> Edge:
    """Canonical edge joining two adjacent vertices."""
    if len(v) == len(u) + 1 and v[:-1] == u:
        return Edge(u, v[-1])
    if len(u) == len(v) + 1 and u[:-1] == v:
        return Edge(v, u[-1])
    raise TreeError(f"vertices {u!r} and {v!r} are not adjacent")


def check_edge(e: Edge, q: int | None = None) -> Edge:
    e = Edge(tuple(e[0]), int(e[1]))
    check_vertex(e.far, q)
    return e


def dist_e(e1: Edge, e2: Edge) -> int:
    if e1 == e2:
        return 0
    return 1 + min(dist_v(a, b) for a in e1.endpoints for b in e2.endpoints)


def dist_mixed(v: Vertex, e: Edge) -> Fraction:
    return Fraction(1, 2) + min(dist_v(v, a) for a in e.endpoints)


def dist_f(f1: Flag, f2: Flag, xi: FlagMetricParam | Fraction | None = None) -> Fraction:
    if xi is None:
        xi = FlagMetricParam()
    x = xi.xi_flag if isinstance(xi, FlagMetricParam) else FlagMetricParam(Fraction(xi)).xi_flag
    return (1 - 2 * x) * dist_v(f1.vertex, f2.vertex) + 2 * x * dist_e(f1.edge, f2.edge)


def edge_length(e: Edge) -> int:
    """Distance from the reference edge."""
    return dist_e(e, E0)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def iter_ball(q: int, R: int) -> Iterator[Vertex]:
    """Vertices with |v| <= R in lexicographic order."""

    def rec(v: Vertex) -> Iterator[Vertex]:
        yield v
        if len(v) < R:
            for c in children(v, q):
                yield from rec(c)

    yield from rec(V0)


def ball(params: TreeParams) -> list[Vertex]:
    return list(iter_ball(params.q, params.R))


def circle(n: int, params: TreeParams) -> list[Vertex]:
    if n < 0:
        raise TreeError("radius must be nonnegative")
    if n > params.R:
        raise TruncationError(f"radius {n} exceeds truncation radius {params.R}")
    return [v for v in iter_ball(params.q, n) if len(v) == n]


def edges_within(q: int, R: int) -> list[Edge]:
    """Edges with both endpoints in the vertex ball of radius R."""
    return [Edge(v[:-1], v[-1]) for v in iter_ball(q, R) if v]


def edge_ball(q: int, n: int) -> list[Edge]:
    """Edges at distance <= n from the reference edge, lexicographic."""
    return [e for e in edges_within(q, n + 1) if edge_length(e) <= n]


def circle_e(n: int, params: TreeParams) -> list[Edge]:
    if n < 0:
        raise TreeError("radius must be nonnegative")
    if n > params.R:
        raise TruncationError(f"radius {n} exceeds truncation radius {params.R}")
    return [e for e in edge_ball(params.q, n) if edge_length(e) == n]


def flags_within(q: int, R: int) -> list[Flag]:
    return [Flag(e, end) for e in edges_within(q, R) for end in (0, 1)]


def circle_size(n: int, q: int) -> int:
    return 1 if n == 0 else (q + 1) * q ** (n - 1)


def circle_e_size(n: int, q: int) -> int:
    return 1 if n == 0 else 2 * q**n


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def word_to_str(v: Vertex, q: int) -> str:
    if q >= 10:
        return ".".join(str(a) for a in v)
    return "".join(str(a) for a in v)


def word_from_str(s: str, q: int) -> Vertex:
    s = s.strip()
    if not s:
        return V0
    parts = s.split(".") if q >= 10 else list(s)
    try:
        v = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise TreeError(f"bad word {s!r}") from exc
    return check_vertex(v, q)


def edge_to_str(e: Edge, q: int) -> str:
    return f"{word_to_str(e.base, q)}+{e.letter}"


def edge_from_str(s: str, q: int) -> Edge:
    base, sep, letter = s.strip().rpartition("+")
    if not sep:
        raise TreeError(f"bad edge {s!r}")
    return check_edge(Edge(word_from_str(base, q), int(letter)), q)


def flag_to_str(f: Flag, q: int) -> str:
    return f"{edge_to_str(f.edge, q)}@{f.end}"


def flag_from_str(s: str, q: int) -> Flag:
    edge, sep, end = s.strip().rpartition("@")
    if not sep or end not in ("0", "1"):
        raise TreeError(f"bad flag {s!r}")
    return Flag(edge_from_str(edge, q), int(end))
