"""Horospherical indices, Radon transforms and their duals.

Every index used here depends on a boundary point only through the length of
its common prefix with one target word (and, for edges, through the first
letter).  The depth-D arcs therefore split into at most L+q+1 groups per
target, and the transforms are computed group-wise instead of arc-wise:
Radon transforms through a difference trie pushed down to depth D, dual
transforms and inversions through subtree sums.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from .boundary import Arc, extend, nu_edge, partition
from .tree_core import (
    E0,
    Edge,
    Flag,
    TreeError,
    TruncationError,
    V0,
    Vertex,
    children,
    circle_e_size,
    circle_size,
    edge_ball,
    edge_length,
    iter_ball,
    lcp,
    word_to_str,
    edge_to_str,
    flag_to_str,
)

HALF = Fraction(1, 2)

VERTEX, EDGE, FLAG = "vertex", "edge", "flag"


# ---------------------------------------------------------------------------
# indices
# ---------------------------------------------------------------------------


def _word(ray: Arc | Sequence[int]) -> Vertex:
    return ray.prefix if isinstance(ray, Arc) else tuple(ray)


def _need(w: Vertex, length: int) -> None:
    if len(w) < max(length, 1):
        raise TruncationError(f"ray depth {len(w)} cannot resolve a word of length {length}")


def _hv(v: Vertex, w: Vertex) -> int:
    return 2 * lcp(v, w) - len(v)


def omega_side(e: Edge, ray: Arc | Sequence[int]) -> Vertex:
    """The endpoint of ``e`` nearer the boundary point."""
    w = _word(ray)
    _need(w, len(e.far))
    far = e.far
    return far if w[: len(far)] == far else e.base


def h_index_v(v: Vertex, ray: Arc | Sequence[int]) -> int:
    """Horospherical index of v relative to v0; positive toward the ray."""
    w = _word(ray)
    _need(w, len(v))
    return _hv(v, w)


def h_index_vv(v: Vertex, ref: Vertex, ray: Arc | Sequence[int]) -> int:
    """Index of v relative to the reference vertex ``ref``."""
    return h_index_v(v, ray) - h_index_v(ref, ray)


def h_index_e(e: Edge, ray: Arc | Sequence[int]) -> int:
    """Index of e relative to e0: the vertex index between their ray-side endpoints."""
    w = _word(ray)
    return _hv(omega_side(e, w), w) - _hv(omega_side(E0, w), w)


def h_index_ee(e: Edge, ref: Edge, ray: Arc | Sequence[int]) -> int:
    return h_index_e(e, ray) - h_index_e(ref, ray)


def h_index_mixed(x: Vertex | Edge, y: Vertex | Edge, ray: Arc | Sequence[int]) -> Fraction:
    """Half-integer index of a vertex relative to an edge, or of an edge relative to a vertex."""
    if isinstance(x, Edge) and not isinstance(y, Edge):
        return -h_index_mixed(y, x, ray)
    if isinstance(y, Edge) and not isinstance(x, Edge):
        w = _word(ray)
        _need(w, max(len(x), len(y.far)))
        return HALF + _hv(x, w) - _hv(omega_side(y, w), w)
    raise TreeError("mixed index needs one vertex and one edge")


def h_index_flag(f: Flag, ray: Arc | Sequence[int]) -> tuple[int, int]:
    """(edge index relative to e0, vertex index relative to v0)."""
    return (h_index_e(f.edge, ray), h_index_v(f.vertex, ray))


def cocycle_check(u: Vertex, v: Vertex, w: Vertex, ray: Arc | Sequence[int]) -> bool:
    """h(u,v) + h(v,w) == h(u,w) for the given boundary point."""
    return h_index_vv(u, v, ray) + h_index_vv(v, w, ray) == h_index_vv(u, w, ray)


def cocycle_check_ball(q: int, R: int, rays: Iterable[Arc | Sequence[int]]) -> bool:
    verts = list(iter_ball(q, R))
    for r in rays:
        h = {v: h_index_v(v, r) for v in verts}
        for a in verts:
            for b in verts:
                for c in verts:
                    if (h[a] - h[b]) + (h[b] - h[c]) != h[a] - h[c]:
                        return False
    return True


# ---------------------------------------------------------------------------
# arc groups
# ---------------------------------------------------------------------------


class ArcGroup(NamedTuple):
    include: Vertex  # arcs through this prefix ...
    exclude: Vertex | None  # ... but not through this one
    rep: Vertex  # a representative ray word


def arc_groups(target: Vertex, q: int) -> list[ArcGroup]:
    """Partition of the boundary on which every index tied to ``target`` is constant."""
    L = len(target)
    depth = max(L, 1)
    groups: list[ArcGroup] = []
    for c in range(q + 1):
        if L and c == target[0]:
            continue
        groups.append(ArcGroup((c,), None, extend((c,), depth, q)))
    for k in range(1, L):
        groups.append(ArcGroup(target[:k], target[: k + 1], extend(target[:k], depth, q, avoid=target[k])))
    if L:
        groups.append(ArcGroup(target, None, extend(target, depth, q)))
    return groups


def target_of(s: Vertex | Edge | Flag) -> Vertex:
    if isinstance(s, Flag):
        return s.edge.far
    if isinstance(s, Edge):
        return s.far
    return tuple(s)


INDEX_FN: dict[str, Callable[[Any, Vertex], Hashable]] = {
    VERTEX: h_index_v,
    EDGE: h_index_e,
    FLAG: h_index_flag,
}


# ---------------------------------------------------------------------------
# function containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteFn:
    """Finitely supported function on vertices, edges or flags."""

    kind: str
    q: int
    values: Mapping[Any, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in (VERTEX, EDGE, FLAG):
            raise TreeError(f"unknown support kind {self.kind!r}")
        object.__setattr__(self, "values", {k: v for k, v in self.values.items() if v != 0})

    def __call__(self, s: Any) -> Any:
        return self.values.get(s, 0)

    @property
    def radius(self) -> int:
        """Smallest vertex-ball radius containing the support."""
        return max((len(target_of(s)) for s in self.values), default=0)

    def total(self) -> Any:
        return sum(self.values.values(), Fraction(0))

    def key_str(self, s: Any) -> str:
        if self.kind == VERTEX:
            return word_to_str(s, self.q)
        if self.kind == EDGE:
            return edge_to_str(s, self.q)
        return flag_to_str(s, self.q)


def delta(kind: str, q: int, s: Any, value: Any = 1) -> FiniteFn:
    return FiniteFn(kind, q, {s: Fraction(value)})


@dataclass(frozen=True)
class HoroFn:
    """Function on the depth-D truncation of a horosphere space.

    ``values[prefix][n]`` is the value on the horosphere of index n tangent
    at the arc with that prefix.  Missing entries are zero.
    """

    kind: str
    q: int
    depth: int
    values: Mapping[Vertex, Mapping[Hashable, Any]]

    def get(self, prefix: Vertex, n: Hashable) -> Any:
        return self.values.get(prefix, {}).get(n, 0)

    def arcs(self) -> list[Vertex]:
        return [a.prefix for a in partition(self.depth, self.q)]

    def indices(self) -> list[Hashable]:
        return sorted({n for row in self.values.values() for n in row})

    def same_grid(self, other: "HoroFn") -> None:
        if (self.kind, self.q, self.depth) != (other.kind, other.q, other.depth):
            raise TruncationError("horospherical functions live on different truncations")

    def map_values(self, fn: Callable[[Any], Any]) -> "HoroFn":
        return HoroFn(self.kind, self.q, self.depth, {a: {n: fn(x) for n, x in row.items()} for a, row in self.values.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HoroFn):
            return NotImplemented
        if (self.kind, self.q, self.depth) != (other.kind, other.q, other.depth):
            return False
        keys = set(self.values) | set(other.values)
        for a in keys:
            r1, r2 = self.values.get(a, {}), other.values.get(a, {})
            for n in set(r1) | set(r2):
                if r1.get(n, 0) != r2.get(n, 0):
                    return False
        return True

    __hash__ = None  # type: ignore[assignment]

    def rows(self) -> Iterator[tuple[Vertex, Hashable, Any]]:
        for a in self.arcs():
            row = self.values.get(a, {})
            for n in sorted(row):
                yield a, n, row[n]


def _clean(row: Mapping[Hashable, Any]) -> dict[Hashable, Any]:
    return {n: x for n, x in row.items() if x != 0}


# ---------------------------------------------------------------------------
# Radon transforms
# ---------------------------------------------------------------------------


def _push_down(nodes: Mapping[Vertex, Mapping[Hashable, Any]], D: int, q: int) -> dict[Vertex, dict[Hashable, Any]]:
    out: dict[Vertex, dict[Hashable, Any]] = {}

    def rec(v: Vertex, acc: dict[Hashable, Any]) -> None:
        here = nodes.get(v)
        if here:
            acc = dict(acc)
            for n, x in here.items():
                acc[n] = acc.get(n, 0) + x
        if len(v) == D:
            row = _clean(acc)
            if row:
                out[v] = row
            return
        for c in children(v, q):
            rec(c, acc)

    rec(V0, {})
    return out


def radon(f: FiniteFn, D: int) -> HoroFn:
    """Sum of f over every horosphere of the depth-D truncation."""
    if D < max(f.radius, 1):
        raise TruncationError(f"depth {D} below support radius {f.radius}")
    index = INDEX_FN[f.kind]
    nodes: dict[Vertex, dict[Hashable, Any]] = defaultdict(dict)
    for s, val in f.values.items():
        for g in arc_groups(target_of(s), f.q):
            n = index(s, g.rep)
            nodes[g.include][n] = nodes[g.include].get(n, 0) + val
            if g.exclude is not None:
                nodes[g.exclude][n] = nodes[g.exclude].get(n, 0) - val
    return HoroFn(f.kind, f.q, D, _push_down(nodes, D, f.q))


def radon_v(f: FiniteFn, D: int) -> HoroFn:
    if f.kind != VERTEX:
        raise TreeError("radon_v needs a vertex function")
    return radon(f, D)


def radon_e(f: FiniteFn, D: int) -> HoroFn:
    if f.kind != EDGE:
        raise TreeError("radon_e needs an edge function")
    return radon(f, D)


def radon_f(f: FiniteFn, D: int) -> HoroFn:
    if f.kind != FLAG:
        raise TreeError("radon_f needs a flag function")
    return radon(f, D)


def radon_bruteforce(f: FiniteFn, D: int) -> HoroFn:
    """Arc-by-arc evaluation of the Radon transform (reference oracle)."""
    index = INDEX_FN[f.kind]
    vals: dict[Vertex, dict[Hashable, Any]] = {}
    for a in partition(D, f.q):
        row: dict[Hashable, Any] = {}
        for s, x in f.values.items():
            n = index(s, a.prefix)
            row[n] = row.get(n, 0) + x
        row = _clean(row)
        if row:
            vals[a.prefix] = row
    return HoroFn(f.kind, f.q, D, vals)


# ---------------------------------------------------------------------------
# group-wise integration
# ---------------------------------------------------------------------------


class SubtreeSums:
    """For each prefix p, the sums over depth-D arcs through p of F(arc, n)."""

    def __init__(self, F: HoroFn) -> None:
        self.F = F
        sums: dict[Vertex, dict[Hashable, Any]] = {a: dict(row) for a, row in F.values.items()}
        # accumulate level by level from the arcs up to the root
        level = list(sums)
        for _ in range(F.depth):
            parents: dict[Vertex, dict[Hashable, Any]] = {}
            for a in level:
                acc = parents.setdefault(a[:-1], {})
                for n, x in sums[a].items():
                    acc[n] = acc.get(n, 0) + x
            sums.update(parents)
            level = list(parents)
        sums.setdefault((), {})
        self.sums = sums

    def group(self, g: ArcGroup) -> dict[Hashable, Any]:
        out = dict(self.sums.get(g.include, {}))
        if g.exclude is not None:
            for n, x in self.sums.get(g.exclude, {}).items():
                out[n] = out.get(n, 0) - x
        return out


def arc_weight(kind: str, q: int, D: int, rep: Vertex) -> Fraction:
    """Reference measure of a single depth-D arc lying in the group of ``rep``."""
    if kind == EDGE:
        # mass 1/2 per side of e0; depth-D arcs on the side of letter 0 number q^(D-1)
        return Fraction(1, 2 * q ** (D - 1)) if rep[0] == 0 else Fraction(1, 2 * q**D)
    return Fraction(1, (q + 1) * q ** (D - 1))


def integrate_groups(
    F: HoroFn,
    target: Vertex,
    integrand: Callable[[Vertex, dict[Hashable, Any]], Any],
    sums: SubtreeSums | None = None,
    measure_kind: str | None = None,
) -> Any:
    """Sum over arc groups of weight * integrand(rep, group sums of F)."""
    if F.depth < max(len(target), 1):
        raise TruncationError(f"depth {F.depth} cannot resolve target of length {len(target)}")
    sums = sums or SubtreeSums(F)
    kind = measure_kind or F.kind
    total: Any = Fraction(0)
    for g in arc_groups(target, F.q):
        val = integrand(g.rep, sums.group(g))
        if val != 0:
            total += arc_weight(kind, F.q, F.depth, g.rep) * val
    return total


def integrate_index(F: HoroFn, n: Hashable, measure_kind: str | None = None) -> Any:
    """∫ F(ω, n) dν over the boundary, with ν = ν_v0 (vertex) or ν_e0 (edge)."""
    kind = measure_kind or F.kind
    total: Any = Fraction(0)
    for a, row in F.values.items():
        x = row.get(n, 0)
        if x != 0:
            total += arc_weight(kind, F.q, F.depth, a) * x
    return total


def dual_radon_v(F: HoroFn, v: Vertex, sums: SubtreeSums | None = None) -> Any:
    """Average of F over the horospheres through v, against the invariant tube measure.

    Pass ``sums`` to reuse the subtree sums of F across many vertices.
    """
    if F.kind != VERTEX:
        raise TreeError("dual_radon_v needs a vertex-horospherical function")

    def integrand(rep: Vertex, sums: dict[Hashable, Any]) -> Any:
        h = _hv(v, rep)
        return Fraction(F.q) ** h * sums.get(h, 0)

    return integrate_groups(F, v, integrand, sums)


def dual_radon_e(F: HoroFn, e: Edge, sums: SubtreeSums | None = None) -> Any:
    if F.kind != EDGE:
        raise TreeError("dual_radon_e needs an edge-horospherical function")

    def integrand(rep: Vertex, sums: dict[Hashable, Any]) -> Any:
        h = h_index_e(e, rep)
        return Fraction(F.q) ** h * sums.get(h, 0)

    return integrate_groups(F, e.far, integrand, sums)


# ---------------------------------------------------------------------------
# vertex-edge correspondence
# ---------------------------------------------------------------------------


def _xi_shift(prefix: Vertex) -> int:
    # 0 when the boundary point lies beyond the far endpoint of e0
    return 0 if prefix[0] == 0 else 1


def canonical_map_xi(F: HoroFn) -> HoroFn:
    """Relabel vertex-horospheres by the edge-horospheres of their ray-side edges."""
    if F.kind != VERTEX:
        raise TreeError("canonical_map_xi needs a vertex-horospherical function")
    vals = {a: {n + _xi_shift(a): x for n, x in row.items()} for a, row in F.values.items()}
    return HoroFn(EDGE, F.q, F.depth, vals)


def canonical_map_xi_inv(G: HoroFn) -> HoroFn:
    if G.kind != EDGE:
        raise TreeError("canonical_map_xi_inv needs an edge-horospherical function")
    vals = {a: {n - _xi_shift(a): x for n, x in row.items()} for a, row in G.values.items()}
    return HoroFn(VERTEX, G.q, G.depth, vals)


# ---------------------------------------------------------------------------
# radial functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialSeq:
    """Radial function given by its values on circles m = 0..len-1."""

    kind: str
    q: int
    values: tuple[Any, ...]

    def __call__(self, m: int) -> Any:
        return self.values[m] if 0 <= m < len(self.values) else 0

    @property
    def R(self) -> int:
        return len(self.values) - 1

    def circle_sizes(self) -> list[int]:
        size = circle_size if self.kind == VERTEX else circle_e_size
        return [size(m, self.q) for m in range(len(self.values))]

    def to_fn(self) -> FiniteFn:
        if self.kind == VERTEX:
            vals = {v: self(len(v)) for v in iter_ball(self.q, self.R)}
        else:
            vals = {e: self(edge_length(e)) for e in edge_ball(self.q, self.R)}
        return FiniteFn(self.kind, self.q, vals)

    def norm2(self) -> Any:
        return sum(abs(x) ** 2 * c for x, c in zip(self.values, self.circle_sizes()))


def element_length(kind: str, s: Any) -> int:
    return len(s) if kind == VERTEX else edge_length(s)


def radialize(f: FiniteFn) -> RadialSeq:
    """Average over circles around v0 (vertices) or e0 (edges)."""
    if f.kind == FLAG:
        raise TreeError("radialization is defined for vertex and edge functions")
    size = circle_size if f.kind == VERTEX else circle_e_size
    R = max((element_length(f.kind, s) for s in f.values), default=0)
    sums = [Fraction(0)] * (R + 1)
    for s, x in f.values.items():
        sums[element_length(f.kind, s)] += x
    return RadialSeq(f.kind, f.q, tuple(x / size(m, f.q) for m, x in enumerate(sums)))


def radialize_horo(F: HoroFn) -> dict[int, Any]:
    """Boundary average of F at each index, against ν_v0 or ν_e0."""
    return {n: integrate_index(F, n) for n in F.indices()}


def inner(f: FiniteFn, g: FiniteFn) -> Any:
    return sum((x * g(s) for s, x in f.values.items()), Fraction(0))


# ---------------------------------------------------------------------------
# word-group action
# ---------------------------------------------------------------------------


def translate(f: FiniteFn, lam: Vertex) -> FiniteFn:
    """(λ·f)(s) = f(λ^{-1} s) for the left action of the word group."""
    from .tree_core import group_mul, make_edge

    def act(s: Any) -> Any:
        if f.kind == VERTEX:
            return group_mul(lam, s)
        if f.kind == EDGE:
            return make_edge(group_mul(lam, s.base), group_mul(lam, s.far))
        e = make_edge(group_mul(lam, s.edge.base), group_mul(lam, s.edge.far))
        v = group_mul(lam, s.vertex)
        return Flag(e, 0 if v == e.base else 1)

    return FiniteFn(f.kind, f.q, {act(s): x for s, x in f.values.items()})
