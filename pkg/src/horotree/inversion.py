"""Intersection counts, inversion of the horospherical Radon transforms,
range tests, the support theorem and the flag factorization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from fractions import Fraction
from itertools import combinations
from typing import Any, Hashable, Mapping, Sequence

from .boundary import partition
from .horospheres import (
    EDGE,
    FLAG,
    VERTEX,
    FiniteFn,
    HoroFn,
    RadialSeq,
    SubtreeSums,
    arc_groups,
    canonical_map_xi,
    h_index_e,
    h_index_v,
    integrate_groups,
    integrate_index,
)
from .tree_core import (
    E0,
    Edge,
    Flag,
    TreeError,
    TruncationError,
    V0,
    Vertex,
    circle_e_size,
    circle_size,
    dist_e,
    dist_mixed,
    dist_v,
    edge_length,
    edges_within,
    flags_within,
    iter_ball,
    lcp,
    neighbors,
)

class ImageConditionError(ValueError):
    """A pair of vertex and edge functions is not the projection of a flag function."""

    def __init__(self, residual: Any) -> None:
        super().__init__(f"sum of vertex values minus sum of edge values is {residual}, not 0")
        self.residual = residual


# ---------------------------------------------------------------------------
# intersection cardinalities
# ---------------------------------------------------------------------------


def k_v(n: int, m: int, q: int) -> int:
    """Number of vertices at distance m from v0 on the horosphere of index n."""
    if m < 0:
        return 0
    if m == n:
        return 1
    if m == -n:
        return q**m
    if m > abs(n) and (m - n) % 2 == 0:
        return (q - 1) * q ** ((m - n - 2) // 2)
    return 0


def k_e(n: int, m: int, q: int) -> int:
    """Number of edges at distance m from e0 on the edge-horosphere of index n."""
    if m < 0:
        return 0
    if m == n:
        return 1
    if n == -m:
        return q**m
    if abs(n) < m and (n + m) % 2 == 1:
        return (q - 1) * q ** ((m - n - 1) // 2)
    return 0


def k_v_bruteforce(n: int, m: int, q: int, ray: Sequence[int] | None = None) -> int:
    w = tuple(ray) if ray is not None else _default_ray(m, q)
    return sum(1 for v in iter_ball(q, m) if len(v) == m and h_index_v(v, w) == n)


def k_e_bruteforce(n: int, m: int, q: int, ray: Sequence[int] | None = None) -> int:
    w = tuple(ray) if ray is not None else _default_ray(m + 1, q)
    return sum(1 for e in edges_within(q, m + 1) if edge_length(e) == m and h_index_e(e, w) == n)


def _default_ray(D: int, q: int) -> Vertex:
    # alternate 1,2,1,2,... so the ray leaves e0 on the side of v0
    return tuple(1 + (i % 2) for i in range(max(D, 1)))


# ---------------------------------------------------------------------------
# inversion coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvCoeffs:
    kind: str
    choice: str
    q: int
    N: int
    values: Mapping[int, Fraction] = field(default_factory=dict)

    def __call__(self, n: int) -> Fraction:
        if abs(n) > self.N:
            raise TruncationError(f"coefficient {n} outside the computed range [-{self.N}, {self.N}]")
        return self.values.get(n, Fraction(0))

    def items(self) -> list[tuple[int, Fraction]]:
        return [(n, self.values.get(n, Fraction(0))) for n in range(-self.N, self.N + 1)]


def inv_coeffs_v(choice: int | str = 1, N: int = 8, q: int = 2, seeds: Mapping[int, Any] | None = None) -> InvCoeffs:
    """Vertex inversion coefficients d_n for |n| <= N.

    ``choice`` is 1, 2 or "custom"; a custom family takes arbitrary values
    for n < 0 from ``seeds`` (missing entries are 0) and solves the recurrence
    for n > 0.
    """
    d: dict[int, Fraction] = {}
    if choice == 1:
        d[0] = Fraction(1)
        for n in range(2, N + 1, 2):
            d[n] = Fraction(1 - q)
    elif choice == 2:
        for n in range(-N, N + 1):
            if n % 2:
                continue
            d[n] = Fraction(1) if n <= 0 else Fraction(1 - q - q**n)
    elif choice == "custom":
        seeds = dict(seeds or {})
        if 0 in seeds and Fraction(seeds[0]) != 1:
            raise TreeError("custom seeds must keep d_0 = 1")
        if any(n > 0 for n in seeds):
            raise TreeError("custom seeds are given for n < 0 only")
        d = {n: Fraction(x) for n, x in seeds.items() if n < 0}
        d[0] = Fraction(1)
        for n in range(1, N + 1):
            acc = Fraction(q) ** n * d.get(-n, 0)
            acc += (q - 1) * sum((Fraction(q) ** (j - 1) * d.get(n - 2 * j, 0) for j in range(1, n)), Fraction(0))
            d[n] = -acc
    else:
        raise TreeError(f"unknown coefficient choice {choice!r}")
    d = {n: x for n, x in d.items() if x != 0 and abs(n) <= N}
    return InvCoeffs(VERTEX, str(choice), q, N, d)


def inv_coeffs_e(choice: int = 1, N: int = 8, q: int = 2) -> InvCoeffs:
    """Edge inversion coefficients l_n for |n| <= N.

    Choice 1 vanishes for n < 0; its positive-index terms are nonzero at odd
    n as well (the odd terms are forced by the column m = 1).
    """
    ell: dict[int, Fraction] = {}
    if choice == 1:
        ell[0] = Fraction(1)
        for n in range(1, N + 1):
            ell[n] = Fraction(1 - q, 1 + q) * (1 - (-q) ** n)
    elif choice == 2:
        for n in range(-N, N + 1):
            if n <= 0:
                ell[n] = Fraction((-1) ** (-n))
            else:
                ell[n] = Fraction(2 * (1 - (-q) ** n), 1 + q) - 1
    else:
        raise TreeError(f"unknown coefficient choice {choice!r}")
    return InvCoeffs(EDGE, str(choice), q, N, {n: x for n, x in ell.items() if x != 0})


def vertex_recurrence_residual(d: InvCoeffs, n: int) -> Fraction:
    q = d.q
    acc = d(n) + Fraction(q) ** n * d(-n)
    acc += (q - 1) * sum((Fraction(q) ** (j - 1) * d(n - 2 * j) for j in range(1, n)), Fraction(0))
    return acc


def row_by_column(c: InvCoeffs, m: int) -> Fraction:
    """Σ_n c_n k(n, m); equals 1 for m = 0 and 0 otherwise for a valid family."""
    k = k_v if c.kind == VERTEX else k_e
    if m > c.N:
        raise TruncationError(f"column {m} needs coefficients up to {m}")
    return sum((c(n) * k(n, m, c.q) for n in range(-m, m + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# radial inversion
# ---------------------------------------------------------------------------


def radial_radon(f: RadialSeq) -> dict[int, Any]:
    """φ_n = Σ_m k(n, m) f_m, the Radon transform of a radial function."""
    k = k_v if f.kind == VERTEX else k_e
    R = f.R
    out: dict[int, Any] = {}
    for n in range(-R, R + 1):
        s = sum((k(n, m, f.q) * f(m) for m in range(abs(n), R + 1)), Fraction(0))
        if s != 0:
            out[n] = s
    return out


def invert_radial(phi: Mapping[int, Any], coeffs: InvCoeffs) -> Any:
    """Σ_n c_n φ_n: the value at the reference element."""
    return sum((coeffs(n) * x for n, x in phi.items()), Fraction(0))


def invert_radial_v(phi: Mapping[int, Any], coeffs: InvCoeffs) -> Any:
    if coeffs.kind != VERTEX:
        raise TreeError("vertex inversion needs vertex coefficients")
    return invert_radial(phi, coeffs)


def invert_radial_e(phi: Mapping[int, Any], coeffs: InvCoeffs) -> Any:
    if coeffs.kind != EDGE:
        raise TreeError("edge inversion needs edge coefficients")
    return invert_radial(phi, coeffs)


# ---------------------------------------------------------------------------
# full inversion
# ---------------------------------------------------------------------------


def _max_index(F: HoroFn) -> int:
    return max((abs(n) for row in F.values.values() for n in row), default=0)


def _coeffs_for(F: HoroFn, target_len: int, coeffs: InvCoeffs | int | None, kind: str) -> InvCoeffs:
    need = _max_index(F) + target_len + 2
    if coeffs is None or isinstance(coeffs, int):
        choice = 1 if coeffs is None else coeffs
        make = inv_coeffs_v if kind == VERTEX else inv_coeffs_e
        return make(choice, need, F.q)
    if coeffs.kind != kind:
        raise TreeError(f"{kind} inversion needs {kind} coefficients")
    if coeffs.N < need:
        raise TruncationError(f"coefficients known up to {coeffs.N}, need {need}")
    return coeffs


def _invert_at(F: HoroFn, target: Vertex, index_of, coeffs: InvCoeffs, sums: SubtreeSums) -> Any:
    q = F.q
    nonzero = [(n, c) for n, c in coeffs.items() if c != 0]

    def integrand(rep: Vertex, g: dict[Hashable, Any]) -> Any:
        if not g:
            return 0
        h = index_of(rep)
        acc = sum((c * g.get(n + h, 0) for n, c in nonzero), Fraction(0))
        return Fraction(q) ** h * acc if acc != 0 else 0

    return integrate_groups(F, target, integrand, sums)


def invert_full_v(F: HoroFn, v: Vertex, coeffs: InvCoeffs | int | None = None, sums: SubtreeSums | None = None) -> Any:
    """Recover f(v) from F = radon_v(f).

    Each index is re-based to the chart of the horospheres through v and
    integrated against the measure seen from v.
    """
    if F.kind != VERTEX:
        raise TreeError("invert_full_v needs a vertex-horospherical function")
    c = _coeffs_for(F, len(v), coeffs, VERTEX)
    return _invert_at(F, tuple(v), lambda rep: h_index_v(v, rep), c, sums or SubtreeSums(F))


def invert_full_e(F: HoroFn, e: Edge, coeffs: InvCoeffs | int | None = None, sums: SubtreeSums | None = None) -> Any:
    if F.kind != EDGE:
        raise TreeError("invert_full_e needs an edge-horospherical function")
    c = _coeffs_for(F, len(e.far), coeffs, EDGE)
    return _invert_at(F, e.far, lambda rep: h_index_e(e, rep), c, sums or SubtreeSums(F))


def invert_all(F: HoroFn, radius: int, coeffs: InvCoeffs | int | None = None) -> FiniteFn:
    """Invert at every vertex (or edge) of the vertex ball of the given radius."""
    if F.depth < radius:
        raise TruncationError(f"depth {F.depth} below radius {radius}")
    sums = SubtreeSums(F)
    if F.kind == VERTEX:
        c = _coeffs_for(F, radius, coeffs, VERTEX)
        vals = {v: _invert_at(F, v, partial(h_index_v, v), c, sums) for v in iter_ball(F.q, radius)}
    elif F.kind == EDGE:
        c = _coeffs_for(F, radius + 1, coeffs, EDGE)
        vals = {e: _invert_at(F, e.far, partial(h_index_e, e), c, sums) for e in edges_within(F.q, radius)}
    else:
        raise TreeError("use invert_flag for flag functions")
    return FiniteFn(F.kind, F.q, vals)


# ---------------------------------------------------------------------------
# range conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CavalieriReport:
    residuals: dict[Any, Any]
    arc_totals: dict[Vertex, Any]
    arc_total_constant: bool

    @property
    def passed(self) -> bool:
        return self.arc_total_constant and all(r == 0 for r in self.residuals.values())

    def first_failure(self) -> Any:
        for n in sorted(self.residuals):
            if self.residuals[n] != 0:
                return n
        return None


def _arc_totals(F: HoroFn) -> tuple[dict[Vertex, Any], bool]:
    totals = {a: sum(F.values.get(a, {}).values(), Fraction(0)) for a in F.arcs()}
    return totals, len(set(totals.values())) <= 1


def cavalieri_check(F: HoroFn) -> CavalieriReport:
    """Residuals q^n ∫F(·,n) - ∫F(·,-n), n = 1..D, and arc-total constancy.

    Integrals use ν_v0 for vertex functions and ν_e0 for edge functions.
    """
    if F.kind == FLAG:
        raise TreeError("flag functions are checked through their projections")
    q = F.q
    res = {}
    for n in range(1, F.depth + 1):
        res[n] = Fraction(q) ** n * integrate_index(F, n) - integrate_index(F, -n)
    totals, const = _arc_totals(F)
    return CavalieriReport(res, totals, const)


def cavalieri_check_v(F: HoroFn) -> CavalieriReport:
    if F.kind != VERTEX:
        raise TreeError("cavalieri_check_v needs a vertex-horospherical function")
    return cavalieri_check(F)


def cavalieri_check_e(F: HoroFn) -> CavalieriReport:
    if F.kind != EDGE:
        raise TreeError("cavalieri_check_e needs an edge-horospherical function")
    return cavalieri_check(F)


def _beyond_e0(prefix: Vertex) -> int:
    return 1 if prefix[0] == 0 else 0


def mixed_edge_value(G: HoroFn, prefix: Vertex, n: int) -> Any:
    """ψ(ω, n+1/2): G on the edge-horosphere whose edges sit at half-index n+1/2 from v0.

    The half-index of an edge relative to v0 is the vertex index of its
    ray-side endpoint minus 1/2.
    """
    return G.get(prefix, n + 1 - _beyond_e0(prefix))


def mixed_vertex_value(F: HoroFn, prefix: Vertex, n: int) -> Any:
    """φ(ω, n+1/2): F on the vertex-horosphere at half-index n+1/2 from e0."""
    return F.get(prefix, n + _beyond_e0(prefix))


def _mixed_integral(H: HoroFn, n: int, value, measure_kind: str) -> Any:
    from .horospheres import arc_weight

    total: Any = Fraction(0)
    for a in H.values:
        x = value(H, a, n)
        if x != 0:
            total += arc_weight(measure_kind, H.q, H.depth, a) * x
    return total


def cavalieri_check_mixed(F: HoroFn) -> CavalieriReport:
    """Half-integer moment identities around v0 for an edge-horospherical function.

    Residuals q^(n+1) ∫ψ(·,n+1/2)dν_v0 - ∫ψ(·,-n-1/2)dν_v0 for n = 0..D.
    A vertex-horospherical input is first carried to edge-horospheres by the
    canonical correspondence.  Edge Radon images satisfy these identities
    only when supported on edges at v0 (see tests/test_inversion.py), so
    this is not a range test; it feeds the row functionals of mixed_rows.
    """
    G = canonical_map_xi(F) if F.kind == VERTEX else F
    if G.kind != EDGE:
        raise TreeError("cavalieri_check_mixed needs a vertex or edge horospherical function")
    q = G.q
    res = {}
    for n in range(0, G.depth + 1):
        res[n] = Fraction(q) ** (n + 1) * _mixed_integral(G, n, mixed_edge_value, VERTEX) - _mixed_integral(
            G, -n - 1, mixed_edge_value, VERTEX
        )
    totals, const = _arc_totals(G)
    return CavalieriReport(res, totals, const)


def cavalieri_residuals_mixed_vertex(F: HoroFn) -> dict[int, Any]:
    """q^n ∫φ(·,n+1/2)dν_e0 - ∫φ(·,-n-1/2)dν_e0 for a vertex function, n = 0..D.

    Vertex Radon images make these vanish only when supported on the
    endpoints of e0, so this is not a range test either.
    """
    if F.kind != VERTEX:
        raise TreeError("needs a vertex-horospherical function")
    q = F.q
    return {
        n: Fraction(q) ** n * _mixed_integral(F, n, mixed_vertex_value, EDGE)
        - _mixed_integral(F, -n - 1, mixed_vertex_value, EDGE)
        for n in range(0, F.depth + 1)
    }


def circle_sums(f: FiniteFn) -> list[Any]:
    if f.kind != VERTEX:
        raise TreeError("circle sums are taken for vertex functions")
    out = [Fraction(0)] * (f.radius + 1)
    for v, x in f.values.items():
        out[len(v)] += x
    return out


def mixed_rows(chi: Sequence[Any], q: int, n_max: int) -> list[Any]:
    """Row functionals of the mixed edge test applied to Ξ of a vertex Radon image.

    Row n equals (q+1) times the n-th mixed residual, written in circle sums.
    """
    K = len(chi)

    def c(j: int) -> Any:
        return chi[j] if 0 <= j < K else 0

    rows = []
    for n in range(n_max + 1):
        head = q * (q + 1) * c(0) - q * c(1) if n == 0 else q * q * c(n) - q * c(n + 1)
        tail = sum(
            (Fraction(q) ** (1 - j) * c(2 * j + n) - Fraction(q) ** (-j) * c(2 * j + n + 1) for j in range(1, K)),
            Fraction(0),
        )
        rows.append(head + (q - 1) * tail)
    return rows


def range_nonoverlap_probe(f: FiniteFn, n_max: int | None = None) -> int | None:
    """First row n whose mixed functional is nonzero, or None."""
    chi = circle_sums(f)
    n_max = len(chi) if n_max is None else n_max
    for n, r in enumerate(mixed_rows(chi, f.q, n_max)):
        if r != 0:
            return n
    return None


def plancherel_pairing_v(F: HoroFn, G: HoroFn, coeffs: InvCoeffs | int | None = None) -> Any:
    """Σ_n q^n ∫ F(ω,n) (G(ω,·) * d†)(n) dν_v0, with d†_n = d_{-n}."""
    F.same_grid(G)
    need = _max_index(F) + _max_index(G) + 1
    if coeffs is None or isinstance(coeffs, int):
        c = inv_coeffs_v(1 if coeffs is None else coeffs, need, F.q)
    else:
        c = coeffs
    q = F.q
    total: Any = Fraction(0)
    for a, row in F.values.items():
        grow = G.values.get(a, {})
        if not grow:
            continue
        acc = Fraction(0)
        for n, x in row.items():
            conv = sum((y * c(k - n) for k, y in grow.items()), Fraction(0))
            acc += Fraction(q) ** n * x * _conj(conv)
        total += acc
    from .horospheres import arc_weight

    return total * arc_weight(VERTEX, q, F.depth, next(iter(F.values), (0,)))


def _conj(x: Any) -> Any:
    return x.conjugate() if isinstance(x, complex) else x


# ---------------------------------------------------------------------------
# support theorem
# ---------------------------------------------------------------------------


def geodesic(u: Vertex, v: Vertex) -> list[Vertex]:
    k = lcp(u, v)
    up = [u[:i] for i in range(len(u), k - 1, -1)]
    down = [v[:i] for i in range(k + 1, len(v) + 1)]
    return up + down


def is_convex(C: Sequence[Vertex]) -> bool:
    S = set(map(tuple, C))
    if not S:
        return False
    return all(set(geodesic(a, b)) <= S for a, b in combinations(sorted(S), 2))


def convex_sets(q: int, R: int, max_diameter: int = 2) -> list[frozenset]:
    """All convex vertex sets of diameter <= 2 inside the ball (diameter 0, 1, 2 only)."""
    if max_diameter > 2:
        raise TreeError("only diameters up to 2 are enumerated")
    verts = list(iter_ball(q, R))
    inside = set(verts)
    out: set[frozenset] = set()
    for v in verts:
        out.add(frozenset([v]))
        nbrs = [u for u in neighbors(v, q) if u in inside]
        if max_diameter >= 1:
            for u in nbrs:
                out.add(frozenset([u, v]))
        if max_diameter >= 2:
            for k in range(2, len(nbrs) + 1):
                for S in combinations(nbrs, k):
                    out.add(frozenset((v,) + S))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def horospheres_missing(C: Sequence[Vertex], q: int, D: int, n_range: int) -> list[tuple[Vertex, int]]:
    Cs = [tuple(c) for c in C]
    out = []
    for a in partition(D, q):
        hit = {h_index_v(c, a) for c in Cs}
        out.extend((a.prefix, n) for n in range(-n_range, n_range + 1) if n not in hit)
    return out


def support_check(f: FiniteFn, C: Sequence[Vertex], D: int | None = None) -> bool:
    """True iff (R f = 0 on every visible horosphere missing C) implies (f = 0 off C)."""
    if not is_convex(C):
        raise TreeError("support_check needs a convex set")
    D = max(f.radius, max(len(c) for c in C), 1) if D is None else D
    F = radon_of(f, D)
    Cs = set(map(tuple, C))
    vanishes = all(F.get(a, n) == 0 for a, n in horospheres_missing(C, f.q, D, D))
    off = all(x == 0 for v, x in f.values.items() if v not in Cs)
    return (not vanishes) or off


def radon_of(f: FiniteFn, D: int) -> HoroFn:
    from .horospheres import radon

    return radon(f, D)


def support_theorem_holds(C: Sequence[Vertex], q: int, R: int, D: int | None = None) -> bool:
    """Checks the support implication for every f supported in the ball at once.

    The kernel of the restricted Radon map must vanish off C, i.e. the
    columns of vertices outside C are independent modulo those inside C.
    """
    import sympy

    if not is_convex(C):
        raise TreeError("support_theorem_holds needs a convex set")
    D = R if D is None else D
    verts = list(iter_ball(q, R))
    Cs = set(map(tuple, C))
    rows = horospheres_missing(C, q, D, D)
    row_index = {r: i for i, r in enumerate(rows)}
    M = [[0] * len(verts) for _ in rows]
    for j, v in enumerate(verts):
        for a in partition(D, q):
            n = h_index_v(v, a)
            i = row_index.get((a.prefix, n))
            if i is not None:
                M[i][j] = 1
    inside = [j for j, v in enumerate(verts) if v in Cs]
    outside = [j for j, v in enumerate(verts) if v not in Cs]
    full = sympy.Matrix(len(rows), len(verts), [x for row in M for x in row])
    rank_all = full.rank()
    rank_in = full.extract(list(range(len(rows))), inside).rank() if inside else 0
    return rank_all == rank_in + len(outside)


# ---------------------------------------------------------------------------
# flags
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlagPair:
    g_E: FiniteFn
    g_V: FiniteFn

    def image_residual(self) -> Any:
        return self.g_V.total() - self.g_E.total()


def flag_project(h: FiniteFn) -> FlagPair:
    if h.kind != FLAG:
        raise TreeError("flag_project needs a flag function")
    gV: dict[Vertex, Any] = {}
    gE: dict[Edge, Any] = {}
    for f, x in h.values.items():
        gV[f.vertex] = gV.get(f.vertex, 0) + x
        gE[f.edge] = gE.get(f.edge, 0) + x
    return FlagPair(FiniteFn(EDGE, h.q, gE), FiniteFn(VERTEX, h.q, gV))


def lift_value(p: FlagPair, f: Flag, lam: Any = Fraction(1, 2)) -> Any:
    """λ(backward edge sum - backward vertex sum) - (1-λ)(forward edge sum - forward vertex sum)."""
    e_f, v_f = f.edge, f.vertex
    back_e = sum((x for e, x in p.g_E.values.items() if dist_e(e, e_f) < dist_mixed(v_f, e)), Fraction(0))
    fwd_e = sum((x for e, x in p.g_E.values.items() if dist_e(e, e_f) > dist_mixed(v_f, e)), Fraction(0))
    back_v = sum((x for v, x in p.g_V.values.items() if dist_mixed(v, e_f) < dist_v(v, v_f)), Fraction(0))
    fwd_v = sum((x for v, x in p.g_V.values.items() if dist_mixed(v, e_f) > dist_v(v, v_f)), Fraction(0))
    return lam * (back_e - back_v) - (1 - lam) * (fwd_e - fwd_v)


def flag_lift(p: FlagPair, lam: Any = Fraction(1, 2), R: int | None = None) -> FiniteFn:
    """The unique finitely supported flag function projecting to the pair."""
    r = p.image_residual()
    if r != 0:
        raise ImageConditionError(r)
    q = p.g_V.q
    if R is None:
        R = max(p.g_V.radius, p.g_E.radius, 1)
    return FiniteFn(FLAG, q, {f: lift_value(p, f, lam) for f in flags_within(q, R)})


def project_horo(F: HoroFn) -> tuple[HoroFn, HoroFn]:
    """Sum a flag-horospherical function over the two flag-horospheres covering
    each edge-horosphere and each vertex-horosphere."""
    if F.kind != FLAG:
        raise TreeError("project_horo needs a flag-horospherical function")
    ve: dict[Vertex, dict[int, Any]] = {}
    vv: dict[Vertex, dict[int, Any]] = {}
    for a, row in F.values.items():
        re, rv = ve.setdefault(a, {}), vv.setdefault(a, {})
        for (nE, nV), x in row.items():
            re[nE] = re.get(nE, 0) + x
            rv[nV] = rv.get(nV, 0) + x
    clean = lambda d: {a: {n: x for n, x in r.items() if x != 0} for a, r in d.items()}
    return HoroFn(EDGE, F.q, F.depth, clean(ve)), HoroFn(VERTEX, F.q, F.depth, clean(vv))


def invert_flag_all(
    F: HoroFn,
    R: int,
    coeffs_v: InvCoeffs | int | None = None,
    coeffs_e: InvCoeffs | int | None = None,
    lam: Any = Fraction(1, 2),
    check: bool = True,
) -> FiniteFn:
    """Recover a flag function supported on edges inside the ball of radius R."""
    GE, GV = project_horo(F)
    if check:
        for G in (GE, GV):
            rep = cavalieri_check(G)
            if not rep.passed:
                raise ValueError(f"projected {G.kind} function fails the range test at n={rep.first_failure()}")
    gV = invert_all(GV, R, coeffs_v)
    gE = invert_all(GE, R, coeffs_e)
    return flag_lift(FlagPair(gE, gV), lam, R)


def invert_flag(F: HoroFn, f: Flag, R: int | None = None, **kw: Any) -> Any:
    R = F.depth if R is None else R
    return invert_flag_all(F, R, **kw)(f)


def in_edge_range(G: HoroFn) -> bool:
    """Whether G is the edge Radon transform of a function supported in the truncation.

    A preimage, if one exists, is recovered by the inversion formula, so the
    test inverts on a ball that covers every index of G and transforms back.
    """
    from .horospheres import radon

    if G.kind != EDGE:
        raise TreeError("in_edge_range needs an edge-horospherical function")
    R = min(_max_index(G) + 1, G.depth)
    g = invert_all(G, R)
    return radon(g, G.depth) == G


def nonoverlap_direct(f: FiniteFn, D: int | None = None) -> bool:
    """True iff Ξ(radon_v f) is not an edge Radon image (expected for f != 0)."""
    from .horospheres import radon

    D = max(f.radius + 2, 2) if D is None else D
    return not in_edge_range(canonical_map_xi(radon(f, D)))
