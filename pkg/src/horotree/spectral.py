"""Zonal spherical analysis on T_q: eigenvalue maps, spherical functions,
spherical Fourier transforms, Plancherel quadrature, resolvents, the
back-projection kernels and their symbols.

Complex values are double precision; kernels supported on integral
exponents are returned as exact fractions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.integrate import simpson

from .boundary import partition
from .horospheres import (
    EDGE,
    VERTEX,
    FiniteFn,
    HoroFn,
    RadialSeq,
    arc_weight,
    h_index_e,
    h_index_v,
    radialize,
    radon,
)
from .tree_core import (
    E0,
    Edge,
    TreeError,
    TruncationError,
    V0,
    Vertex,
    circle_e_size,
    circle_size,
    dist_e,
    edge_ball,
    edge_length,
    edges_within,
    group_mul,
    iter_ball,
    make_edge,
    neighbors,
)

DEGENERATE_TOL = 1e-12


class DegenerateError(ValueError):
    """z lies on the degenerate set q^(2z-1) = 1, where c and d have poles."""


class QuadratureError(RuntimeError):
    """Doubling the grid did not reach the requested tolerance."""


# ---------------------------------------------------------------------------
# eigenvalue maps and c, d coefficients
# ---------------------------------------------------------------------------


def _qz(q: int, z: complex) -> complex:
    return cmath.exp(z * math.log(q))


def is_degenerate(z: complex, q: int, tol: float = DEGENERATE_TOL) -> bool:
    return abs(_qz(q, 2 * z - 1) - 1) < tol


def gamma_v(z: complex, q: int) -> complex:
    return (_qz(q, z) + _qz(q, 1 - z)) / (q + 1)


def gamma_e(z: complex, q: int) -> complex:
    return (_qz(q, z) + q - 1 + _qz(q, 1 - z)) / (2 * q)


def c_coeff(z: complex, q: int) -> complex:
    if is_degenerate(z, q):
        raise DegenerateError(f"c(z) has a pole at z={z}")
    return (_qz(q, 1 - z) - _qz(q, z - 1)) / ((q + 1) * (_qz(q, -z) - _qz(q, z - 1)))


def d_coeff(z: complex, q: int) -> complex:
    if is_degenerate(z, q):
        raise DegenerateError(f"d(z) has a pole at z={z}")
    return 0.5 * (q - 1 + _qz(q, 1 - z) - _qz(q, z)) / (_qz(q, 1 - z) - _qz(q, z))


@dataclass(frozen=True)
class SpectralPoint:
    z: complex
    q: int

    @property
    def degenerate(self) -> bool:
        return is_degenerate(self.z, self.q)

    @property
    def gamma_v(self) -> complex:
        return gamma_v(self.z, self.q)

    @property
    def gamma_e(self) -> complex:
        return gamma_e(self.z, self.q)

    @property
    def c(self) -> complex | None:
        return None if self.degenerate else c_coeff(self.z, self.q)

    @property
    def d(self) -> complex | None:
        return None if self.degenerate else d_coeff(self.z, self.q)


# ---------------------------------------------------------------------------
# spherical functions
# ---------------------------------------------------------------------------


def _spherical(z: complex, n: int, q: int, coeff: Callable[[complex, int], complex], slope: float, degenerate: bool | None, scale: bool = False) -> complex:
    """c(z) q^(-zn) + c(1-z) q^((z-1)n), or (1 + slope·n) q^(-zn) on the degenerate set.

    With ``scale`` the value is multiplied by q^(n/2), computed without overflow.
    """
    if n < 0:
        raise TreeError("spherical functions are evaluated at lengths n >= 0")
    if degenerate is None:
        degenerate = is_degenerate(z, q)
    shift = n / 2 if scale else 0.0
    if degenerate:
        return (1 + slope * n) * _qz(q, -z * n + shift)
    return coeff(z, q) * _qz(q, -z * n + shift) + coeff(1 - z, q) * _qz(q, (z - 1) * n + shift)


def spherical_v(z: complex, n: int, q: int, degenerate: bool | None = None, scale: bool = False) -> complex:
    """φ^V_z at a vertex of length n; ``degenerate`` forces a branch."""
    return _spherical(z, n, q, c_coeff, (q - 1) / (q + 1), degenerate, scale)


def _edge_slope(z: complex, q: int) -> float:
    # q^(z-1/2) = ±1 on the degenerate set; the sign enters the linear term
    sign = 1.0 if _qz(q, z - 0.5).real > 0 else -1.0
    return sign * (q - 1) / (2 * math.sqrt(q))


def spherical_e(z: complex, n: int, q: int, degenerate: bool | None = None, scale: bool = False) -> complex:
    """φ^E_z at an edge of length n."""
    return _spherical(z, n, q, d_coeff, _edge_slope(z, q), degenerate, scale)


def spherical_seq(kind: str, z: complex, R: int, q: int) -> list[complex]:
    fn = spherical_v if kind == VERTEX else spherical_e
    return [fn(z, n, q) for n in range(R + 1)]


def spherical_boundary_integral(kind: str, z: complex, n: int, q: int) -> complex:
    """∫ q^(z h) dν over the boundary at one element of length n, summed arc by arc."""
    if kind == VERTEX:
        v = tuple(1 + (i % 2) for i in range(n))
        D = max(n, 1)
        return sum(arc_weight(VERTEX, q, D, a.prefix) * _qz(q, z * h_index_v(v, a)) for a in partition(D, q))
    e = E0 if n == 0 else make_edge(tuple(1 + (i % 2) for i in range(n - 1)), tuple(1 + (i % 2) for i in range(n)))
    D = n + 1
    return sum(arc_weight(EDGE, q, D, a.prefix) * _qz(q, z * h_index_e(e, a)) for a in partition(D, q))


# ---------------------------------------------------------------------------
# Fourier transforms
# ---------------------------------------------------------------------------


def _as_radial_sums(f: FiniteFn | RadialSeq) -> tuple[str, int, list[Any]]:
    """Kind, q and the circle sums of f around the reference element."""
    if isinstance(f, RadialSeq):
        return f.kind, f.q, [x * c for x, c in zip(f.values, f.circle_sizes())]
    r = radialize(f)
    return r.kind, r.q, [x * c for x, c in zip(r.values, r.circle_sizes())]


def spherical_ft_zonal(f: FiniteFn | RadialSeq, z: complex) -> complex:
    """⟨f, φ_z⟩ computed through the circle sums of f."""
    kind, q, sums = _as_radial_sums(f)
    fn = spherical_v if kind == VERTEX else spherical_e
    return sum(complex(s) * fn(z, m, q) for m, s in enumerate(sums) if s != 0)


def spherical_ft_at_ray(f: FiniteFn, z: complex, ray: Sequence[int]) -> complex:
    """Σ f(s) q^(z h(s, ω)), the literal exponential sum along one boundary point."""
    q = f.q
    idx = h_index_v if f.kind == VERTEX else h_index_e
    return sum(complex(x) * _qz(q, z * idx(s, ray)) for s, x in f.values.items())


def fourier_series(g: Mapping[int, Any], z: complex, q: int) -> complex:
    return sum(complex(x) * _qz(q, n * z) for n, x in g.items())


def simpson_integral(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, N: int) -> complex:
    """Composite Simpson with N intervals (N even) of a vectorized integrand."""
    if N % 2 or N < 2:
        raise ValueError("Simpson needs an even number of intervals")
    t = np.linspace(a, b, N + 1)
    return simpson(f(t), x=t)


def fourier_coeff(u: Callable[[np.ndarray], np.ndarray], n: int, q: int, x: float = 0.0, N: int = 256) -> complex:
    """(ln q / 2π) ∫ u(x+it) q^(-n(x+it)) dt over one period.

    ``u`` is evaluated on arrays of complex points x+it.
    """
    lq = math.log(q)
    period = 2 * math.pi / lq
    integrand = lambda t: u(x + 1j * t) * np.exp(-n * (x + 1j * t) * lq)
    return lq / (2 * math.pi) * simpson_integral(integrand, 0.0, period, N)


# ---------------------------------------------------------------------------
# convolution and Laplacians
# ---------------------------------------------------------------------------


def convolve(f: FiniteFn, g: FiniteFn) -> FiniteFn:
    """(f*g)(v) = Σ_w f(w) g(w^{-1} v) on the word group."""
    if f.kind != VERTEX or g.kind != VERTEX:
        raise TreeError("group convolution is defined for vertex functions")
    out: dict[Vertex, Any] = {}
    for w, x in f.values.items():
        for u, y in g.values.items():
            v = group_mul(w, u)
            out[v] = out.get(v, 0) + x * y
    return FiniteFn(VERTEX, f.q, out)


def adjacent_edges(e: Edge, q: int) -> list[Edge]:
    out = []
    for a in e.endpoints:
        for b in neighbors(a, q):
            e2 = make_edge(a, b)
            if e2 != e:
                out.append(e2)
    return out


def edge_neighbor_sum(f: FiniteFn) -> FiniteFn:
    """Σ of f over the 2q edges adjacent to each edge (convolution by the edge circle of radius 1)."""
    if f.kind != EDGE:
        raise TreeError("edge_neighbor_sum needs an edge function")
    out: dict[Edge, Any] = {}
    for e, x in f.values.items():
        for e2 in adjacent_edges(e, f.q):
            out[e2] = out.get(e2, 0) + x
    return FiniteFn(EDGE, f.q, out)


def laplacian_mu1(f: Callable[[Vertex], Any], q: int, R: int) -> dict[Vertex, Any]:
    """Average over the q+1 neighbors, on the ball of radius R-1 (f read on the ball R)."""
    if R < 1:
        raise TruncationError("the interior of a ball of radius 0 is empty")
    return {v: sum(f(u) for u in neighbors(v, q)) / (q + 1) for v in iter_ball(q, R - 1)}


def laplacian_eta1(g: Callable[[Edge], Any], q: int, R: int) -> dict[Edge, Any]:
    """Average over the 2q adjacent edges, for edges of length <= R-1 (g read up to length R)."""
    if R < 1:
        raise TruncationError("the interior of an edge ball of radius 0 is empty")
    return {e: sum(g(e2) for e2 in adjacent_edges(e, q)) / (2 * q) for e in edge_ball(q, R - 1)}


def eigen_residual(z: complex, kind: str, q: int, R: int = 8) -> float:
    """max over the ball interior of |Laplacian φ_z - γ(z) φ_z|."""
    if kind == VERTEX:
        phi = spherical_seq(VERTEX, z, R, q)
        lap = laplacian_mu1(lambda v: phi[len(v)], q, R)
        g = gamma_v(z, q)
        return max(abs(x - g * phi[len(v)]) for v, x in lap.items())
    phi = spherical_seq(EDGE, z, R, q)
    lap = laplacian_eta1(lambda e: phi[edge_length(e)], q, R)
    g = gamma_e(z, q)
    return max(abs(x - g * phi[edge_length(e)]) for e, x in lap.items())


def theta_average(f: Callable[[Vertex], Any], q: int, R: int) -> dict[Edge, Any]:
    """Θf(e) = mean of f over the two endpoints of e, for edges inside the ball R."""
    return {e: (f(e.base) + f(e.far)) / 2 for e in edges_within(q, R)}


def intertwining_residual(f: Callable[[Vertex], Any], q: int, R: int) -> float:
    """max |η1 Θf - ((q+1)/(2q)) Θ μ1 f - ((q-1)/(2q)) Θ f| on edges of length <= R-3."""
    if R < 3:
        raise TruncationError("intertwining needs R >= 3")
    mu = laplacian_mu1(f, q, R)
    th = theta_average(f, q, R)
    th_mu = theta_average(lambda v: mu[v], q, R - 1)
    eta = {e: sum(th[e2] for e2 in adjacent_edges(e, q)) / (2 * q) for e in edge_ball(q, R - 3)}
    a, b = (q + 1) / (2 * q), (q - 1) / (2 * q)
    return max(abs(eta[e] - a * th_mu[e] - b * th[e]) for e in eta)


# ---------------------------------------------------------------------------
# Plancherel measure and spherical inversion
# ---------------------------------------------------------------------------


def plancherel_constant(kind: str, q: int, uncorrected: bool = False) -> float:
    """Constant in front of |c|^-2 dt (vertices) or |d|^-2 dt (edges) on [0, π/ln q].

    ``uncorrected=True`` returns (q ln q)/(2(q+1)) and (ln q)/4, which are too
    large by a factor π and, for edges, also ignore the point mass of the
    measure; they are kept so the discrepancy stays testable.
    """
    lq = math.log(q)
    if kind == VERTEX:
        return q * lq / (2 * (q + 1)) if uncorrected else q * lq / (2 * math.pi * (q + 1))
    return lq / 4 if uncorrected else lq / (4 * math.pi)


def edge_atom(q: int) -> tuple[complex, float]:
    """The point mass of the edge Plancherel measure: (z, weight).

    At z = iπ/ln q the edge eigenvalue is γ^E = -1/q, below the continuous
    spectrum, and φ^E_z(n) = (-1/q)^n is square summable over edges.  Its
    weight is 1/‖φ‖² = (q-1)/(q+1).
    """
    return 1j * math.pi / math.log(q), (q - 1) / (q + 1)


def edge_atom_spherical(n: int, q: int) -> float:
    return (-1 / q) ** n


def plancherel_density(kind: str, t: np.ndarray | float, q: int) -> np.ndarray:
    """|c(1/2+it)|^-2 or |d(1/2+it)|^-2, with the vanishing limits at the degenerate points."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lq = math.log(q)
    z = 0.5 + 1j * t
    qz = np.exp(z * lq)
    q1z = np.exp((1 - z) * lq)
    if kind == VERTEX:
        num = (q + 1) * (np.exp(-z * lq) - np.exp((z - 1) * lq))
        den = q1z - np.exp((z - 1) * lq)
    else:
        num = 2 * (q1z - qz)
        den = q - 1 + q1z - qz
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(num / den) ** 2
    degen = np.abs(np.exp((2 * z - 1) * lq) - 1) < DEGENERATE_TOL
    out[degen] = 0.0
    return out


def _spherical_grid(kind: str, t: np.ndarray, n: int, q: int) -> np.ndarray:
    fn = spherical_v if kind == VERTEX else spherical_e
    return np.array([fn(0.5 + 1j * s, n, q) for s in t])


def _transform_grid(h: RadialSeq, t: np.ndarray) -> np.ndarray:
    sums = [x * c for x, c in zip(h.values, h.circle_sizes())]
    out = np.zeros(len(t), dtype=complex)
    for m, s in enumerate(sums):
        if s != 0:
            out += complex(s) * _spherical_grid(h.kind, t, m, h.q)
    return out


def _critical_integral(g: Callable[[np.ndarray], np.ndarray], q: int, N: int, tol: float | None) -> complex:
    """Simpson on [0, π/ln q]; with a tolerance, double N until two estimates agree."""
    b = math.pi / math.log(q)
    est = simpson_integral(g, 0.0, b, N)
    if tol is None:
        return est
    for _ in range(8):
        N *= 2
        new = simpson_integral(g, 0.0, b, N)
        if abs(new - est) < tol:
            return new
        est = new
    raise QuadratureError(f"no convergence to {tol} after {N} nodes")


def _atom_transform(h: RadialSeq) -> float:
    return sum(float(x) * c * edge_atom_spherical(m, h.q) for m, (x, c) in enumerate(zip(h.values, h.circle_sizes())))


def plancherel_norm(h: RadialSeq, N: int = 512, uncorrected: bool = False, tol: float | None = None) -> float:
    """C ∫ |ĥ(1/2+it)|² × density dt (plus the edge point mass), which equals ‖h‖²."""
    C = plancherel_constant(h.kind, h.q, uncorrected)
    g = lambda t: np.abs(_transform_grid(h, t)) ** 2 * plancherel_density(h.kind, t, h.q)
    total = float(np.real(C * _critical_integral(g, h.q, N, tol)))
    if h.kind == EDGE and not uncorrected:
        total += edge_atom(h.q)[1] * _atom_transform(h) ** 2
    return total


def spherical_inversion(h: RadialSeq, n: int, N: int = 512, uncorrected: bool = False, tol: float | None = None) -> complex:
    """C ∫ ĥ(1/2+it) φ_{1/2+it}(n) × density dt (plus the edge point mass), which recovers h(n)."""
    C = plancherel_constant(h.kind, h.q, uncorrected)
    g = lambda t: _transform_grid(h, t) * _spherical_grid(h.kind, t, n, h.q) * plancherel_density(h.kind, t, h.q)
    total = complex(C * _critical_integral(g, h.q, N, tol))
    if h.kind == EDGE and not uncorrected:
        total += edge_atom(h.q)[1] * _atom_transform(h) * edge_atom_spherical(n, h.q)
    return total


# ---------------------------------------------------------------------------
# resolvents
# ---------------------------------------------------------------------------


def resolvent_prefactor_v(z: complex, q: int, variant: str = "exact") -> complex:
    """Prefactor of s_z.  ``variant="alternate"`` gives (q+1)/(q^(1-z)-q^z), kept for comparison."""
    if variant == "exact":
        return (q + 1) / (_qz(q, -z) - _qz(q, z))
    if variant == "alternate":
        return (q + 1) / (_qz(q, 1 - z) - _qz(q, z))
    raise ValueError(f"unknown variant {variant!r}")


def _check_resolvent_z(z: complex, q: int) -> None:
    if z.real <= 0.5:
        raise ValueError(f"Re z = {z.real} <= 1/2: the profile is not square summable")


def resolvent_s(z: complex, n: int, q: int, variant: str = "exact") -> complex:
    """s_z at a vertex of length n: the solution of (μ1 - γ^V(z)) s = δ_v0 in ℓ²."""
    _check_resolvent_z(z, q)
    return resolvent_prefactor_v(z, q, variant) * _qz(q, -z * n)


def resolvent_r(z: complex, n: int, q: int) -> complex:
    """r_z at an edge of length n: the solution of (η1 - γ^E(z)) r = δ_e0."""
    _check_resolvent_z(z, q)
    den = _qz(q, 1 - z) - _qz(q, z) - (q - 1)
    if abs(den) < DEGENERATE_TOL:
        raise DegenerateError(f"γ^E(z) lies at the top of the spectrum for z={z}")
    return 2 * q / den * _qz(q, -z * n)


def resolvent_residual(z: complex, kind: str, q: int, R: int = 8, variant: str = "exact") -> float:
    """max over the interior of |(Laplacian - γ(z)) y - δ|."""
    if kind == VERTEX:
        y = [resolvent_s(z, n, q, variant) for n in range(R + 1)]
        lap = laplacian_mu1(lambda v: y[len(v)], q, R)
        g = gamma_v(z, q)
        return max(abs(x - g * y[len(v)] - (1 if v == V0 else 0)) for v, x in lap.items())
    y = [resolvent_r(z, n, q) for n in range(R + 1)]
    lap = laplacian_eta1(lambda e: y[edge_length(e)], q, R)
    g = gamma_e(z, q)
    return max(abs(x - g * y[edge_length(e)] - (1 if e == E0 else 0)) for e, x in lap.items())


# ---------------------------------------------------------------------------
# back-projection kernels and symbols
# ---------------------------------------------------------------------------


def psi_closed_v(n: int, q: int) -> Fraction:
    """Kernel of the vertex back-projection of the Radon transform, at distance n."""
    if n < 0:
        raise TreeError("distance must be nonnegative")
    if n == 0:
        return Fraction(1)
    if n % 2:
        return Fraction(0)
    return Fraction(q - 1, (q + 1) * q ** (n // 2))


def psi_closed_e(n: int, q: int) -> Fraction:
    """Kernel of the edge back-projection, at edge distance n."""
    if n < 0:
        raise TreeError("distance must be nonnegative")
    if n == 0:
        return Fraction(1)
    if n % 2 == 0:
        return Fraction(0)
    return Fraction(q - 1, 2 * q ** ((n + 1) // 2))


def _rho(q: int) -> float:
    return 2 * math.sqrt(q) / (q + 1)


def symbol_psi_hat_v(w: complex, q: int) -> complex:
    """Spherical transform of the vertex back-projection kernel at w."""
    rho = _rho(q)
    g = gamma_v(w, q)
    den = rho * rho - g * g
    if abs(den) < DEGENERATE_TOL:
        raise DegenerateError(f"symbol pole: γ^V(w) = ±ρ at w={w}")
    s = math.sqrt(q)
    return 2 / (q + 1) + (q - 1) / (q + 1) * (s - 1 / s) / (q + 1) * rho / den


def symbol_psi_hat_v_alternate(w: complex, q: int) -> complex:
    """The same expression with an extra factor 2 on the resolvent term (does not match the kernel)."""
    return 2 * symbol_psi_hat_v(w, q) - 2 / (q + 1)


def symbol_psi_hat_e(w: complex, q: int) -> complex:
    """Spherical transform of the edge back-projection kernel at w."""
    g = gamma_e(w, q) - (q - 1) / (2 * q)
    den = 4 * q * q * g * g - 4 * q
    if abs(den) < DEGENERATE_TOL:
        raise DegenerateError(f"symbol pole at w={w}")
    return 1 - (q - 1) ** 2 / den


def _abel_sum(kind: str, w: complex, q: int, r: float) -> complex:
    nmax = int(60 / (1 - r))
    if kind == VERTEX:
        # |circle n| Ψ(n) = (q-1) q^(n/2 - 1) at even n > 0
        ns, factor = range(2, nmax + 1, 2), (q - 1) / q
        fn = spherical_v
    else:
        # |circle n| Ψ(n) = (q-1) q^((n-1)/2) at odd n
        ns, factor = range(1, nmax + 1, 2), (q - 1) / math.sqrt(q)
        fn = spherical_e
    return 1 + factor * sum(r**n * fn(w, n, q, scale=True) for n in ns)


def symbol_series(kind: str, w: complex, q: int, eps: float = 1e-3) -> complex:
    """Σ_n |circle n| Ψ(n) φ_w(n) by Abel summation, an independent route to the symbol.

    The series does not converge on its own, so it is damped by r^n at
    r = 1-ε, 1-2ε, 1-4ε and extrapolated to r = 1 (second order in ε).
    Valid on the critical line Re w = 1/2.
    """
    s1, s2, s4 = (_abel_sum(kind, w, q, 1 - k * eps) for k in (1, 2, 4))
    return (8 * s1 - 6 * s2 + s4) / 3


def symbol_critical_e(t: float, q: int) -> float:
    """1 + (q-1)²/(4q sin²(t ln q)): the edge symbol on the critical line."""
    s = math.sin(t * math.log(q))
    return 1 + (q - 1) ** 2 / (4 * q * s * s)


def symbol_critical_v(t: float, q: int) -> float:
    """2/(q+1) + (q-1)²/(2q(q+1) sin²(t ln q)): the vertex symbol on the critical line."""
    s = math.sin(t * math.log(q))
    return 2 / (q + 1) + (q - 1) ** 2 / (2 * q * (q + 1) * s * s)


# ---------------------------------------------------------------------------
# deconvolution of the edge back-projection
# ---------------------------------------------------------------------------


def _inverse_symbol_e_grid(t: np.ndarray, q: int) -> np.ndarray:
    """1/Ψ̂^E(1/2+it) = 4q sin² / (4q sin² + (q-1)²), vanishing at the endpoints."""
    s2 = np.sin(t * math.log(q)) ** 2
    return 4 * q * s2 / (4 * q * s2 + (q - 1) ** 2)


def blur_inverse_phi(n: int, q: int = 2, N: int = 1024) -> float:
    """Radial edge kernel Φ with spherical transform 1/Ψ̂^E, by spherical inversion."""
    C = plancherel_constant(EDGE, q)
    g = lambda t: _inverse_symbol_e_grid(t, q) * _spherical_grid(EDGE, t, n, q) * plancherel_density(EDGE, t, q)
    return float(np.real(C * _critical_integral(g, q, N, None)))


@lru_cache(maxsize=None)
def edge_distance_counts(m: int, R: int, q: int) -> dict[tuple[int, int], int]:
    """#{e' : |e'| = a, d(e, e') = b} for a fixed edge e of length m, over |e'| <= R."""
    e = E0 if m == 0 else Edge(tuple(1 + (i % 2) for i in range(m - 1)), 1 + ((m - 1) % 2))
    counts: dict[tuple[int, int], int] = {}
    for e2 in edge_ball(q, R):
        key = (edge_length(e2), dist_e(e, e2))
        counts[key] = counts.get(key, 0) + 1
    return counts


def blur_target(m: int, q: int, target: str = "delta") -> float:
    """Value at length m of the function the deconvolution should return.

    ``"delta"`` is δ_e0.  ``"continuous"`` is δ_e0 minus its component along the
    point mass of the edge spectrum, which the back-projection annihilates.
    """
    d = 1.0 if m == 0 else 0.0
    if target == "delta":
        return d
    if target == "continuous":
        return d - edge_atom(q)[1] * edge_atom_spherical(m, q)
    raise ValueError(f"unknown target {target!r}")


def blur_roundtrip_residual(R: int, N: int, q: int = 2, check_radius: int = 2, target: str = "delta") -> float:
    """max over |e| <= check_radius of |Σ_{|e'|<=R} Ψ^E(d(e,e')) Φ(|e'|) - target(e)|."""
    phi = [blur_inverse_phi(a, q, N) for a in range(R + 1)]
    worst = 0.0
    for m in range(check_radius + 1):
        val = sum(c * phi[a] * float(psi_closed_e(b, q)) for (a, b), c in edge_distance_counts(m, R, q).items() if b <= R)
        worst = max(worst, abs(val - blur_target(m, q, target)))
    return worst


# ---------------------------------------------------------------------------
# Poisson transform, seminorms, spectra, spherical polynomials
# ---------------------------------------------------------------------------


def poisson_transform(Ftest: Mapping[Vertex, Any], z: complex, v: Vertex, q: int, D: int, sign: int = 1) -> complex:
    """Σ_arcs F(a) q^(sign·z·h(v,a)) ν_v0(a) for F constant on depth-D arcs.

    ``sign=+1`` matches the zonal convention φ_z(v) = ∫ q^(z h) dν_v0 and yields
    μ1-eigenfunctions with eigenvalue γ^V(z); ``sign=-1`` yields eigenvalue γ^V(-z).
    """
    if len(v) > D:
        raise TruncationError(f"vertex of length {len(v)} needs depth >= {len(v)}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    w = arc_weight(VERTEX, q, D, (0,))
    return sum(complex(x) * float(w) * _qz(q, sign * z * h_index_v(v, a)) for a, x in Ftest.items() if x != 0)


def poisson_eigen_residual(Ftest: Mapping[Vertex, Any], z: complex, q: int, D: int, R: int, sign: int = 1) -> float:
    if R >= D:
        raise TruncationError("the ball radius must stay below the arc depth")
    P = {v: poisson_transform(Ftest, z, v, q, D, sign) for v in iter_ball(q, R)}
    g = gamma_v(sign * z, q)
    lap = laplacian_mu1(lambda v: P[v], q, R)
    return max(abs(x - g * P[v]) for v, x in lap.items())


def schwartz_seminorm(f: FiniteFn, r: float) -> float:
    """sup (1+|v|)^r |f(v)| q^(|v|/2)."""
    if f.kind != VERTEX:
        raise TreeError("the seminorm is defined for vertex functions")
    return max((float((1 + len(v)) ** r * abs(x) * math.sqrt(f.q) ** len(v)) for v, x in f.values.items()), default=0.0)


def spectrum_sample(p: float, q: int, N: int = 256) -> list[complex]:
    """γ^V(1/p + it) for N equally spaced t over one period: the boundary of the ℓ^p spectrum."""
    if not 1 < p <= 2:
        raise ValueError("p must lie in (1, 2]")
    period = 2 * math.pi / math.log(q)
    return [gamma_v(1 / p + 1j * period * k / N, q) for k in range(N)]


def spherical_polynomial(n: int, g: complex, q: int, kind: str = VERTEX) -> complex:
    """P_n(g) (vertex) or Q_n(g) (edge) from the three-term recurrence."""
    if n < 0:
        raise TreeError("degree must be nonnegative")
    prev, cur = 1 + 0j, g + 0j
    if n == 0:
        return prev
    for _ in range(1, n):
        if kind == VERTEX:
            prev, cur = cur, ((q + 1) * g * cur - prev) / q
        else:
            prev, cur = cur, 2 * (g * cur - prev / (2 * q) - (q - 1) / (2 * q) * cur)
    return cur
