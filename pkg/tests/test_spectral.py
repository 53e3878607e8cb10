from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horotree.horospheres import EDGE, VERTEX, FiniteFn, RadialSeq, delta, dual_radon_e, dual_radon_v, radon, translate
from horotree.spectral import (
    DegenerateError,
    QuadratureError,
    SpectralPoint,
    blur_inverse_phi,
    blur_roundtrip_residual,
    c_coeff,
    convolve,
    d_coeff,
    edge_atom,
    edge_neighbor_sum,
    eigen_residual,
    fourier_coeff,
    fourier_series,
    gamma_e,
    gamma_v,
    intertwining_residual,
    is_degenerate,
    plancherel_constant,
    plancherel_density,
    plancherel_norm,
    poisson_eigen_residual,
    poisson_transform,
    psi_closed_e,
    psi_closed_v,
    resolvent_r,
    resolvent_residual,
    resolvent_s,
    schwartz_seminorm,
    spherical_boundary_integral,
    spherical_e,
    spherical_ft_at_ray,
    spherical_ft_zonal,
    spherical_inversion,
    spherical_polynomial,
    spherical_v,
    spectrum_sample,
    symbol_critical_e,
    symbol_critical_v,
    symbol_psi_hat_e,
    symbol_psi_hat_v,
    symbol_psi_hat_v_alternate,
    symbol_series,
)
from horotree.tree_core import E0, V0, Edge, TreeError, edge_ball, edge_length, group_mul, iter_ball, reduce_word

LN2 = math.log(2)
zs = st.complex_numbers(min_magnitude=0, max_magnitude=3, allow_nan=False, allow_infinity=False)


def circle_fn(kind: str, q: int, n: int) -> FiniteFn:
    if kind == VERTEX:
        return FiniteFn(VERTEX, q, {v: Fraction(1) for v in iter_ball(q, n) if len(v) == n})
    return FiniteFn(EDGE, q, {e: Fraction(1) for e in edge_ball(q, n) if edge_length(e) == n})


# ---------------------------------------------------------------------------
# eigenvalues and spherical functions
# ---------------------------------------------------------------------------


def test_gamma_examples():
    assert gamma_v(0, 2) == pytest.approx(1)
    assert gamma_v(0.5, 2) == pytest.approx(2 * math.sqrt(2) / 3)
    assert gamma_e(0, 3) == pytest.approx(1)
    assert gamma_e(0.5, 2) == pytest.approx((2 * math.sqrt(2) + 1) / 4)
    assert gamma_e(1j * math.pi / LN2, 2) == pytest.approx(-0.5)


@settings(max_examples=40)
@given(zs, st.sampled_from([2, 3, 5]))
def test_weyl_symmetry(z, q):
    assert abs(gamma_v(z, q) - gamma_v(1 - z, q)) < 1e-9 * max(1, abs(gamma_v(z, q)))
    assert abs(gamma_e(z, q) - gamma_e(1 - z, q)) < 1e-9 * max(1, abs(gamma_e(z, q)))
    if not is_degenerate(z, q, 1e-6):
        for n in range(4):
            a, b = spherical_v(z, n, q), spherical_v(1 - z, n, q)
            assert abs(a - b) < 1e-7 * max(1, abs(a))


def test_degenerate_points():
    for z in (0.5, 0.5 + 1j * math.pi / LN2):
        assert is_degenerate(z, 2)
        with pytest.raises(DegenerateError):
            c_coeff(z, 2)
        with pytest.raises(DegenerateError):
            d_coeff(z, 2)
    p = SpectralPoint(0.5, 2)
    assert p.degenerate and p.c is None and p.d is None
    assert spherical_v(0.5, 2, 2) == pytest.approx((1 + 2 / 3) * 0.5)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("z", [0.3, 0.5, 0.5 + 1.1j, 0.5 + 1j * math.pi / LN2, 0.9 - 0.4j, 2.0])
def test_eigenfunctions(q, z):
    if is_degenerate(z, 3) and q == 3 and z != 0.5:
        z = 0.5 + 1j * math.pi / math.log(3)
    assert eigen_residual(z, VERTEX, q, 6) < 1e-9
    assert eigen_residual(z, EDGE, q, 6) < 1e-9
    assert spherical_v(z, 0, q) == pytest.approx(1)
    assert spherical_e(z, 0, q) == pytest.approx(1)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 4), st.sampled_from([2, 3]))
def test_real_on_critical_line(t, q):
    for n in range(5):
        assert abs(spherical_v(0.5 + 1j * t, n, q).imag) < 1e-9
        assert abs(spherical_e(0.5 + 1j * t, n, q).imag) < 1e-9


@pytest.mark.parametrize("kind", [VERTEX, EDGE])
@pytest.mark.parametrize("z", [0.2, 0.5 + 0.7j, 1.3 - 0.2j])
def test_spherical_matches_boundary_integral(kind, z):
    fn = spherical_v if kind == VERTEX else spherical_e
    for n in range(5):
        assert abs(fn(z, n, 3) - spherical_boundary_integral(kind, z, n, 3)) < 1e-10


def test_negative_length_rejected():
    with pytest.raises(TreeError):
        spherical_v(0.3, -1, 2)


# ---------------------------------------------------------------------------
# convolution
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("q", [2, 3])
def test_circle_convolution(q):
    chi1 = circle_fn(VERTEX, q, 1)
    for n in range(1, 4):
        lhs = convolve(chi1, circle_fn(VERTEX, q, n)).values
        rhs = {}
        for v, x in circle_fn(VERTEX, q, n + 1).values.items():
            rhs[v] = x
        for v in circle_fn(VERTEX, q, n - 1).values:
            rhs[v] = rhs.get(v, 0) + (q + 1 if n == 1 else q)
        assert lhs == rhs


@pytest.mark.parametrize("q", [2, 3])
def test_edge_circle_convolution(q):
    for n in range(1, 4):
        lhs = edge_neighbor_sum(circle_fn(EDGE, q, n)).values
        rhs = {}
        for e in circle_fn(EDGE, q, n + 1).values:
            rhs[e] = rhs.get(e, 0) + 1
        for e in circle_fn(EDGE, q, n).values:
            rhs[e] = rhs.get(e, 0) + q - 1
        for e in circle_fn(EDGE, q, n - 1).values:
            rhs[e] = rhs.get(e, 0) + (2 * q if n == 1 else q)
        assert lhs == rhs


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), zs, st.integers(1, 3))
def test_multiplicativity(seed, z, n):
    # convolving with a radial function multiplies the transform at every boundary point
    rng = random.Random(seed)
    q = 2
    f = FiniteFn(VERTEX, q, {v: Fraction(rng.randint(-3, 3)) for v in iter_ball(q, 2)})
    ray = (rng.randrange(3),)
    while len(ray) < 10:
        ray += (rng.choice([a for a in range(3) if a != ray[-1]]),)
    chi = circle_fn(VERTEX, q, n)
    lhs = spherical_ft_at_ray(convolve(f, chi), z, ray)
    rhs = spherical_ft_at_ray(f, z, ray) * spherical_ft_zonal(chi, z)
    assert abs(lhs - rhs) < 1e-8 * max(1, abs(rhs))


def test_intertwining():
    rng = random.Random(3)
    vals = {v: rng.random() for v in iter_ball(2, 6)}
    assert intertwining_residual(lambda v: vals[v], 2, 6) < 1e-12


# ---------------------------------------------------------------------------
# Fourier series
# ---------------------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(st.dictionaries(st.integers(-4, 4), st.integers(-5, 5), max_size=5), st.floats(-0.5, 0.5))
def test_fourier_round_trip(g, x):
    q = 2
    u = lambda w: np.array([fourier_series(g, complex(p), q) for p in np.atleast_1d(w)])
    for n in range(-5, 6):
        assert abs(fourier_coeff(u, n, q, x, 256) - g.get(n, 0)) < 1e-8


# ---------------------------------------------------------------------------
# Plancherel
# ---------------------------------------------------------------------------


def test_plancherel_constants():
    assert plancherel_constant(VERTEX, 2) == pytest.approx(2 * LN2 / (6 * math.pi))
    assert plancherel_constant(EDGE, 2) == pytest.approx(LN2 / (4 * math.pi))
    assert plancherel_constant(VERTEX, 2, uncorrected=True) / plancherel_constant(VERTEX, 2) == pytest.approx(math.pi)
    z, w = edge_atom(3)
    assert gamma_e(z, 3) == pytest.approx(-1 / 3)
    assert w == pytest.approx(0.5)


def test_plancherel_density_vanishes_at_degenerate_points():
    assert plancherel_density(VERTEX, 0.0, 2)[0] == 0
    assert plancherel_density(EDGE, 0.0, 2)[0] == 0
    assert np.all(plancherel_density(VERTEX, np.linspace(0.01, 4, 50), 3) > 0)


@pytest.mark.parametrize("kind", [VERTEX, EDGE])
@pytest.mark.parametrize("q", [2, 3])
def test_plancherel_norm(kind, q):
    h = RadialSeq(kind, q, (Fraction(3), Fraction(-1), Fraction(2)))
    assert plancherel_norm(h, 512, tol=1e-10) == pytest.approx(float(h.norm2()), rel=1e-8)
    for n in range(4):
        assert spherical_inversion(h, n, 512) == pytest.approx(float(h(n)) if n < 3 else 0, abs=1e-8)


def test_uncorrected_constants_overshoot():
    h = RadialSeq(VERTEX, 2, (Fraction(1),))
    assert plancherel_norm(h, uncorrected=True) == pytest.approx(math.pi, rel=1e-6)
    g = RadialSeq(EDGE, 2, (Fraction(1),))
    assert plancherel_norm(g, uncorrected=True) != pytest.approx(1, rel=1e-2)


def test_quadrature_tolerance_error():
    with pytest.raises(QuadratureError):
        plancherel_norm(RadialSeq(VERTEX, 2, (Fraction(1),) * 6), N=2, tol=0.0)


# ---------------------------------------------------------------------------
# resolvents
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("z", [0.8, 1.5, 0.7 + 2j, 3.0 - 1j])
@pytest.mark.parametrize("q", [2, 3])
def test_resolvents(z, q):
    assert resolvent_residual(z, VERTEX, q, 6) < 1e-10
    assert resolvent_residual(z, EDGE, q, 6) < 1e-10
    assert resolvent_residual(z, VERTEX, q, 6, variant="alternate") > 1e-3


def test_resolvent_value_at_origin():
    z, q = 1.2, 2
    y = resolvent_s(z, 0, q)
    nb = resolvent_s(z, 1, q)
    assert nb - gamma_v(z, q) * y == pytest.approx((q**-z - q**z) / (q + 1) * y)
    with pytest.raises(ValueError):
        resolvent_s(0.5, 0, q)
    with pytest.raises(ValueError):
        resolvent_r(0.2, 0, q)


# ---------------------------------------------------------------------------
# back-projection kernels and symbols
# ---------------------------------------------------------------------------


def test_kernels_match_dual_radon():
    q = 2
    F = radon(delta(VERTEX, q, V0), 8)
    for v in iter_ball(q, 4):
        assert dual_radon_v(F, v) == psi_closed_v(len(v), q)
    G = radon(delta(EDGE, q, E0), 8)
    for e in edge_ball(q, 4):
        assert dual_radon_e(G, e) == psi_closed_e(edge_length(e), q)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("t", [0.3, 1.0, 2.2])
def test_symbols(q, t):
    w = 0.5 + 1j * t
    sv = symbol_psi_hat_v(w, q)
    se = symbol_psi_hat_e(w, q)
    assert abs(sv - symbol_series(VERTEX, w, q)) < 1e-5
    assert abs(se - symbol_series(EDGE, w, q)) < 1e-5
    assert se.real == pytest.approx(symbol_critical_e(t, q))
    assert sv.real == pytest.approx(symbol_critical_v(t, q))
    assert sv.real > 0
    assert abs(symbol_psi_hat_v_alternate(w, q) - symbol_series(VERTEX, w, q)) > 1e-2


def test_vertex_symbol_is_bounded_below():
    t = np.linspace(0.01, math.pi / LN2 - 0.01, 200)
    assert min(symbol_critical_v(s, 2) for s in t) >= 2 / 3


# ---------------------------------------------------------------------------
# edge deconvolution
# ---------------------------------------------------------------------------


def test_blur_kernel_decay():
    phi = [blur_inverse_phi(n, 2, 1024) for n in range(11)]
    assert phi[0] > 0
    assert max(abs(p) * 2 ** (n / 2) * (1 + n) ** 3 for n, p in enumerate(phi)) < 10
    assert blur_inverse_phi(4, 2, 1024) == pytest.approx(blur_inverse_phi(4, 2, 2048), abs=1e-9)


def test_blur_continuous_target_decreases():
    res = [blur_roundtrip_residual(R, 1024, target="continuous") for R in (6, 8, 10, 12)]
    assert all(a > b for a, b in zip(res, res[1:]))
    assert res[-1] < 0.01


# ---------------------------------------------------------------------------
# Poisson transform and the rest
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("z", [0.3 + 0.4j, 1.1])
def test_poisson(z):
    q, D = 2, 4
    rng = random.Random(1)
    from horotree.boundary import partition

    F = {a.prefix: rng.random() for a in partition(D, q)}
    assert poisson_eigen_residual(F, z, q, D, 3) < 1e-10
    assert poisson_eigen_residual(F, z, q, D, 3, sign=-1) < 1e-10
    const = {a.prefix: 1.0 for a in partition(D, q)}
    for v in iter_ball(q, 3):
        assert poisson_transform(const, z, v, q, D) == pytest.approx(spherical_v(z, len(v), q))


def test_seminorm_monotone_in_r():
    f = FiniteFn(VERTEX, 2, {V0: Fraction(1), (0, 1): Fraction(-2)})
    vals = [schwartz_seminorm(f, r) for r in (0, 1, 2, 3)]
    assert vals == sorted(vals)
    assert vals[0] == pytest.approx(4)


def test_l2_spectrum_is_real_interval():
    pts = spectrum_sample(2, 2, 64)
    assert all(abs(g.imag) < 1e-12 for g in pts)
    rho = 2 * math.sqrt(2) / 3
    assert max(g.real for g in pts) == pytest.approx(rho)
    assert min(g.real for g in pts) == pytest.approx(-rho)
    assert any(abs(g.imag) > 1e-3 for g in spectrum_sample(1.5, 2, 64))


@settings(max_examples=25, deadline=None)
@given(zs.filter(lambda z: not is_degenerate(z, 2, 1e-6)), st.sampled_from([2, 3]))
def test_spherical_polynomials(z, q):
    for n in range(6):
        assert abs(spherical_polynomial(n, gamma_v(z, q), q) - spherical_v(z, n, q)) < 1e-6 * max(1, abs(spherical_v(z, n, q)))
        assert abs(spherical_polynomial(n, gamma_e(z, q), q, EDGE) - spherical_e(z, n, q)) < 1e-6 * max(1, abs(spherical_e(z, n, q)))


def test_p2_formula_and_majorization():
    q = 3
    for g in (-0.5, 0.2, 0.9):
        assert spherical_polynomial(2, g, q) == pytest.approx(((q + 1) * g * g - 1) / q)
    for g in np.linspace(-1, 1, 21):
        assert all(abs(spherical_polynomial(n, g, q)) <= 1 + 1e-12 for n in range(8))
