from __future__ import annotations

from fractions import Fraction

import pytest

from horotree.boundary import (
    Arc,
    arc_measure_e,
    arc_measure_v,
    extend,
    nu_edge,
    nu_vertex,
    partition,
    xi_tube_measure,
)
from horotree.tree_core import E0, Edge, TreeError, TruncationError, is_reduced


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("D", [1, 2, 3, 4])
def test_measures_are_probabilities(q, D):
    arcs = partition(D, q)
    assert len(arcs) == (q + 1) * q ** (D - 1)
    assert sum(arc_measure_v(a, q) for a in arcs) == 1
    assert sum(arc_measure_e(a, q) for a in arcs) == 1
    for center in [(1,), (0, 2)]:
        if D > len(center):
            assert sum(nu_vertex(a, q, center) for a in arcs) == 1
    e = Edge((1,), 0)
    if D >= 2:
        assert sum(nu_edge(a, q, e) for a in arcs) == 1


def test_edge_measure_halves():
    q = 2
    arcs = partition(3, q)
    assert sum(arc_measure_e(a, q) for a in arcs if a.prefix[0] == 0) == Fraction(1, 2)


def test_radon_nikodym_is_poisson_kernel():
    # dν_v / dν_v0 = q^{h(v, ω)} on arcs resolving v
    from horotree.horospheres import h_index_v

    q, v = 3, (1, 2)
    for a in partition(4, q):
        assert nu_vertex(a, q, v) == arc_measure_v(a, q) * Fraction(q) ** h_index_v(v, a)


def test_arc_validation():
    with pytest.raises(TreeError):
        Arc(())
    with pytest.raises(TreeError):
        Arc((1, 1))
    with pytest.raises(TreeError):
        partition(0, 2)
    with pytest.raises(TruncationError):
        nu_vertex(Arc((0,)), 2, (0,))


def test_extend():
    w = extend((1,), 5, 2, avoid=0)
    assert len(w) == 5 and is_reduced(w) and w[1] != 0


def test_tube_measure():
    assert xi_tube_measure(Arc((0, 1)), 2, 2) == 4 * Fraction(1, 6)
