import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from anet.constructors import (
    augmentation,
    build_2perm_permutation,
    build_dperm_family,
    build_hamiltonian_family,
    build_induced_universal,
    build_linear_permutation,
    build_nilpotent_for_digraph,
    build_regular_universal,
    build_threshold_universal,
    build_universal_augmentation_family,
    dperm_layout,
    find_permutation,
    fixed_point_count,
    induced_universal_size,
    unary_from_counts,
)
from anet.core import Digraph, dynamics_summary, interaction_graph, is_two_nilpotent
from anet.errors import ConditionNotMetError, NotHamiltonianError, PreconditionError
from anet.iso import are_conjugate, nilpotent_profile
from anet.structure import is_coverable, is_hamiltonian, is_universal, overlap_condition

from conftest import digraphs


def test_unary_from_counts_layout():
    g = unary_from_counts(6, (3, 2, 1))
    assert g.table.tolist() == [0, 0, 0, 1, 1, 2]
    with pytest.raises(PreconditionError):
        unary_from_counts(4, (1, 3))


@pytest.mark.parametrize("factors", [(3, 3), (3, 4), (5, 2), (3, 3, 3)])
def test_threshold_universal(factors):
    f = build_threshold_universal(len(factors), factors)
    assert is_two_nilpotent(f)
    assert is_universal(f)


def test_threshold_needs_slack():
    with pytest.raises(ConditionNotMetError):
        build_threshold_universal(2, (2, 4))


@given(digraphs(min_n=2, max_n=2))
def test_regular_universal_small(g):
    assume(not g.is_empty())
    f = build_regular_universal(g, 16, (2, 2))
    s = dynamics_summary(f)
    assert interaction_graph(f) == g
    assert s.nilpotency_index == 2 and s.rank == 4
    assert s.is_regular and s.degree == 64


def test_regular_universal_preconditions():
    g = Digraph.cycle(2)
    with pytest.raises(PreconditionError):
        build_regular_universal(g, 12, (2, 2))
    with pytest.raises(PreconditionError):
        build_regular_universal(Digraph.empty(2), 16, (2, 2))


@given(digraphs(min_n=1, max_n=3), st.integers(3, 4))
def test_nilpotent_for_digraph(g, q):
    assume(not g.is_empty())
    f = build_nilpotent_for_digraph(g, q)
    assert interaction_graph(f) == g
    assert dynamics_summary(f).nilpotency_index == 2


@pytest.mark.parametrize("n,q", [(2, 3), (2, 4), (3, 3)])
def test_hamiltonian_family_all_small(n, q):
    fam = build_hamiltonian_family(n, q)
    assert dynamics_summary(fam.base).periodic_point_count == 2**n
    for code in range(1 << (n * n)):
        g = Digraph.from_int(n, code)
        if not is_hamiltonian(g):
            with pytest.raises(NotHamiltonianError):
                fam.witness(g)
            continue
        h = fam.witness(g)
        assert interaction_graph(h) == g
        assert are_conjugate(h, fam.base)


def test_dperm_layout():
    assert dperm_layout(8, 2) == (4, False)
    assert dperm_layout(9, 3) == (3, False)
    assert dperm_layout(7, 2) == (4, True)
    with pytest.raises(PreconditionError):
        dperm_layout(5, 3)


@pytest.mark.parametrize("n,q,d", [(2, 4, 2), (2, 7, 2), (2, 9, 3)])
def test_dperm_family_small(n, q, d):
    fam = build_dperm_family(n, q, d)
    for code in range(1 << (n * n)):
        g = Digraph.from_int(n, code)
        if not is_coverable(g):
            continue
        try:
            perm = find_permutation(g, d)
        except ConditionNotMetError:
            assert d == 2
            continue
        h = fam.witness(perm)
        assert interaction_graph(h) == g
        assert are_conjugate(h, fam.base)


@st.composite
def covered_digraphs(draw, max_n=6):
    """A covering permutation plus, per vertex, either nothing else or every in-arc."""
    n = draw(st.integers(1, max_n))
    pi = draw(st.permutations(range(n)))
    full = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    rows = tuple(((1 << n) - 1) if full[i] else (1 << pi[i]) for i in range(n))
    return Digraph(n, rows)


@given(covered_digraphs())
def test_2perm_under_overlap_condition(g):
    assume(overlap_condition(g))
    f = build_2perm_permutation(g)
    assert f.is_permutation() and interaction_graph(f) == g


def test_2perm_rejects_uncoverable():
    with pytest.raises(ConditionNotMetError):
        build_2perm_permutation(Digraph.from_arcs(2, [(0, 0), (0, 1)]))


@given(digraphs(min_n=1, max_n=4), st.sampled_from([3, 4, 5]))
def test_linear_permutation(g, d):
    assume(is_coverable(g))
    f = build_linear_permutation(g, d)
    assert f.is_permutation() and interaction_graph(f) == g


def test_augmentation_family():
    fam = build_universal_augmentation_family(3)
    for code in range(16):
        h_graph = Digraph.from_int(2, code)
        try:
            g = find_permutation(h_graph, 2)
        except ConditionNotMetError:
            continue
        h = fam.witness(h_graph, g)
        assert interaction_graph(h) == augmentation(h_graph)
        assert are_conjugate(h, fam.base)


def test_induced_family():
    assert induced_universal_size(1) == 2
    assert induced_universal_size(2) == 4
    assert induced_universal_size(5) == 9
    for k in (1, 2):
        fam = build_induced_universal(k)
        for code in range(1 << (k * k)):
            h_graph = Digraph.from_int(k, code)
            h = fam.witness(h_graph)
            assert interaction_graph(h).induced(list(range(k))) == h_graph
            assert are_conjugate(h, fam.base)


def test_induced_family_fixed_points_counted():
    fam = build_induced_universal(2)
    assert fixed_point_count(fam.base) == fam.params["stated"]["fixed_points_base"]


def test_find_permutation():
    assert find_permutation(Digraph.cycle(4), 2).is_permutation()
    with pytest.raises(ConditionNotMetError):
        find_permutation(Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0), (0, 0), (1, 1), (2, 2)]), 2)


def test_regular_universal_sixteen_letters():
    f = build_regular_universal(Digraph.complete(2), 16, (2, 2))
    assert nilpotent_profile(f).fixed_preimages == 64
    assert nilpotent_profile(f).other_preimages == (64, 64, 64)
    assert is_universal(f)


def test_threshold_four_by_four_profile():
    # a_0 = 12 and a_1 = 4 in each factor: 144 = 12^2, then 12*4 twice and 4*4
    f = build_threshold_universal(2, (4, 4))
    p = nilpotent_profile(f)
    assert (p.fixed_preimages, p.other_preimages) == (144, (48, 48, 16))
    assert not dynamics_summary(f).is_regular
