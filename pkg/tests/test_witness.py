import pytest
from hypothesis import assume, given

from anet.constructors import build_threshold_universal
from anet.core import Digraph, FunctionTable, interaction_graph
from anet.errors import ConditionNotMetError, PreconditionError
from anet.iso import NilpotentProfile, are_conjugate, nilpotent_profile
from anet.witness import (
    certify_universal,
    l1n_witness,
    lmn_witness,
    sample_digraph_codes,
    sink_relabeling,
    witness_for_digraph,
)

from conftest import digraphs

F29 = build_threshold_universal(2, (3, 3))
F327 = build_threshold_universal(3, (3, 3, 3))


def test_l1n_witness():
    p = nilpotent_profile(F29)
    h = l1n_witness(p)
    assert interaction_graph(h) == Digraph.loops(1, 2)
    assert nilpotent_profile(h) == p


def test_l1n_needs_preimage_property():
    with pytest.raises(ConditionNotMetError):
        l1n_witness(NilpotentProfile(2, 2, 3, (1,)))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_lmn_witness(m):
    p = nilpotent_profile(F327)
    h = lmn_witness(p, m)
    assert interaction_graph(h) == Digraph.loops(m, 3)
    assert nilpotent_profile(h) == p


def test_lmn_rejects_bad_m():
    with pytest.raises(PreconditionError):
        lmn_witness(nilpotent_profile(F29), 0)


def test_sink_relabeling_moves_sinks_last():
    g = Digraph.from_arcs(4, [(1, 0), (3, 3)])
    tau = sink_relabeling(g)
    assert sorted(g.relabel(tau).sinks()) == [2, 3]


@given(digraphs(min_n=3, max_n=3))
def test_witness_for_every_digraph_on_three(g):
    assume(not g.is_empty())
    h = witness_for_digraph(F327, g)
    assert interaction_graph(h) == g
    assert are_conjugate(h, F327)


def test_witness_rejects_empty_and_non_universal():
    with pytest.raises(PreconditionError):
        witness_for_digraph(F29, Digraph.empty(2))
    with pytest.raises(PreconditionError):
        witness_for_digraph(FunctionTable.identity(2, 9), Digraph.cycle(2))


def test_full_certificate_two_vertices():
    cert = certify_universal(F29)
    assert cert.valid and cert.verified == 15
    data = cert.to_json()
    assert data["total"] == 15 and data["coverage"] == "all"
    assert "table" not in data["entries"][0]
    assert "table" in cert.to_json(include_tables=True)["entries"][0]


def test_sampled_certificate_is_independent_of_workers():
    a = certify_universal(F327, "sampled", 20, seed=5, workers=1)
    b = certify_universal(F327, "sampled", 20, seed=5, workers=3)
    assert a.valid and a.to_json() == b.to_json()


def test_sample_codes_seeded_and_distinct():
    codes = sample_digraph_codes(3, 50, 1)
    assert codes == sample_digraph_codes(3, 50, 1)
    assert len(set(codes)) == 50 and 0 not in codes
    big = sample_digraph_codes(6, 10, 2)
    assert len(set(big)) == 10 and max(big) < 2**36
    with pytest.raises(PreconditionError):
        sample_digraph_codes(2, 16, 0)


def test_certify_refuses_non_universal():
    with pytest.raises(PreconditionError):
        certify_universal(FunctionTable.identity(2, 3))
    with pytest.raises(PreconditionError):
        certify_universal(F29, coverage="some")
