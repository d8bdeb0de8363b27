import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anet.core import FunctionTable, product_of_unary, unary
from anet.errors import DimensionMismatchError, NotTwoNilpotentError, PreconditionError
from anet.iso import (
    NilpotentProfile,
    are_conjugate,
    canonical_code,
    canonical_code_of_map,
    conjugate,
    fixed_point,
    least_rotation,
    nilpotent_profile,
)

from conftest import functions
import oracles


@given(st.lists(st.integers(0, 3), min_size=1, max_size=12))
def test_least_rotation(seq):
    k = least_rotation(seq)
    rotations = [seq[i:] + seq[:i] for i in range(len(seq))]
    assert seq[k:] + seq[:k] == min(rotations)


@given(functions(max_size=64), st.data())
def test_code_invariant_under_conjugation(f, data):
    perm = data.draw(st.permutations(range(f.size)))
    h = conjugate(f, perm)
    assert h.table.tolist() == oracles.conjugate_table(f.table.tolist(), tuple(perm))
    assert canonical_code(h) == canonical_code(f)


@given(functions(max_size=6), functions(max_size=6))
def test_conjugacy_matches_bruteforce(a, b):
    if (a.n, a.q) != (b.n, b.q):
        with pytest.raises(DimensionMismatchError):
            are_conjugate(a, b)
        return
    assert are_conjugate(a, b) == oracles.are_conjugate(a.table.tolist(), b.table.tolist())


def test_exhaustive_conjugacy_on_five_states():
    # every map on 5 states against a fixed set of references
    rng = np.random.default_rng(3)
    refs = [rng.integers(0, 5, 5).tolist() for _ in range(6)]
    for ref in refs:
        code = canonical_code_of_map(ref)
        for other in (rng.integers(0, 5, 5).tolist() for _ in range(200)):
            assert (canonical_code_of_map(other) == code) == oracles.are_conjugate(ref, other)


def test_identity_and_constant_codes_differ():
    assert canonical_code(FunctionTable.identity(2, 2)) != canonical_code(FunctionTable.constant(2, 2))
    assert canonical_code(FunctionTable.identity(2, 2)).hex() == canonical_code(FunctionTable.identity(2, 2)).hex()


def test_conjugate_rejects_non_bijection():
    with pytest.raises(PreconditionError):
        conjugate(FunctionTable.identity(1, 3), [0, 0, 1])


def test_nilpotent_profile_of_product():
    f = product_of_unary([unary(3, [0, 0, 1]), unary(3, [0, 0, 1])])
    p = nilpotent_profile(f)
    assert p == NilpotentProfile(3, 2, 4, (2, 2, 1))
    assert p.rank == 4 and p.is_valid()
    assert fixed_point(f) == 0
    assert NilpotentProfile.from_json(p.to_json()) == p


def test_nilpotent_profile_requires_two_nilpotent():
    with pytest.raises(NotTwoNilpotentError):
        nilpotent_profile(FunctionTable.identity(2, 2))


@given(functions(max_size=27))
def test_profile_is_complete_invariant(f):
    # for 2-nilpotent f, equal profiles iff conjugate
    if not _two_nilpotent(f):
        return
    p = nilpotent_profile(f)
    rng = np.random.default_rng(f.size)
    h = conjugate(f, rng.permutation(f.size))
    assert nilpotent_profile(h) == p


def _two_nilpotent(f):
    f2 = f.table[f.table]
    return (f2 == f2[0]).all() and not f.is_constant()


def test_profiles_agree_with_codes_over_small_classes():
    from anet.census import class_representatives

    seen = {}
    for f in class_representatives(3, 2):
        if _two_nilpotent(f):
            p = nilpotent_profile(f)
            assert p not in seen, "two classes share a profile"
            seen[p] = canonical_code(f)
    assert len(seen) > 0
