"""Exhaustive and sampled ground truth.

``enumerate_gset`` computes the set of interaction graphs over the whole
conjugacy orbit of ``f`` by applying every permutation of the ``q^n`` states
at once (vectorized), which is practical up to ``q^n = 9``.  Functional-graph
classes on ``N`` states are generated by leaf addition from ``N - 1`` states
plus permutations, deduplicated by canonical code.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .constructors import build_induced_universal
from .core import Digraph, FunctionTable, interaction_graph, interaction_graph_codes
from .errors import PreconditionError, SizeGuardError
from .iso import are_conjugate, canonical_code, canonical_code_of_map
from .structure import (
    Permutability,
    digraph_props,
    is_coverable,
    is_d_permutable,
    is_hamiltonian,
    overlap_condition,
    _all_permutations,
)

MAX_ORBIT_STATES = 9


# ---------------------------------------------------------------------------
# conjugacy classes of maps on N states


def _partitions(total: int, cap: int | None = None):
    cap = total if cap is None else cap
    if total == 0:
        yield ()
        return
    for first in range(min(total, cap), 0, -1):
        for rest in _partitions(total - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def function_classes(size: int) -> tuple[tuple[int, ...], ...]:
    """One representative table per conjugacy class of maps ``[0, size) -> [0, size)``."""
    if size < 1:
        raise PreconditionError("size must be >= 1")
    if size > MAX_ORBIT_STATES:
        raise SizeGuardError(f"class enumeration capped at {MAX_ORBIT_STATES} states")
    reps: dict[bytes, tuple[int, ...]] = {}

    def add(table: list[int]) -> None:
        code = canonical_code_of_map(table).code
        reps.setdefault(code, tuple(table))

    # permutations, one per cycle type
    for cycle_type in _partitions(size):
        table, start = [], 0
        for length in cycle_type:
            table.extend(start + (k + 1) % length for k in range(length))
            start += length
        add(table)
    if size > 1:
        for rep in function_classes(size - 1):
            for target in range(size - 1):
                add(list(rep) + [target])
    return tuple(sorted(reps.values()))


# ---------------------------------------------------------------------------
# G-sets


@dataclass(frozen=True)
class GSetReport:
    code_hex: str
    n: int
    codes: frozenset[int]
    method: str = "exhaustive"

    @property
    def digraphs(self) -> list[Digraph]:
        return [Digraph.from_int(self.n, c) for c in sorted(self.codes)]

    def __contains__(self, g: Digraph) -> bool:
        return g.to_int() in self.codes

    def __len__(self) -> int:
        return len(self.codes)

    def to_json(self) -> dict:
        return {
            "f_code": self.code_hex,
            "method": self.method,
            "count": len(self.codes),
            "digraphs": [g.hex_rows() for g in self.digraphs],
        }


def _orbit_graph_codes(table: np.ndarray, n: int, q: int) -> frozenset[int]:
    size = q**n
    perms = _all_permutations(size)
    conj = np.empty_like(perms)
    np.put_along_axis(conj, perms, perms[:, table], axis=1)
    keys = conj @ (size ** np.arange(size, dtype=np.int64))
    _, first = np.unique(keys, return_index=True)
    codes = interaction_graph_codes(conj[first], n, q)
    return frozenset(int(c) for c in np.unique(codes))


_GSET_CACHE: dict[tuple[int, int, bytes], frozenset[int]] = {}


def enumerate_gset(f: FunctionTable) -> GSetReport:
    """All interaction graphs of conjugates of ``f`` (``q^n <= 9``)."""
    if f.size > MAX_ORBIT_STATES:
        raise SizeGuardError(f"orbit enumeration needs q^n <= {MAX_ORBIT_STATES}")
    code = canonical_code(f)
    key = (f.n, f.q, code.code)
    if key not in _GSET_CACHE:
        _GSET_CACHE[key] = _orbit_graph_codes(f.table, f.n, f.q)
    return GSetReport(code.hex(), f.n, _GSET_CACHE[key])


def class_representatives(n: int, q: int) -> list[FunctionTable]:
    return [FunctionTable(n, q, np.array(t)) for t in function_classes(q**n)]


def gamma_census(n: int, q: int) -> tuple[int, list[str]]:
    """Exact ``max |G(f)|`` over F(n, q) and the canonical codes attaining it."""
    if q**n > 8:
        raise SizeGuardError("gamma census needs q^n <= 8")
    best, arg = 0, []
    for f in class_representatives(n, q):
        rep = enumerate_gset(f)
        if len(rep) > best:
            best, arg = len(rep), [rep.code_hex]
        elif len(rep) == best:
            arg.append(rep.code_hex)
    return best, sorted(arg)


def is_closed_under_isomorphism(codes: frozenset[int], n: int) -> bool:
    for code in codes:
        g = Digraph.from_int(n, code)
        for tau in itertools.permutations(range(n)):
            if g.relabel(tau).to_int() not in codes:
                return False
    return True


# ---------------------------------------------------------------------------
# digraph population statistics


@dataclass(frozen=True)
class StatsReport:
    n: int
    sample_count: int
    seed: int
    exhaustive: bool
    hamiltonian: int
    coverable: int
    overlap_condition: int
    coverable_and_overlap: int
    two_permutable: int

    def fraction(self, field_name: str) -> Fraction:
        return Fraction(getattr(self, field_name), self.sample_count)

    def to_json(self) -> dict:
        names = ["hamiltonian", "coverable", "overlap_condition", "coverable_and_overlap", "two_permutable"]
        return {
            "n": self.n,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "exhaustive": self.exhaustive,
            "counts": {k: getattr(self, k) for k in names},
            "fractions": {
                k: [self.fraction(k).numerator, self.fraction(k).denominator]
                for k in names
            },
            "two_permutable_lower_bound": [
                self.fraction("two_permutable").numerator,
                self.fraction("two_permutable").denominator,
            ],
        }


def sample_digraph(n: int, seed: int, index: int) -> Digraph:
    """Digraph number ``index`` of the stream for ``seed``: every arc an independent fair coin.

    Each index gets its own PCG64 stream seeded by ``SeedSequence([seed, index])``,
    so results do not depend on how samples are split across workers.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    bits = rng.integers(0, 2, size=(n, n), dtype=np.int64)
    rows = tuple(int(sum(int(b) << j for j, b in enumerate(row))) for row in bits)
    return Digraph(n, rows)


def _stats_chunk(args) -> tuple[int, int, int, int, int]:
    n, codes, seed, indices = args
    ham = cov = ovl = both = perm = 0
    graphs = (Digraph.from_int(n, c) for c in codes) if codes is not None else (
        sample_digraph(n, seed, k) for k in indices
    )
    for g in graphs:
        c = is_coverable(g)
        o = overlap_condition(g)
        ham += is_hamiltonian(g)
        cov += c
        ovl += o
        both += c and o
        perm += is_d_permutable(g, 2) is Permutability.YES
    return ham, cov, ovl, both, perm


def digraph_stats(n: int, sample_count: int = 1000, seed: int = 0, workers: int = 1) -> StatsReport:
    """Counts of digraphs on ``n`` vertices by Hamiltonicity, coverability and the overlap condition.

    Exhaustive over all ``2^(n^2)`` digraphs when that is at most ``2^20``,
    otherwise ``sample_count`` uniform samples.
    """
    if not 1 <= n <= 64:
        raise PreconditionError("need 1 <= n <= 64")
    exhaustive = n * n <= 20
    if exhaustive:
        total = 2 ** (n * n)
        chunks = [(n, range(a, min(a + 4096, total)), seed, None) for a in range(0, total, 4096)]
    else:
        total = sample_count
        chunks = [(n, None, seed, range(a, min(a + 256, total))) for a in range(0, total, 256)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_stats_chunk, chunks))
    else:
        parts = [_stats_chunk(c) for c in chunks]
    sums = [sum(p[k] for p in parts) for k in range(5)]
    return StatsReport(n, total, seed, exhaustive, *sums)


# ---------------------------------------------------------------------------
# binary incompatibilities and induced universality


@lru_cache(maxsize=None)
def hamiltonian_codes(n: int) -> frozenset[int]:
    return frozenset(c for c in range(2 ** (n * n)) if is_hamiltonian(Digraph.from_int(n, c)))


@dataclass(frozen=True)
class IncompatibilityReport:
    code_hex: str
    acyclic_and_initial_loop: bool
    all_hamiltonian: bool

    @property
    def violations(self) -> int:
        return int(self.acyclic_and_initial_loop) + int(self.all_hamiltonian)


def binary_incompatibility_check(f: FunctionTable) -> IncompatibilityReport:
    """Check that ``G(f)`` never mixes acyclic and initial-loop digraphs, nor holds every Hamiltonian digraph."""
    if f.q != 2:
        raise PreconditionError("binary check needs q = 2")
    rep = enumerate_gset(f)
    props = [digraph_props(g) for g in rep.digraphs]
    mixed = any(p.is_acyclic for p in props) and any(p.has_initial_loop for p in props)
    all_ham = f.n >= 2 and hamiltonian_codes(f.n) <= rep.codes
    return IncompatibilityReport(rep.code_hex, mixed, all_ham)


def binary_incompatibility_census(n: int) -> list[IncompatibilityReport]:
    return [binary_incompatibility_check(f) for f in class_representatives(n, 2)]


def induced_subgraph_codes(rep: GSetReport, k: int) -> frozenset[int]:
    """Subgraphs induced on the first ``k`` vertices; enough since G-sets are closed under isomorphism."""
    return frozenset(g.induced(list(range(k))).to_int() for g in rep.digraphs)


def induced_universality_search(k: int, n: int) -> bool:
    """Whether some ``f`` in F(n, 2) is k-induced universal (``2^n <= 9``)."""
    if not 1 <= k <= n:
        raise PreconditionError("need 1 <= k <= n")
    if 2**n > MAX_ORBIT_STATES:
        raise SizeGuardError("search needs 2^n <= 9")
    need = 2 ** (k * k)
    return any(len(induced_subgraph_codes(enumerate_gset(f), k)) == need for f in class_representatives(n, 2))


def induced_lower_bound(k: int) -> int:
    """Smallest integer at least ``k + log k - log(ceil(log k) + 1) - 1``."""
    value = k + math.log2(k) - math.log2((k - 1).bit_length() + 1) - 1
    return math.ceil(value - 1e-9)


def verify_induced_family(k: int) -> dict:
    """Build every witness of ``build_induced_universal(k)`` and re-check it."""
    fam = build_induced_universal(k)
    ok = 0
    for code in range(2 ** (k * k)):
        h_graph = Digraph.from_int(k, code)
        h = fam.witness(h_graph)
        induced = interaction_graph(h).induced(list(range(k)))
        ok += induced == h_graph and are_conjugate(h, fam.base)
    fixed = int(np.count_nonzero(fam.base.table == np.arange(fam.base.size)))
    return {"k": k, "n": fam.params["n"], "digraphs": 2 ** (k * k), "verified": ok, "base_fixed_points": fixed}
