"""Universality certificates.

For a universal ``f`` and any non-empty digraph ``G`` this module builds an
explicit ``h`` conjugate to ``f`` with ``G(h) = G``.  The chain is:

1. ``l1n_witness``: a conjugate whose graph is one loop (pre-image property).
2. ``lmn_witness``: a conjugate whose graph is ``m`` loops, from the unary
   factorization of the profile.
3. ``sink_witness``: from ``m`` loops to any digraph with ``n - m`` sinks,
   via ``h_i(x) = sigma(a_i . f(x))``.

Every witness is re-checked by recomputing its interaction graph and its
2-nilpotent profile, which share no code with the constructions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constructors import unary_from_counts
from .core import (
    Digraph,
    FunctionTable,
    config_digits,
    encode_digits,
    interaction_graph,
    is_two_nilpotent,
    product_of_unary,
    relabel_function,
    unary,
)
from .errors import ConditionNotMetError, PreconditionError, VerificationError
from .iso import NilpotentProfile, fixed_point, nilpotent_profile
from .structure import factor_profile, is_universal, product_profile, profile_has_preimage_property


def _zero(q: int) -> FunctionTable:
    return unary(q, np.zeros(q, dtype=np.int64))


def _gamma_counts(p: NilpotentProfile) -> list[int]:
    block = p.q ** (p.n - 1)
    return [p.fixed_preimages // block] + [c // block for c in p.other_preimages]


def l1n_witness(p: NilpotentProfile) -> FunctionTable:
    """Conjugate with interaction graph ``L_{1,n}``: ``(h_1(x_1), 0, ..., 0)``.

    ``h_1`` has pre-image counts ``count / q^(n-1)``, laid out as consecutive
    letter blocks with the fixed point's block first.
    """
    if not profile_has_preimage_property(p):
        raise ConditionNotMetError("profile lacks the pre-image property")
    h1 = unary_from_counts(p.q, _gamma_counts(p))
    return product_of_unary([h1] + [_zero(p.q)] * (p.n - 1))


def lmn_witness(p: NilpotentProfile, m: int) -> FunctionTable:
    """Conjugate with interaction graph ``L_{m,n}`` (loops on the first ``m`` vertices).

    The unary factorization is split: the first ``n - m + 1`` factors are
    merged into one loop through their own pre-image property, the other
    ``m - 1`` are kept as they are, and ``n - m`` constants fill the rest.
    """
    n, q = p.n, p.q
    if not 1 <= m <= n:
        raise PreconditionError(f"need 1 <= m <= n, got m={m}")
    if not profile_has_preimage_property(p):
        raise ConditionNotMetError("profile lacks the pre-image property")
    factors = factor_profile(p, n)
    if factors is None:
        raise ConditionNotMetError("profile has no L_{n,n} factorization")
    if m == n:
        h = product_of_unary([unary_from_counts(q, u.counts) for u in factors])
    else:
        merged = product_profile(factors[: n - m + 1])
        if not profile_has_preimage_property(merged):
            raise VerificationError("merged factor lost the pre-image property")
        h1 = unary_from_counts(q, _gamma_counts(merged))
        kept = [unary_from_counts(q, u.counts) for u in factors[n - m + 1 :]]
        h = product_of_unary([h1] + kept + [_zero(q)] * (n - m))
    if nilpotent_profile(h) != p:
        raise VerificationError("L_{m,n} witness has the wrong profile")
    return h


def _loop_count(g: Digraph) -> int | None:
    """``m`` when ``g`` is ``L_{m,n}``, else ``None``."""
    m = 0
    while m < g.n and g.rows[m] == 1 << m:
        m += 1
    return m if all(r == 0 for r in g.rows[m:]) else None


def sink_witness(h_mn: FunctionTable, g: Digraph) -> FunctionTable:
    """Conjugate of ``h_mn`` (graph ``L_{m,n}``) whose graph is ``g``.

    ``g`` must have exactly the sinks ``m..n-1`` (0-based).  Letters are first
    renamed per component so the fixed point is ``0^n`` and letters
    ``0..r-1`` of each looped component map to 0; then
    ``h_i(x) = sigma(a_i . f(x))`` where ``a_i`` keeps the in-neighbours of
    ``i`` and ``sigma`` ranks the images lexicographically.
    """
    n, q = h_mn.n, h_mn.q
    if g.n != n:
        raise PreconditionError("digraph and function disagree on n")
    m = _loop_count(interaction_graph(h_mn))
    if m is None or m == 0:
        raise PreconditionError("h_mn must have interaction graph L_{m,n} with m >= 1")
    if g.sinks() != list(range(m, n)):
        raise PreconditionError(f"digraph must have exactly the sinks {m + 1}..{n}")
    if not is_two_nilpotent(h_mn):
        raise PreconditionError("h_mn must be 2-nilpotent")
    r = h_mn.rank()
    counts = h_mn.preimage_counts()
    z = fixed_point(h_mn)
    if counts[z] < r * (q - 1) ** (m - 1) * q ** (n - m):
        raise ConditionNotMetError("fixed point has too few pre-images")

    # unary parts read off the axis through the fixed point
    zd = config_digits(n, q)[z]
    letters = np.arange(q)
    factors = []
    for i in range(n):
        probe = np.tile(zd, (q, 1))
        probe[:, i] = letters
        factors.append(((h_mn.table[encode_digits(probe, q)] // q**i) % q))

    # per-component renaming: fixed letter first, then its other pre-images
    renamed = []
    for i in range(n):
        gi = factors[i]
        pre = [int(zd[i])] + [a for a in range(q) if gi[a] == zd[i] and a != zd[i]]
        if i < m and len(pre) < r:
            raise ConditionNotMetError(f"component {i + 1} has fewer than r pre-images of 0")
        order = pre + [a for a in range(q) if a not in set(pre)]
        rho = np.empty(q, dtype=np.int64)
        rho[order] = np.arange(q)
        new = np.empty(q, dtype=np.int64)
        new[rho] = rho[gi]
        renamed.append(new)

    digits = config_digits(n, q)
    fx = np.stack([renamed[i][digits[:, i]] for i in range(n)], axis=1)
    # lexicographic rank of an image tuple = rank of its big-endian code
    lex = np.array([q ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    image_keys = np.unique(fx @ lex)
    if image_keys[0] != 0 or image_keys.shape[0] != r:
        raise VerificationError("renamed images are not as expected")
    out = np.empty_like(fx)
    for i in range(n):
        mask = np.array([(g.rows[i] >> j) & 1 for j in range(n)], dtype=np.int64)
        out[:, i] = np.searchsorted(image_keys, fx @ (lex * mask))
    return FunctionTable.from_digits(n, q, out)


def sink_relabeling(g: Digraph) -> list[int]:
    """Order-preserving ``tau`` sending non-sinks to ``0..m-1`` and sinks to ``m..n-1``."""
    sinks = set(g.sinks())
    order = [v for v in range(g.n) if v not in sinks] + sorted(sinks)
    tau = [0] * g.n
    for k, v in enumerate(order):
        tau[v] = k
    return tau


def _inverse(tau: Sequence[int]) -> list[int]:
    inv = [0] * len(tau)
    for v, k in enumerate(tau):
        inv[k] = v
    return inv


class _WitnessFactory:
    def __init__(self, f: FunctionTable):
        self.profile = nilpotent_profile(f)
        self._lmn: dict[int, FunctionTable] = {}

    def lmn(self, m: int) -> FunctionTable:
        if m not in self._lmn:
            self._lmn[m] = lmn_witness(self.profile, m)
        return self._lmn[m]

    def build(self, g: Digraph) -> FunctionTable:
        if g.is_empty():
            raise PreconditionError("the empty digraph has no witness")
        tau = sink_relabeling(g)
        inner = g.relabel(tau)
        m = g.n - len(g.sinks())
        h = sink_witness(self.lmn(m), inner)
        return relabel_function(h, _inverse(tau))


def witness_for_digraph(f: FunctionTable, g: Digraph) -> FunctionTable:
    """A conjugate of the universal ``f`` with interaction graph ``g``."""
    report = is_universal(f)
    if not report:
        raise PreconditionError(f"f is not universal: {report.reason}")
    return _WitnessFactory(f).build(g)


@dataclass(frozen=True)
class CertificateEntry:
    digraph: Digraph
    witness: FunctionTable
    graph_ok: bool
    conjugate_ok: bool

    @property
    def ok(self) -> bool:
        return self.graph_ok and self.conjugate_ok


@dataclass(frozen=True)
class UniversalityCertificate:
    profile: NilpotentProfile
    entries: dict[int, CertificateEntry]
    coverage: str
    sample_count: int | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def verified(self) -> int:
        return sum(e.ok for e in self.entries.values())

    @property
    def valid(self) -> bool:
        n = self.profile.n
        complete = self.coverage != "all" or len(self.entries) == 2 ** (n * n) - 1
        return complete and self.verified == len(self.entries)

    def to_json(self, include_tables: bool = False) -> dict:
        rows = []
        for code in sorted(self.entries):
            e = self.entries[code]
            item = {"rows": e.digraph.hex_rows(), "graph_ok": e.graph_ok, "conjugate_ok": e.conjugate_ok}
            if include_tables:
                item["table"] = e.witness.table.tolist()
            rows.append(item)
        coverage = "all" if self.coverage == "all" else {"sample": self.sample_count, "seed": self.seed}
        return {
            "coverage": coverage,
            "profile": self.profile.to_json(),
            "entries": rows,
            "total": len(self.entries),
            "verified": self.verified,
            "valid": self.valid,
        }


def sample_digraph_codes(n: int, count: int, seed: int) -> list[int]:
    """``count`` distinct non-empty digraph codes drawn uniformly with PCG64(seed)."""
    total = 2 ** (n * n)
    if count > total - 1:
        raise PreconditionError(f"only {total - 1} non-empty digraphs on {n} vertices")
    rng = np.random.default_rng(seed)
    if total <= 1 << 20:
        return sorted((rng.choice(total - 1, size=count, replace=False) + 1).tolist())
    chosen: set[int] = set()
    words = (n * n + 31) // 32
    while len(chosen) < count:
        parts = rng.integers(0, 1 << 32, size=words, dtype=np.uint64).tolist()
        code = sum(int(p) << (32 * k) for k, p in enumerate(parts)) % total
        if code:
            chosen.add(code)
    return sorted(chosen)


def certify_universal(
    f: FunctionTable,
    coverage: str = "all",
    sample_count: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> UniversalityCertificate:
    """Build and re-verify a witness for every (or a seeded sample of) non-empty digraph.

    ``coverage`` is ``"all"`` or ``"sampled"``.  The output does not depend on
    ``workers``.
    """
    report = is_universal(f)
    if not report:
        raise PreconditionError(f"refusing to certify: {report.reason}")
    n = f.n
    if coverage == "all":
        codes = list(range(1, 2 ** (n * n)))
    elif coverage == "sampled":
        codes = sample_digraph_codes(n, sample_count, seed)
    else:
        raise PreconditionError(f"unknown coverage {coverage!r}")
    factory = _WitnessFactory(f)
    for m in range(1, n + 1):
        factory.lmn(m)
    profile = factory.profile

    def one(code: int) -> CertificateEntry:
        g = Digraph.from_int(n, code)
        h = factory.build(g)
        graph_ok = interaction_graph(h) == g
        conj_ok = is_two_nilpotent(h) and nilpotent_profile(h) == profile
        return CertificateEntry(g, h, graph_ok, conj_ok)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, codes))
    else:
        results = [one(c) for c in codes]
    entries = dict(zip(codes, results))
    return UniversalityCertificate(
        profile,
        entries,
        coverage,
        sample_count if coverage == "sampled" else None,
        seed if coverage == "sampled" else None,
    )
