"""Explicit function families and their digraph-indexed witnesses.

Pair alphabets ``Q_a x Q_b`` are packed high digit first, ``v = u * b + w``.
The pair ``(a-1, b-1)`` is then the largest letter ``ab - 1``, so removing it
from every component is a plain restriction to ``Q_{ab-1}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .core import (
    Digraph,
    FunctionTable,
    config_digits,
    digits_of,
    interaction_graph,
    product_of_unary,
    relabel_function,
    restrict_alphabet,
    unary,
)
from .errors import (
    ConditionNotMetError,
    NotHamiltonianError,
    PreconditionError,
    VerificationError,
)
from .structure import (
    covering_permutation,
    exhaustive_permutation,
    hamiltonian_cycle,
    is_coverable,
    overlap_condition,
)


@dataclass(frozen=True)
class FamilyHandle:
    """A base function together with a map from digraphs to conjugate witnesses."""

    base: FunctionTable
    kind: str
    params: dict[str, Any]
    _witness: Callable[..., FunctionTable] = field(repr=False, compare=False)

    def witness(self, *args, **kwargs) -> FunctionTable:
        return self._witness(*args, **kwargs)


def unary_from_counts(q: int, counts: Sequence[int]) -> FunctionTable:
    """Unary 2-nilpotent map with pre-image counts ``counts`` (fixed point first).

    Block ``v`` is a run of ``counts[v]`` consecutive letters, block 0 first.
    Block 0 maps to letter 0 and block ``v >= 1`` maps to letter ``v``, which
    lies in block 0 because ``counts[0] >= len(counts)``.
    """
    counts = [int(c) for c in counts]
    if sum(counts) != q or min(counts) < 1 or counts[0] < len(counts):
        raise PreconditionError(f"counts {counts} do not describe a unary 2-nilpotent map on Q_{q}")
    values = np.repeat(np.arange(len(counts), dtype=np.int64), counts)
    return unary(q, values)


def _check_graph(f: FunctionTable, g: Digraph, what: str) -> FunctionTable:
    if interaction_graph(f) != g:
        raise VerificationError(f"{what}: interaction graph differs from the target")
    return f


# ---------------------------------------------------------------------------
# universal functions


def build_threshold_universal(n: int, q_factors: Sequence[int]) -> FunctionTable:
    """``f_i(l) = 0`` if ``l < (q_i - 1) q / q_i`` else 1, on ``q = prod q_i``."""
    q_factors = [int(x) for x in q_factors]
    if len(q_factors) != n or min(q_factors) < 2:
        raise PreconditionError("need n factors, each >= 2")
    q = math.prod(q_factors)
    if math.prod(x - 1 for x in q_factors) < 2**n:
        raise ConditionNotMetError(f"slack prod(q_i - 1) < 2^{n}")
    gs = []
    for qi in q_factors:
        a0 = (qi - 1) * q // qi
        gs.append(unary(q, (np.arange(q) >= a0).astype(np.int64)))
    return product_of_unary(gs)


def _tail_index_digits(r_factors: Sequence[int]) -> list[int]:
    """Place values of the big-endian mixed radix over ``r_1..r_n``."""
    weights = []
    w = 1
    for r in reversed(r_factors):
        weights.append(w)
        w *= r
    return weights[::-1]


def build_regular_universal(g: Digraph, q: int, r_factors: Sequence[int]) -> FunctionTable:
    """Regular 2-nilpotent function of rank ``r = prod r_i`` with interaction graph ``g``.

    A letter ``v`` is the pair (head, tail) with ``v = head * r + tail``.  The
    tail is a tuple in ``Q_{r_1} x ... x Q_{r_n}`` (big-endian index), and the
    first ``r`` heads are the same product set; further heads are padding.
    Component ``i`` of the image has tail 0 and head digit ``j`` equal to the
    tail digit ``j`` of ``x_{phi(j)}`` when ``phi(j)`` is an in-neighbour of
    ``i``, else 0.
    """
    n = g.n
    r_factors = [int(x) for x in r_factors]
    if len(r_factors) != n or min(r_factors) < 2:
        raise PreconditionError("need one factor >= 2 per vertex")
    r = math.prod(r_factors)
    if q % r or q < r * r:
        raise PreconditionError(f"need r | q and q >= r^2 (r={r}, q={q})")
    if g.is_empty():
        raise PreconditionError("digraph must have at least one arc")
    active = [j for j in range(n) if g.out_mask(j)]
    phi = [j if j in active else active[0] for j in range(n)]
    weights = _tail_index_digits(r_factors)

    x = config_digits(n, q)
    tail = x % r
    out = np.zeros_like(x)
    for j in range(n):
        digit_j = (tail[:, phi[j]] // weights[j]) % r_factors[j]
        contrib = digit_j * (weights[j] * r)
        for i in range(n):
            if g.has_arc(phi[j], i):
                out[:, i] += contrib
    return _check_graph(FunctionTable.from_digits(n, q, out), g, "regular universal")


def build_nilpotent_for_digraph(g: Digraph, q: int) -> FunctionTable:
    """``f_i(x) = 1`` iff some in-neighbour ``j`` of ``i`` has ``x_j >= 2``."""
    if q < 3:
        raise PreconditionError("needs q >= 3")
    if g.is_empty():
        raise PreconditionError("digraph must have at least one arc")
    x = config_digits(g.n, q)
    big = x >= 2
    out = np.zeros_like(x)
    for i in range(g.n):
        nb = g.in_neighbors(i)
        if nb:
            out[:, i] = big[:, nb].any(axis=1)
    return _check_graph(FunctionTable.from_digits(g.n, q, out), g, "nilpotent")


# ---------------------------------------------------------------------------
# Hamiltonian family


def _hamiltonian_tables(n: int, ell: int, g: Digraph | None) -> FunctionTable:
    """``(sigma(x), h(x))`` on ``({0,1} x Q_ell)^n``; ``h = 0`` when ``g`` is None.

    ``g`` must contain the cycle ``i -> i+1 (mod n)``.
    """
    q = 2 * ell
    digits = config_digits(n, q)
    xb = digits // ell  # the {0,1} part
    out = np.empty_like(digits)
    for i in range(n):
        pred = (i - 1) % n
        h = np.zeros(digits.shape[0], dtype=np.int64)
        if g is not None:
            extra = [j for j in g.in_neighbors(i) if j != pred]
            mask = xb[:, pred] == 0
            for j in extra:
                mask &= xb[:, j] == 1
            h = mask.astype(np.int64)
        out[:, i] = xb[:, pred] * ell + h
    return FunctionTable.from_digits(n, q, out)


def build_hamiltonian_family(n: int, q: int) -> FamilyHandle:
    """Function with ``2^n`` periodic points produced by every Hamiltonian digraph."""
    if q < 3:
        raise PreconditionError("needs q >= 3")
    ell = (q + 1) // 2
    odd = q % 2 == 1

    def finish(f: FunctionTable) -> FunctionTable:
        return restrict_alphabet(f, q) if odd else f

    base = finish(_hamiltonian_tables(n, ell, None))

    def witness(g: Digraph) -> FunctionTable:
        if g.n != n:
            raise PreconditionError(f"digraph on {g.n} vertices, family has n={n}")
        cycle = hamiltonian_cycle(g)
        if cycle is None:
            raise NotHamiltonianError("digraph is not Hamiltonian")
        tau = [0] * n
        for k, v in enumerate(cycle):
            tau[v] = k
        inner = g.relabel(tau)
        h = finish(_hamiltonian_tables(n, ell, inner))
        inv = [0] * n
        for v, k in enumerate(tau):
            inv[k] = v
        return _check_graph(relabel_function(h, inv), g, "Hamiltonian witness")

    return FamilyHandle(base, "hamiltonian", {"n": n, "q": q, "ell": ell, "restricted": odd}, witness)


# ---------------------------------------------------------------------------
# d-permutable family


def dperm_layout(q: int, d: int) -> tuple[int, bool]:
    """``(ell, restricted)`` with ``q = ell*d`` (``d <= ell``) or ``q = ell*d - 1`` (``d < ell``)."""
    if d < 2 or d * d > q:
        raise PreconditionError(f"need 4 <= d^2 <= q (d={d}, q={q})")
    if q % d == 0 and d <= q // d:
        return q // d, False
    if (q + 1) % d == 0 and d < (q + 1) // d:
        return (q + 1) // d, True
    raise PreconditionError(f"d={d} divides neither q={q} nor q+1 suitably")


def build_dperm_family(n: int, q: int, d: int) -> FamilyHandle:
    """2-nilpotent ``f(x, y) = (0^n, min(x, d-1))`` on ``(Q_ell x Q_d)^n``.

    ``witness(g)`` takes a permutation ``g`` of ``Q_d^n`` and returns
    ``h(x, y) = (0^n, g(min(x, d-1)))``, which is conjugate to the base and has
    interaction graph ``G(g)``.
    """
    ell, restricted = dperm_layout(q, d)
    big = ell * d
    digits = config_digits(n, big)
    sig = np.minimum(digits // d, d - 1)

    def finish(f: FunctionTable) -> FunctionTable:
        return restrict_alphabet(f, q) if restricted else f

    base = finish(FunctionTable.from_digits(n, big, sig))

    def witness(g: FunctionTable) -> FunctionTable:
        if g.n != n or g.q != d:
            raise PreconditionError(f"g must lie in F({n},{d})")
        if not g.is_permutation():
            raise PreconditionError("g must be a permutation")
        inner = g.table[np.asarray(sig @ np.array([d**i for i in range(n)]), dtype=np.int64)]
        h = FunctionTable.from_digits(n, big, digits_of(inner, n, d))
        return _check_graph(finish(h), interaction_graph(g), "d-permutable witness")

    return FamilyHandle(base, "dperm", {"n": n, "q": q, "d": d, "ell": ell, "restricted": restricted}, witness)


def _deposit(value: int, positions: Sequence[int]) -> int:
    out = 0
    for k, p in enumerate(positions):
        if value >> k & 1:
            out |= 1 << p
    return out


def build_2perm_permutation(g: Digraph, require_condition: bool = True) -> FunctionTable:
    """Binary permutation with interaction graph ``g``.

    Uses a covering permutation ``pi`` (arc ``pi(i) -> i``) and patterns
    ``alpha(i)`` on ``M_i = N_i - {pi(i)}`` chosen greedily so that earlier
    patterns disagree on every non-empty ``M_i & M_j``.  Then
    ``f_i(x) = x_pi(i)`` if ``x`` matches ``alpha(i)`` on ``M_i``, else its negation.
    The overlap condition guarantees the greedy step succeeds and the result
    is a bijection; with ``require_condition=False`` the construction is
    attempted anyway and verified.
    """
    n = g.n
    if n > 20:
        raise PreconditionError("binary tables are limited to n <= 20")
    pi = covering_permutation(g)
    if pi is None:
        raise ConditionNotMetError("digraph is not coverable")
    condition = overlap_condition(g)
    if require_condition and not condition:
        raise ConditionNotMetError("overlap condition fails")
    masks = [g.rows[i] & ~(1 << pi[i]) for i in range(n)]
    alpha = [0] * n
    for j in range(n):
        positions = [p for p in range(n) if masks[j] >> p & 1]
        earlier = [i for i in range(j) if masks[i] & masks[j]]
        for a in range(1 << len(positions)):
            full = _deposit(a, positions)
            if all((full ^ alpha[i]) & masks[i] & masks[j] for i in earlier):
                alpha[j] = full
                break
        else:
            raise ConditionNotMetError(f"no admissible pattern for vertex {j + 1}")
    e = np.arange(1 << n, dtype=np.int64)
    table = np.zeros_like(e)
    for i in range(n):
        bit = (e >> pi[i]) & 1
        mismatch = ((e & masks[i]) != alpha[i]).astype(np.int64)
        table |= (bit ^ mismatch) << i
    f = FunctionTable(n, 2, table)
    ok = f.is_permutation() and interaction_graph(f) == g
    if not ok:
        if condition:
            raise VerificationError("greedy construction failed despite the overlap condition")
        raise ConditionNotMetError("greedy construction did not yield a permutation")
    return f


def _det_mod(a: np.ndarray, d: int) -> int:
    """Determinant of an integer matrix, reduced mod ``d`` (Bareiss, exact)."""
    m = [[int(v) for v in row] for row in a]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for s in range(k + 1, n):
                if m[s][k]:
                    m[k], m[s] = m[s], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return (sign * m[n - 1][n - 1]) % d


def build_linear_permutation(g: Digraph, d: int, seed: int = 0, tries: int = 2000) -> FunctionTable:
    """Permutation ``x -> A x mod d`` of ``Q_d^n`` with interaction graph ``g``.

    ``A`` is supported exactly on the arcs of ``g`` and has a unit
    determinant.  For prime ``d >= 3`` entries in ``{1, 2}`` always suffice
    when ``g`` is coverable; the search is seeded-random then exhaustive.
    """
    n = g.n
    if d < 2:
        raise PreconditionError("d must be >= 2")
    if covering_permutation(g) is None:
        raise ConditionNotMetError("digraph is not coverable")
    arcs = g.arcs()
    values = list(range(1, d))
    rng = np.random.default_rng(seed)

    def table_for(entries: Sequence[int]) -> FunctionTable:
        a = np.zeros((n, n), dtype=np.int64)
        for (j, i), v in zip(arcs, entries):
            a[i, j] = v
        x = config_digits(n, d)
        return FunctionTable.from_digits(n, d, (x @ a.T) % d)

    def unit(entries: Sequence[int]) -> bool:
        a = np.zeros((n, n), dtype=np.int64)
        for (j, i), v in zip(arcs, entries):
            a[i, j] = v
        return math.gcd(_det_mod(a, d), d) == 1

    candidates: list[Sequence[int]] = [rng.choice(values, size=len(arcs)).tolist() for _ in range(tries)]
    small = values[:2]
    if len(small) ** len(arcs) <= 1 << 16:
        candidates.extend(itertools.product(small, repeat=len(arcs)))
    for entries in candidates:
        if unit(entries):
            f = table_for(entries)
            return _check_graph(f, g, "linear permutation")
    raise ConditionNotMetError(f"no unit-determinant matrix found for d={d}")


def find_permutation(g: Digraph, d: int) -> FunctionTable:
    """Some permutation of ``Q_d^n`` with interaction graph ``g``.

    Linear for ``d >= 3``; for ``d = 2`` the greedy construction, then an
    exhaustive search when ``2^n <= 8``.
    """
    if not is_coverable(g):
        raise ConditionNotMetError("digraph is not coverable")
    if d >= 3:
        return build_linear_permutation(g, d)
    try:
        return build_2perm_permutation(g, require_condition=False)
    except ConditionNotMetError:
        if d**g.n > 8:
            raise
    found = exhaustive_permutation(g, d)
    if found is None:
        raise ConditionNotMetError("digraph is not 2-permutable")
    return found


# ---------------------------------------------------------------------------
# binary constructions


def build_universal_augmentation_family(n: int) -> FamilyHandle:
    """``f(x, 1) = (x, 0)``, ``f(x, 0) = 0^n`` on ``{0,1}^n``; the last component is the new vertex."""
    if n < 2:
        raise PreconditionError("needs n >= 2")
    low = (1 << (n - 1)) - 1
    e = np.arange(1 << n, dtype=np.int64)
    top = e >> (n - 1)
    base = FunctionTable(n, 2, np.where(top == 1, e & low, 0))

    def witness(h_graph: Digraph, g: FunctionTable) -> FunctionTable:
        if g.n != n - 1 or g.q != 2 or not g.is_permutation():
            raise PreconditionError(f"g must be a permutation in F({n - 1},2)")
        if interaction_graph(g) != h_graph:
            raise PreconditionError("G(g) differs from H")
        table = np.where(top == 1, g.table[e & low], g.table[0])
        h = FunctionTable(n, 2, table)
        return _check_graph(h, augmentation(h_graph), "augmentation witness")

    return FamilyHandle(base, "augmentation", {"n": n}, witness)


def augmentation(h: Digraph) -> Digraph:
    """Add a vertex ``n`` with an arc to every vertex of ``h``."""
    n = h.n + 1
    arcs = h.arcs() + [(n - 1, i) for i in range(n - 1)]
    return Digraph.from_arcs(n, arcs)


def induced_universal_size(k: int) -> int:
    """``k + ceil(log2 k) + 1``."""
    return k + (k - 1).bit_length() + 1


def build_induced_universal(k: int) -> FamilyHandle:
    """Binary function on ``{0,1}^(k+1) x {0,1}^m`` whose conjugates induce every digraph on ``k`` vertices.

    ``f(x, y) = (x_1 repeated k+1 times, y)``.  The witness for ``H`` uses a
    parity test on ``I_{phi(y)}`` and writes the indicator of ``J_{phi(y)}``,
    with ``phi(y) = int(y) mod k``.
    """
    if k < 1:
        raise PreconditionError("needs k >= 1")
    n = induced_universal_size(k)
    m = n - k - 1
    size = 1 << n
    e = np.arange(size, dtype=np.int64)
    xmask = (1 << (k + 1)) - 1
    ypart = e & ~xmask
    y = e >> (k + 1)
    base = FunctionTable(n, 2, np.where(e & 1, xmask, 0) | ypart)

    def witness(h_graph: Digraph) -> FunctionTable:
        if h_graph.n != k:
            raise PreconditionError(f"H must have {k} vertices")
        table = np.empty_like(e)
        phi = y % k
        for i in range(k):
            out = h_graph.out_mask(i)
            if out >> i & 1:
                imask, jmask = 1 << i, out
            else:
                imask, jmask = (1 << i) | (1 << k), out | (1 << k)
            sel = phi == i
            parity = np.bitwise_count(e[sel] & imask) & 1
            table[sel] = np.where(parity == 1, jmask, 0) | ypart[sel]
        h = FunctionTable(n, 2, table)
        if interaction_graph(h).induced(list(range(k))) != h_graph:
            raise VerificationError("induced subgraph differs from H")
        return h

    stated = {"fixed_points_base": 2 ** (m + 1), "fixed_points_witness_text": 2**m, "preimages_each": 2**k}
    return FamilyHandle(base, "induced", {"k": k, "n": n, "m": m, "stated": stated}, witness)


def fixed_point_count(f: FunctionTable) -> int:
    return int(np.count_nonzero(f.table == np.arange(f.size)))
