"""Decision procedures on functions and digraphs.

Covers the pre-image property, unary factorizations of 2-nilpotent profiles,
universality of a function and of a pair ``(n, q)``, rank bounds for binary
networks, and digraph properties (acyclicity, Hamiltonicity, coverability,
permutability).
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .core import Digraph, FunctionTable, interaction_graph, interaction_graph_codes, is_two_nilpotent
from .errors import NotTwoNilpotentError, PreconditionError, SizeGuardError
from .iso import NilpotentProfile, nilpotent_profile

HAMILTONIAN_MAX_N = 20
SUBSET_MAX_N = 16


# ---------------------------------------------------------------------------
# unary profiles and their products


@dataclass(frozen=True)
class UnaryProfile:
    """Pre-image counts ``(a_0, a_1, ..., a_{r-1})`` of a unary 2-nilpotent map.

    ``a_0`` belongs to the fixed point; the rest are kept descending.
    """

    q: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        if len(counts) < 2:
            raise PreconditionError("a unary 2-nilpotent profile has rank >= 2")
        counts = (counts[0],) + tuple(sorted(counts[1:], reverse=True))
        if min(counts) < 1 or sum(counts) != self.q or counts[0] < len(counts):
            raise PreconditionError(f"invalid unary profile {counts} over Q_{self.q}")
        object.__setattr__(self, "counts", counts)

    @property
    def rank(self) -> int:
        return len(self.counts)

    @property
    def fixed(self) -> int:
        return self.counts[0]

    @property
    def others(self) -> tuple[int, ...]:
        return self.counts[1:]

    def to_json(self) -> list[int]:
        return list(self.counts)


def product_profile(factors: Sequence[UnaryProfile]) -> NilpotentProfile:
    """Profile of ``x -> (g_1(x_1), ..., g_n(x_n))`` for unary factors of the given profiles."""
    q = factors[0].q
    fixed = math.prod(u.fixed for u in factors)
    prods = [1]
    for u in factors:
        prods = [p * c for p in prods for c in u.counts]
    # index 0 is the all-fixed tuple
    return NilpotentProfile(q, len(factors), fixed, tuple(prods[1:]))


def unary_profiles(q: int) -> Iterator[UnaryProfile]:
    """Every unary 2-nilpotent profile over ``Q_q`` (brute force, small ``q``)."""

    def parts(total: int, cap: int) -> Iterator[tuple[int, ...]]:
        if total == 0:
            yield ()
            return
        for first in range(min(total, cap), 0, -1):
            for rest in parts(total - first, first):
                yield (first,) + rest

    for a0 in range(2, q):
        for others in parts(q - a0, q - a0):
            if a0 >= 1 + len(others):
                yield UnaryProfile(q, (a0,) + others)


# ---------------------------------------------------------------------------
# pre-image property and factorization


def profile_has_preimage_property(p: NilpotentProfile) -> bool:
    block = p.q ** (p.n - 1)
    counts = (p.fixed_preimages,) + p.other_preimages
    return all(c % block == 0 for c in counts) and p.fixed_preimages >= p.rank * block


def has_preimage_property(f: FunctionTable) -> bool:
    """Every pre-image count is a multiple of ``q^(n-1)`` and the fixed point has ``>= rank * q^(n-1)``."""
    return profile_has_preimage_property(nilpotent_profile(f))


def _ordered_factorizations(value: int, parts: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    """Non-increasing tuples of ``parts`` integers in ``[lo, hi]`` with product ``value``."""
    if parts == 1:
        if lo <= value <= hi:
            yield (value,)
        return
    for first in range(min(hi, value), lo - 1, -1):
        if value % first == 0:
            for rest in _ordered_factorizations(value // first, parts - 1, lo, first):
                yield (first,) + rest


def _multisets(cands: Sequence[int], budget: Counter, total: int, max_len: int) -> Iterator[tuple[int, ...]]:
    """Non-increasing tuples over ``cands`` summing to ``total``, length ``<= max_len``."""

    def rec(idx: int, remaining: int, length: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        if idx >= len(cands) or length >= max_len:
            return
        value = cands[idx]
        most = min(budget[value], remaining // value, max_len - length)
        for k in range(most, -1, -1):
            for tail in rec(idx + 1, remaining - k * value, length + k):
                yield (value,) * k + tail

    yield from rec(0, total, 0)


def factor_profile(p: NilpotentProfile, n: int | None = None) -> list[UnaryProfile] | None:
    """Unary profiles whose product profile equals ``p``, or ``None``.

    Such a factorization exists iff ``L_{n,n}`` is an interaction graph of
    some conjugate of a function with profile ``p``.  The search tries fixed
    counts ``a^i_0`` in decreasing lexicographic order; for each it derives
    the candidate ``a^i_v`` from the profile entries that vary in coordinate
    ``i`` only, and checks the full product at the end.
    """
    n = p.n if n is None else n
    if n != p.n:
        raise PreconditionError(f"profile lives in F({p.n},{p.q}), not n={n}")
    q, target = p.q, p
    if not p.is_valid():
        return None
    budget = Counter(p.other_preimages)
    rank = p.rank
    for a0 in _ordered_factorizations(p.fixed_preimages, n, 2, q - 1):
        options = []
        for i in range(n):
            rest = p.fixed_preimages // a0[i]
            scaled = Counter()
            for value, mult in budget.items():
                if value % rest == 0:
                    scaled[value // rest] += mult
            cands = sorted((v for v in scaled if v <= q - a0[i]), reverse=True)
            opts = [
                m
                for m in _multisets(cands, scaled, q - a0[i], a0[i] - 1)
                if rank % (len(m) + 1) == 0
            ]
            if not opts:
                break
            options.append(opts)
        else:
            for choice in itertools.product(*options):
                if math.prod(len(m) + 1 for m in choice) != rank:
                    continue
                units = [UnaryProfile(q, (a0[i],) + choice[i]) for i in range(n)]
                if product_profile(units) == target:
                    return units
    return None


def factor_profile_bruteforce(p: NilpotentProfile) -> list[UnaryProfile] | None:
    """Exhaustive reference for :func:`factor_profile` (small ``q`` only)."""
    pool = list(unary_profiles(p.q))
    for combo in itertools.combinations_with_replacement(pool, p.n):
        if product_profile(list(combo)) == p:
            return list(combo)
    return None


# ---------------------------------------------------------------------------
# universality


@dataclass(frozen=True)
class UniversalityReport:
    universal: bool
    reason: str
    two_nilpotent: bool
    preimage_property: bool
    factorization: list[UnaryProfile] | None = field(default=None, compare=False)

    def __bool__(self) -> bool:
        return self.universal

    def to_json(self) -> dict:
        fac = None if self.factorization is None else [u.to_json() for u in self.factorization]
        return {
            "two_nilpotent": self.two_nilpotent,
            "preimage_property": self.preimage_property,
            "lnn_factorization": fac,
            "universal": self.universal,
            "reason": self.reason,
        }


def is_universal(f: FunctionTable) -> UniversalityReport:
    """Universal iff 2-nilpotent with the pre-image property and an ``L_{n,n}`` factorization."""
    if f.n < 2:
        raise PreconditionError("universality is defined for n >= 2")
    if not is_two_nilpotent(f):
        return UniversalityReport(False, "not 2-nilpotent", False, False)
    p = nilpotent_profile(f)
    if not profile_has_preimage_property(p):
        return UniversalityReport(False, "pre-image property fails", True, False)
    fac = factor_profile(p, f.n)
    if fac is None:
        return UniversalityReport(False, "no L_{n,n} factorization", True, True)
    return UniversalityReport(True, "universal", True, True, fac)


@dataclass(frozen=True)
class FactorizationWitness:
    q_factors: tuple[int, ...]

    @property
    def slack(self) -> int:
        return math.prod(qi - 1 for qi in self.q_factors)

    def to_json(self) -> dict:
        return {"q_factors": list(self.q_factors), "slack": self.slack}


@dataclass(frozen=True)
class ExistenceReport:
    exists: bool
    witness: FactorizationWitness | None

    def __bool__(self) -> bool:
        return self.exists


def factorizations(q: int, n: int) -> Iterator[tuple[int, ...]]:
    """Non-decreasing ``n``-tuples of integers ``>= 2`` with product ``q``."""
    for t in _ordered_factorizations(q, n, 2, q):
        yield t[::-1]


def exists_universal(n: int, q: int) -> ExistenceReport:
    """Whether F(n, q) has a universal function; the witness maximizes the slack."""
    if n < 2 or q < 2:
        raise PreconditionError("need n, q >= 2")
    if q < 3**n:
        return ExistenceReport(False, None)
    best = None
    for t in factorizations(q, n):
        w = FactorizationWitness(t)
        if w.slack >= 2**n and (best is None or w.slack > best.slack):
            best = w
    return ExistenceReport(best is not None, best)


def prime_factor_count(r: int) -> int:
    count, p = 0, 2
    while p * p <= r:
        while r % p == 0:
            r //= p
            count += 1
        p += 1
    return count + (r > 1)


def exists_universal_regular(n: int, q: int) -> int | None:
    """Smallest rank ``r`` of a universal regular function in F(n, q), if any.

    Needs ``r`` with at least ``n`` prime factors, ``r | q`` and ``r^2 <= q``.
    """
    if n < 1 or q < 2:
        raise PreconditionError("need n >= 1, q >= 2")
    for r in range(2, math.isqrt(q) + 1):
        if q % r == 0 and prime_factor_count(r) >= n:
            return r
    return None


def split_rank(r: int, n: int) -> tuple[int, ...]:
    """Write ``r`` as a product of ``n`` factors ``>= 2`` (prime factors, last one absorbs the rest)."""
    primes = []
    rest, p = r, 2
    while p * p <= rest:
        while rest % p == 0:
            primes.append(p)
            rest //= p
        p += 1
    if rest > 1:
        primes.append(rest)
    if len(primes) < n:
        raise PreconditionError(f"{r} has fewer than {n} prime factors")
    return tuple(primes[: n - 1]) + (math.prod(primes[n - 1 :]),)


# ---------------------------------------------------------------------------
# binary rank bounds


def _subsets_max(n: int, ok) -> int:
    best = 0
    for mask in range(1 << n):
        size = bin(mask).count("1")
        if size > best and ok(mask):
            best = size
    return best


def max_independent_set(g: Digraph) -> int:
    """Largest vertex set spanning no arc; looped vertices are excluded."""
    if g.n > SUBSET_MAX_N:
        raise SizeGuardError(f"subset search capped at n={SUBSET_MAX_N}")
    return _subsets_max(g.n, lambda m: all(not (m >> i & 1) or not (g.rows[i] & m) for i in range(g.n)))


def max_induced_loops(g: Digraph) -> int:
    """Largest ``k`` such that ``L_{k,k}`` is an induced subgraph."""
    if g.n > SUBSET_MAX_N:
        raise SizeGuardError(f"subset search capped at n={SUBSET_MAX_N}")
    return _subsets_max(g.n, lambda m: all(not (m >> i & 1) or g.rows[i] & m == 1 << i for i in range(g.n)))


@dataclass(frozen=True)
class RankBoundsReport:
    n: int
    rank: int
    independent_set: int
    induced_loops: int
    upper_ok: bool
    lower_ok: bool

    @property
    def upper_bound(self) -> int:
        return 2 ** (2 * (self.n - self.independent_set))

    @property
    def holds(self) -> bool:
        return self.upper_ok and self.lower_ok


def rank_bounds(f: FunctionTable) -> RankBoundsReport:
    """Check ``2^(k2 / 2^(n-k2)) <= rank <= 2^(2(n-k1))`` exactly for binary ``f``."""
    if f.q != 2:
        raise PreconditionError("rank bounds are stated for q = 2")
    g = interaction_graph(f)
    k1, k2 = max_independent_set(g), max_induced_loops(g)
    rank = f.rank()
    upper_ok = rank <= 2 ** (2 * (f.n - k1))
    # rank >= 2^(k2 / 2^(n-k2))  <=>  rank^(2^(n-k2)) >= 2^k2
    lower_ok = rank ** (2 ** (f.n - k2)) >= 2**k2
    return RankBoundsReport(f.n, rank, k1, k2, upper_ok, lower_ok)


# ---------------------------------------------------------------------------
# digraph properties


def topological_height(g: Digraph) -> int | None:
    """Number of arcs in a longest path, or ``None`` when ``g`` has a cycle (loops included)."""
    indeg = [bin(r).count("1") for r in g.rows]
    outs = [g.out_neighbors(j) for j in range(g.n)]
    depth = [0] * g.n
    ready = [v for v in range(g.n) if indeg[v] == 0]
    done = 0
    while ready:
        v = ready.pop()
        done += 1
        for w in outs[v]:
            depth[w] = max(depth[w], depth[v] + 1)
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return max(depth) if done == g.n else None


def has_initial_loop(g: Digraph) -> bool:
    """Some vertex has itself as its unique in-neighbour."""
    return any(r == 1 << i for i, r in enumerate(g.rows))


def _hamiltonian_dfs(g: Digraph, budget: int) -> list[int] | None | bool:
    """Bounded DFS; returns a cycle, ``None`` when exhausted, ``False`` when out of budget."""
    n = g.n
    outs = [g.out_mask(j) for j in range(n)]
    path = [0]
    steps = 0

    def rec(v: int, used: int) -> list[int] | None | bool:
        nonlocal steps
        steps += 1
        if steps > budget:
            return False
        if used == (1 << n) - 1:
            return list(path) if outs[v] & 1 else None
        cand = outs[v] & ~used
        order = []
        while cand:
            low = cand & -cand
            w = low.bit_length() - 1
            order.append((bin(outs[w] & ~used).count("1"), w))
            cand ^= low
        order.sort()
        for _, w in order:
            path.append(w)
            res = rec(w, used | 1 << w)
            if res is not None:
                return res
            path.pop()
        return None

    return rec(0, 1)


def _hamiltonian_dp(g: Digraph) -> list[int] | None:
    n = g.n
    outs = [g.out_mask(j) for j in range(n)]
    full = (1 << n) - 1
    ends = [0] * (1 << n)
    ends[1] = 1
    for mask in range(1, 1 << n, 2):
        e = ends[mask]
        while e:
            low = e & -e
            v = low.bit_length() - 1
            e ^= low
            nxt = outs[v] & ~mask
            while nxt:
                wbit = nxt & -nxt
                nxt ^= wbit
                ends[mask | wbit] |= wbit
    last = [v for v in range(n) if ends[full] >> v & 1 and outs[v] & 1]
    if not last:
        return None
    # walk back
    cycle = [last[0]]
    mask = full
    while len(cycle) < n:
        v = cycle[-1]
        prev_mask = mask & ~(1 << v)
        for u in range(n):
            if ends[prev_mask] >> u & 1 and outs[u] >> v & 1:
                cycle.append(u)
                mask = prev_mask
                break
    cycle.reverse()
    return cycle


def hamiltonian_cycle(g: Digraph) -> list[int] | None:
    """Vertex order ``c`` with arcs ``c[k] -> c[k+1]`` and ``c[-1] -> c[0]``, or ``None``."""
    n = g.n
    if n > HAMILTONIAN_MAX_N:
        raise SizeGuardError(f"Hamiltonicity is exact only for n <= {HAMILTONIAN_MAX_N}")
    if n == 1:
        return [0] if g.rows[0] & 1 else None
    for v in range(n):
        if not g.rows[v] & ~(1 << v) or not g.out_mask(v) & ~(1 << v):
            return None
    res = _hamiltonian_dfs(g, budget=20000)
    if res is False:
        return _hamiltonian_dp(g)
    return res


def is_hamiltonian(g: Digraph) -> bool:
    return hamiltonian_cycle(g) is not None


@dataclass(frozen=True)
class DigraphProps:
    is_acyclic: bool
    height: int | None
    sink_count: int
    has_initial_loop: bool
    is_hamiltonian: bool | None

    def to_json(self) -> dict:
        return {
            "is_acyclic": self.is_acyclic,
            "height": self.height,
            "sink_count": self.sink_count,
            "has_initial_loop": self.has_initial_loop,
            "is_hamiltonian": self.is_hamiltonian,
        }


def digraph_props(g: Digraph) -> DigraphProps:
    height = topological_height(g)
    ham = is_hamiltonian(g) if g.n <= HAMILTONIAN_MAX_N else None
    return DigraphProps(height is not None, height, len(g.sinks()), has_initial_loop(g), ham)


# ---------------------------------------------------------------------------
# coverability and permutability


def covering_permutation(g: Digraph) -> list[int] | None:
    """``pi`` with an arc ``pi[i] -> i`` for every ``i``, ``pi`` a permutation; ``None`` if uncoverable."""
    n = g.n
    owner = [-1] * n  # owner[j] = vertex i whose representative is j

    def augment(i: int, seen: list[bool]) -> bool:
        for j in g.in_neighbors(i):
            if not seen[j]:
                seen[j] = True
                if owner[j] < 0 or augment(owner[j], seen):
                    owner[j] = i
                    return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return None
    pi = [0] * n
    for j, i in enumerate(owner):
        pi[i] = j
    return pi


def is_coverable(g: Digraph) -> bool:
    return covering_permutation(g) is not None


def overlap_condition(g: Digraph) -> bool:
    """For 1-based ``i < j``: ``N_i`` and ``N_j`` are disjoint or share ``>= log2(j) + 2`` vertices."""
    for j in range(g.n):
        for i in range(j):
            common = bin(g.rows[i] & g.rows[j]).count("1")
            if common and (common < 2 or 2 ** (common - 2) < j + 1):
                return False
    return True


class Permutability(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@lru_cache(maxsize=None)
def _all_permutations(size: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(size))), dtype=np.int64)


@lru_cache(maxsize=None)
def _permutation_graph_codes(n: int, d: int) -> np.ndarray:
    perms = _all_permutations(d**n)
    return interaction_graph_codes(perms, n, d)


def exhaustive_permutation(g: Digraph, d: int) -> FunctionTable | None:
    """First permutation of ``Q_d^n`` (lexicographic) whose interaction graph is ``g``; ``d^n <= 8``."""
    if d**g.n > 8:
        raise SizeGuardError("exhaustive permutation search needs d^n <= 8")
    codes = _permutation_graph_codes(g.n, d)
    hits = np.flatnonzero(codes == g.to_int())
    if hits.size == 0:
        return None
    return FunctionTable(g.n, d, _all_permutations(d**g.n)[hits[0]])


def is_d_permutable(g: Digraph, d: int) -> Permutability:
    """Whether some permutation of ``Q_d^n`` has interaction graph ``g``.

    For ``d >= 3`` this is exactly coverability.  For ``d = 2`` coverability
    is necessary; the overlap condition is sufficient; small ``n`` is decided
    exhaustively; otherwise the greedy construction is attempted and the
    answer is ``UNKNOWN`` if it fails.
    """
    if d < 2:
        raise PreconditionError("d must be >= 2")
    if not is_coverable(g):
        return Permutability.NO
    if d >= 3 or overlap_condition(g):
        return Permutability.YES
    if g.n <= 3:
        return Permutability.YES if exhaustive_permutation(g, 2) is not None else Permutability.NO
    from .constructors import build_2perm_permutation  # local: constructors imports this module
    from .errors import ConditionNotMetError

    try:
        build_2perm_permutation(g, require_condition=False)
        return Permutability.YES
    except ConditionNotMetError:
        return Permutability.UNKNOWN
