"""Conjugacy of functions: functional-graph canonical codes and 2-nilpotent profiles.

Two functions ``f, h`` are conjugate when ``pi o f = h o pi`` for a permutation
``pi`` of the configurations, i.e. when their functional graphs (arc
``x -> f(x)``) are isomorphic.  A functional graph is a disjoint union of
cycles with rooted trees hanging on the cycle vertices, so it has a cheap
canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FunctionTable, is_two_nilpotent
from .errors import DimensionMismatchError, NotTwoNilpotentError, PreconditionError


# ---------------------------------------------------------------------------
# canonical codes


def _varint(value: int, out: bytearray) -> None:
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def least_rotation(seq: Sequence[int]) -> int:
    """Start index of the lexicographically least rotation (Booth's algorithm)."""
    s = list(seq) * 2
    size = len(s)
    fail = [-1] * size
    k = 0
    for j in range(1, size):
        sj = s[j]
        i = fail[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = fail[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            fail[j - k] = -1
        else:
            fail[j - k] = i + 1
    return k % len(seq) if seq else 0


@dataclass(frozen=True)
class CanonicalCode:
    """Canonical byte code of a functional graph; equal codes iff conjugate."""

    code: bytes

    def hex(self) -> str:
        return self.code.hex()

    def to_json(self) -> dict:
        return {"code_hex": self.hex()}


def canonical_code(f: FunctionTable) -> CanonicalCode:
    """Canonical form of the functional graph of ``f``.

    Trees are peeled off leaf-first.  Each vertex gets a type id determined by
    its height and the sorted multiset of its children's ids, numbered in
    increasing ``(height, children)`` order, so the numbering only depends on
    the isomorphism class.  Every cycle becomes its least rotation of root
    ids, and the cycles are sorted.  The code lists the id definitions and
    then the cycles, so it can be decoded back into the graph.
    """
    return canonical_code_of_map(f.table.tolist())


def canonical_code_of_map(succ: Sequence[int]) -> CanonicalCode:
    """:func:`canonical_code` for a raw successor list on ``range(len(succ))``."""
    succ = [int(v) for v in succ]
    size = len(succ)
    indeg = [0] * size
    for v in succ:
        indeg[v] += 1
    children: list[list[int]] = [[] for _ in range(size)]
    height = [0] * size
    remaining = indeg[:]
    stack = [v for v in range(size) if remaining[v] == 0]
    on_tree = [False] * size
    order: list[int] = []
    while stack:
        v = stack.pop()
        on_tree[v] = True
        order.append(v)
        p = succ[v]
        children[p].append(v)
        if height[v] + 1 > height[p]:
            height[p] = height[v] + 1
        remaining[p] -= 1
        if remaining[p] == 0:
            stack.append(p)

    # bucket vertices by height; cycle vertices are roots of their trees
    max_h = max(height) if size else 0
    levels: list[list[int]] = [[] for _ in range(max_h + 1)]
    for v in range(size):
        levels[height[v]].append(v)

    type_id = [0] * size
    definitions: list[tuple[int, ...]] = []
    for level in levels:
        keys = {}
        for v in level:
            keys[v] = tuple(sorted(type_id[c] for c in children[v]))
        base = len(definitions)
        distinct = sorted(set(keys.values()))
        rank = {key: base + k for k, key in enumerate(distinct)}
        definitions.extend(distinct)
        for v, key in keys.items():
            type_id[v] = rank[key]

    cycles: list[tuple[int, ...]] = []
    seen = on_tree[:]
    for v in range(size):
        if seen[v]:
            continue
        ids = []
        u = v
        while not seen[u]:
            seen[u] = True
            ids.append(type_id[u])
            u = succ[u]
        k = least_rotation(ids)
        cycles.append(tuple(ids[k:] + ids[:k]))
    cycles.sort(key=lambda c: (len(c), c))

    out = bytearray()
    _varint(len(definitions), out)
    for key in definitions:
        _varint(len(key), out)
        for c in key:
            _varint(c, out)
    _varint(len(cycles), out)
    for cyc in cycles:
        _varint(len(cyc), out)
        for c in cyc:
            _varint(c, out)
    return CanonicalCode(bytes(out))


def are_conjugate(f: FunctionTable, h: FunctionTable) -> bool:
    if (f.n, f.q) != (h.n, h.q):
        raise DimensionMismatchError(f"F({f.n},{f.q}) vs F({h.n},{h.q})")
    if not np.array_equal(np.sort(f.preimage_counts()), np.sort(h.preimage_counts())):
        return False
    return canonical_code(f) == canonical_code(h)


def conjugate(f: FunctionTable, perm: Sequence[int] | np.ndarray) -> FunctionTable:
    """``pi o f o pi^{-1}`` where ``pi`` is given as an index array."""
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (f.size,) or not np.array_equal(np.sort(perm), np.arange(f.size)):
        raise PreconditionError("perm must be a bijection of [0, q^n)")
    table = np.empty(f.size, dtype=np.int64)
    table[perm] = perm[f.table]
    return FunctionTable(f.n, f.q, table)


# ---------------------------------------------------------------------------
# 2-nilpotent profiles


@dataclass(frozen=True)
class NilpotentProfile:
    """Complete conjugacy invariant of a 2-nilpotent function.

    ``fixed_preimages`` counts the pre-images of the fixed point and
    ``other_preimages`` lists those of the remaining images, descending.
    """

    q: int
    n: int
    fixed_preimages: int
    other_preimages: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "other_preimages", tuple(sorted(self.other_preimages, reverse=True)))

    @property
    def rank(self) -> int:
        return 1 + len(self.other_preimages)

    @property
    def size(self) -> int:
        return self.q**self.n

    def is_valid(self) -> bool:
        return (
            self.rank >= 2
            and all(c >= 1 for c in self.other_preimages)
            and self.fixed_preimages + sum(self.other_preimages) == self.size
            and self.fixed_preimages >= self.rank
        )

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "fixed_preimages": self.fixed_preimages,
            "other_preimages": list(self.other_preimages),
        }

    @classmethod
    def from_json(cls, data: dict) -> "NilpotentProfile":
        return cls(int(data["q"]), int(data["n"]), int(data["fixed_preimages"]), tuple(data["other_preimages"]))


def fixed_point(f: FunctionTable) -> int:
    return int(f.table[f.table[0]])


def nilpotent_profile(f: FunctionTable) -> NilpotentProfile:
    if not is_two_nilpotent(f):
        raise NotTwoNilpotentError("f is not 2-nilpotent")
    counts = f.preimage_counts()
    fp = fixed_point(f)
    others = [int(c) for v, c in enumerate(counts.tolist()) if c and v != fp]
    return NilpotentProfile(f.q, f.n, int(counts[fp]), tuple(others))
