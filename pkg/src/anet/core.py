"""Function tables and digraphs, with their encodings and basic dynamics.

A configuration ``x = (x_1, ..., x_n)`` over ``Q = {0, ..., q-1}`` is stored as
the integer ``sum(x_i * q**(i-1))`` (little-endian mixed radix, component 1 is
the least significant digit).  A function ``f: Q^n -> Q^n`` is the table of
encoded images, one entry per encoded configuration.

Vertices of a :class:`Digraph` are 0-based in the Python API.  The JSON and
DOT formats use the 1-based labels ``1..n``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    AlphabetMismatchError,
    PreconditionError,
    RestrictionError,
    SizeGuardError,
)

MAX_COMPONENTS = 12
MAX_STATES = 1 << 24
MAX_VERTICES = 64


# ---------------------------------------------------------------------------
# configurations


def check_size(n: int, q: int) -> int:
    """Return ``q**n`` after enforcing the desk-scale guard."""
    if n < 1 or q < 2:
        raise PreconditionError(f"need n >= 1 and q >= 2, got n={n}, q={q}")
    if n > MAX_COMPONENTS:
        raise SizeGuardError(f"n={n} exceeds {MAX_COMPONENTS} components")
    size = q**n
    if size > MAX_STATES:
        raise SizeGuardError(f"q^n = {size} exceeds 2^24 states")
    return size


def encode(x: Sequence[int], q: int) -> int:
    value = 0
    for digit in reversed(x):
        if not 0 <= digit < q:
            raise PreconditionError(f"digit {digit} outside Q_{q}")
        value = value * q + int(digit)
    return value


def decode(value: int, n: int, q: int) -> tuple[int, ...]:
    if not 0 <= value < q**n:
        raise PreconditionError(f"index {value} outside [0, {q}^{n})")
    out = []
    for _ in range(n):
        value, digit = divmod(value, q)
        out.append(digit)
    return tuple(out)


@lru_cache(maxsize=32)
def _config_digits_cached(n: int, q: int) -> np.ndarray:
    idx = np.arange(q**n, dtype=np.int64)
    cols = [(idx // q**i) % q for i in range(n)]
    out = np.stack(cols, axis=1)
    out.flags.writeable = False
    return out


def config_digits(n: int, q: int) -> np.ndarray:
    """Digits of every configuration, shape ``(q**n, n)``; row ``e`` decodes ``e``."""
    check_size(n, q)
    return _config_digits_cached(n, q)


def digits_of(values: np.ndarray, n: int, q: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    return np.stack([(values // q**i) % q for i in range(n)], axis=-1)


def encode_digits(digits: np.ndarray, q: int) -> np.ndarray:
    """Inverse of :func:`digits_of` along the last axis."""
    digits = np.asarray(digits, dtype=np.int64)
    n = digits.shape[-1]
    weights = np.array([q**i for i in range(n)], dtype=np.int64)
    return digits @ weights


# ---------------------------------------------------------------------------
# function tables


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """Explicit table of ``f`` in F(n, q).

    ``table[e]`` is the encoding of ``f(decode(e))``.  The array is copied and
    made read-only at construction.
    """

    n: int
    q: int
    table: np.ndarray

    def __post_init__(self) -> None:
        size = check_size(self.n, self.q)
        arr = np.array(self.table, dtype=np.int64).reshape(-1)
        if arr.shape[0] != size:
            raise PreconditionError(f"table has {arr.shape[0]} entries, expected {size}")
        if size and (arr.min() < 0 or arr.max() >= size):
            raise PreconditionError("table entry outside [0, q^n)")
        arr.flags.writeable = False
        object.__setattr__(self, "table", arr)

    @property
    def size(self) -> int:
        return self.table.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FunctionTable):
            return NotImplemented
        return (self.n, self.q) == (other.n, other.q) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.n, self.q, self.table.tobytes()))

    def __repr__(self) -> str:
        head = ", ".join(map(str, self.table[:8].tolist()))
        more = ", ..." if self.size > 8 else ""
        return f"FunctionTable(n={self.n}, q={self.q}, table=[{head}{more}])"

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        return decode(int(self.table[encode(x, self.q)]), self.n, self.q)

    @classmethod
    def from_digits(cls, n: int, q: int, out_digits: np.ndarray) -> "FunctionTable":
        """Build from the image digits of every configuration, shape ``(q**n, n)``."""
        return cls(n, q, encode_digits(out_digits, q))

    @classmethod
    def from_map(cls, n: int, q: int, func: Callable[[tuple[int, ...]], Sequence[int]]) -> "FunctionTable":
        """Build by calling ``func`` on every configuration tuple (slow path)."""
        size = check_size(n, q)
        table = [encode(func(decode(e, n, q)), q) for e in range(size)]
        return cls(n, q, np.array(table, dtype=np.int64))

    @classmethod
    def identity(cls, n: int, q: int) -> "FunctionTable":
        return cls(n, q, np.arange(check_size(n, q), dtype=np.int64))

    @classmethod
    def constant(cls, n: int, q: int, value: Sequence[int] | int = 0) -> "FunctionTable":
        size = check_size(n, q)
        v = value if isinstance(value, (int, np.integer)) else encode(value, q)
        return cls(n, q, np.full(size, int(v), dtype=np.int64))

    def image_digits(self) -> np.ndarray:
        return digits_of(self.table, self.n, self.q)

    def component(self, i: int) -> np.ndarray:
        """Values of ``f_i`` (0-based ``i``) on every configuration."""
        return (self.table // self.q**i) % self.q

    def compose(self, other: "FunctionTable") -> "FunctionTable":
        """``self o other``."""
        if (self.n, self.q) != (other.n, other.q):
            raise AlphabetMismatchError("composition needs equal n and q")
        return FunctionTable(self.n, self.q, self.table[other.table])

    def power(self, k: int) -> "FunctionTable":
        result = np.arange(self.size, dtype=np.int64)
        base = self.table
        while k:
            if k & 1:
                result = base[result]
            base = base[base]
            k >>= 1
        return FunctionTable(self.n, self.q, result)

    def preimage_counts(self) -> np.ndarray:
        return np.bincount(self.table, minlength=self.size)

    def rank(self) -> int:
        return int(np.count_nonzero(self.preimage_counts()))

    def is_constant(self) -> bool:
        return bool((self.table == self.table[0]).all())

    def is_permutation(self) -> bool:
        return self.rank() == self.size

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "table": self.table.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "FunctionTable":
        return cls(int(data["n"]), int(data["q"]), np.array(data["table"], dtype=np.int64))


# ---------------------------------------------------------------------------
# digraphs


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class Digraph:
    """Digraph on ``n`` vertices stored as in-neighbour bit rows.

    Bit ``j`` of ``rows[i]`` is set iff there is an arc ``j -> i``, i.e. the
    local function ``f_i`` depends on input ``j``.
    """

    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_VERTICES:
            raise PreconditionError(f"digraph needs 1 <= n <= {MAX_VERTICES}")
        rows = tuple(int(r) for r in self.rows)
        if len(rows) != self.n:
            raise PreconditionError("need one row per vertex")
        full = (1 << self.n) - 1
        if any(r < 0 or r & ~full for r in rows):
            raise PreconditionError("row has bits above position n-1")
        object.__setattr__(self, "rows", rows)

    # constructors -------------------------------------------------------
    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Digraph":
        """Arcs ``(j, i)`` meaning ``j -> i``, 0-based."""
        rows = [0] * n
        for j, i in arcs:
            if not (0 <= i < n and 0 <= j < n):
                raise PreconditionError(f"arc ({j}, {i}) outside [0, {n})")
            rows[i] |= 1 << j
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> "Digraph":
        return cls(n, (0,) * n)

    @classmethod
    def loops(cls, m: int, n: int) -> "Digraph":
        """L_{m,n}: loops on the first ``m`` vertices, nothing else."""
        return cls(n, tuple((1 << i) if i < m else 0 for i in range(n)))

    @classmethod
    def cycle(cls, n: int) -> "Digraph":
        """C_n with arcs ``i -> i+1 (mod n)``."""
        return cls.from_arcs(n, [((i - 1) % n, i) for i in range(n)])

    @classmethod
    def complete(cls, n: int, loops: bool = True) -> "Digraph":
        full = (1 << n) - 1
        return cls(n, tuple(full if loops else full & ~(1 << i) for i in range(n)))

    @classmethod
    def from_int(cls, n: int, code: int) -> "Digraph":
        mask = (1 << n) - 1
        return cls(n, tuple((code >> (i * n)) & mask for i in range(n)))

    def to_int(self) -> int:
        """Pack as ``sum(rows[i] << (i*n))``; bit ``i*n + j`` is the arc ``j -> i``."""
        code = 0
        for i, r in enumerate(self.rows):
            code |= r << (i * self.n)
        return code

    # queries ------------------------------------------------------------
    def has_arc(self, j: int, i: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def arcs(self) -> list[tuple[int, int]]:
        return [(j, i) for i in range(self.n) for j in range(self.n) if self.rows[i] >> j & 1]

    def arc_count(self) -> int:
        return sum(_popcount(r) for r in self.rows)

    def in_neighbors(self, i: int) -> list[int]:
        return [j for j in range(self.n) if self.rows[i] >> j & 1]

    def out_mask(self, j: int) -> int:
        return sum(1 << i for i in range(self.n) if self.rows[i] >> j & 1)

    def out_neighbors(self, j: int) -> list[int]:
        return [i for i in range(self.n) if self.rows[i] >> j & 1]

    def sinks(self) -> list[int]:
        """Vertices of out-degree 0 (a loop counts as an out-arc)."""
        used = 0
        for r in self.rows:
            used |= r
        return [j for j in range(self.n) if not used >> j & 1]

    def is_empty(self) -> bool:
        return not any(self.rows)

    def relabel(self, tau: Sequence[int]) -> "Digraph":
        """Image under the vertex permutation ``tau``: arc ``j -> i`` becomes ``tau[j] -> tau[i]``."""
        return Digraph.from_arcs(self.n, [(tau[j], tau[i]) for j, i in self.arcs()])

    def induced(self, vertices: Sequence[int]) -> "Digraph":
        """Subgraph induced by ``vertices``, relabelled ``0..len-1`` in the given order."""
        pos = {v: k for k, v in enumerate(vertices)}
        arcs = [(pos[j], pos[i]) for j, i in self.arcs() if i in pos and j in pos]
        return Digraph.from_arcs(len(vertices), arcs)

    # formats ------------------------------------------------------------
    def hex_rows(self) -> list[str]:
        return [format(r, "016x") for r in self.rows]

    @classmethod
    def from_hex_rows(cls, words: Sequence[str]) -> "Digraph":
        return cls(len(words), tuple(int(w, 16) for w in words))

    def to_json(self) -> dict:
        return {"n": self.n, "arcs": [[j + 1, i + 1] for j, i in self.arcs()]}

    @classmethod
    def from_json(cls, data: dict) -> "Digraph":
        n = int(data["n"])
        return cls.from_arcs(n, [(int(j) - 1, int(i) - 1) for j, i in data["arcs"]])

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        lines += [f"  {v + 1};" for v in range(self.n)]
        lines += [f"  {j + 1} -> {i + 1};" for j, i in self.arcs()]
        lines.append("}")
        return "\n".join(lines) + "\n"


def functional_graph_dot(f: FunctionTable, name: str = "Gamma") -> str:
    """DOT text of the dynamics digraph (arc ``x -> f(x)``) with decoded labels."""
    lines = [f"digraph {name} {{"]
    for e in range(f.size):
        label = "".join(map(str, decode(e, f.n, f.q)))
        lines.append(f'  {e} [label="{label}"];')
    lines += [f"  {e} -> {int(v)};" for e, v in enumerate(f.table)]
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(data: dict) -> str:
    """Canonical JSON: sorted keys, no floats expected."""
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# dynamics


def interaction_graph(f: FunctionTable) -> Digraph:
    """G(f): arc ``j -> i`` iff ``f_i`` changes when only ``x_j`` changes."""
    n, q = f.n, f.q
    rows = [0] * n
    for i in range(n):
        col = f.component(i)
        for j in range(n):
            block = col.reshape(q ** (n - 1 - j), q, q**j)
            if (block != block[:, :1, :]).any():
                rows[i] |= 1 << j
    return Digraph(n, tuple(rows))


def interaction_graph_codes(tables: np.ndarray, n: int, q: int) -> np.ndarray:
    """Batch version of :func:`interaction_graph`; returns :meth:`Digraph.to_int` codes."""
    tables = np.asarray(tables, dtype=np.int64)
    k = tables.shape[0]
    codes = np.zeros(k, dtype=np.int64)
    for i in range(n):
        col = (tables // q**i) % q
        for j in range(n):
            block = col.reshape(k, q ** (n - 1 - j), q, q**j)
            varies = (block != block[:, :, :1, :]).any(axis=(1, 2, 3))
            codes |= varies.astype(np.int64) << (i * n + j)
    return codes


@dataclass(frozen=True)
class DynamicsSummary:
    rank: int
    fixed_point_count: int
    periodic_point_count: int
    nilpotency_index: int | None
    is_permutation: bool
    is_regular: bool
    degree: int | None


def dynamics_summary(f: FunctionTable) -> DynamicsSummary:
    counts = f.preimage_counts()
    image_counts = counts[counts > 0]
    rank = int(image_counts.shape[0])
    fixed = int(np.count_nonzero(f.table == np.arange(f.size)))
    regular = bool((image_counts == image_counts[0]).all())

    # iterate image sets until they stop shrinking
    current = np.unique(f.table)
    k = 1
    nil = 1 if current.shape[0] == 1 else None
    while nil is None:
        nxt = np.unique(f.table[current])
        k += 1
        if nxt.shape[0] == 1:
            nil = k
        elif nxt.shape[0] == current.shape[0]:
            break
        current = nxt
    periodic = 1 if nil is not None else int(current.shape[0])
    return DynamicsSummary(
        rank=rank,
        fixed_point_count=fixed,
        periodic_point_count=periodic,
        nilpotency_index=nil,
        is_permutation=rank == f.size,
        is_regular=regular,
        degree=int(image_counts[0]) if regular else None,
    )


def is_two_nilpotent(f: FunctionTable) -> bool:
    f2 = f.table[f.table]
    return bool((f2 == f2[0]).all()) and not f.is_constant()


def product_of_unary(gs: Sequence[FunctionTable]) -> FunctionTable:
    """``f(x) = (g_1(x_1), ..., g_n(x_n))`` for unary tables ``g_i``."""
    if not gs:
        raise PreconditionError("need at least one factor")
    q = gs[0].q
    for g in gs:
        if g.n != 1:
            raise PreconditionError("factors must be unary (n = 1)")
        if g.q != q:
            raise AlphabetMismatchError(f"factor over Q_{g.q} mixed with Q_{q}")
    n = len(gs)
    digits = config_digits(n, q)
    out = np.stack([gs[i].table[digits[:, i]] for i in range(n)], axis=1)
    return FunctionTable.from_digits(n, q, out)


def unary(q: int, values: Sequence[int]) -> FunctionTable:
    return FunctionTable(1, q, np.asarray(values, dtype=np.int64))


def restrict_alphabet(f: FunctionTable, q_small: int) -> FunctionTable:
    """Restriction of ``f`` to the sub-cube ``{0..q_small-1}^n``."""
    if not 2 <= q_small <= f.q:
        raise PreconditionError(f"need 2 <= q' <= {f.q}")
    small = config_digits(f.n, q_small)
    images = digits_of(f.table[encode_digits(small, f.q)], f.n, f.q)
    if (images >= q_small).any():
        raise RestrictionError(f"f does not map Q_{q_small}^{f.n} into itself")
    return FunctionTable.from_digits(f.n, q_small, images)


def relabel_function(f: FunctionTable, tau: Sequence[int]) -> FunctionTable:
    """Conjugate ``f`` by the coordinate permutation induced by ``tau``.

    The result ``h`` satisfies ``G(h) = G(f).relabel(tau)``: component
    ``tau[i]`` of ``h`` behaves like component ``i`` of ``f``.
    """
    n, q = f.n, f.q
    tau = list(tau)
    if sorted(tau) != list(range(n)):
        raise PreconditionError("tau must be a permutation of range(n)")
    inv = [0] * n
    for i, t in enumerate(tau):
        inv[t] = i
    y = config_digits(n, q)
    # x_i = y_{tau(i)}
    x = y[:, tau]
    fx = digits_of(f.table[encode_digits(x, q)], n, q)
    # h(y)_{tau(i)} = f(x)_i
    return FunctionTable.from_digits(n, q, fx[:, inv])


def random_function(n: int, q: int, rng: np.random.Generator) -> FunctionTable:
    size = check_size(n, q)
    return FunctionTable(n, q, rng.integers(0, size, size=size))
