"""Slow pure-Python reference implementations used to cross-check the package.

Nothing here imports the algorithms under test; functions are plain lists.
"""

from __future__ import annotations

import itertools


def decode(e: int, n: int, q: int) -> list[int]:
    return [(e // q**i) % q for i in range(n)]


def encode(x, q: int) -> int:
    return sum(v * q**i for i, v in enumerate(x))


def graph_arcs(table: list[int], n: int, q: int) -> frozenset[tuple[int, int]]:
    """Arcs ``(j, i)``: changing ``x_j`` alone can change ``f_i``."""
    arcs = set()
    for e in range(q**n):
        x = decode(e, n, q)
        fx = decode(table[e], n, q)
        for j in range(n):
            for a in range(q):
                if a == x[j]:
                    continue
                y = list(x)
                y[j] = a
                fy = decode(table[encode(y, q)], n, q)
                for i in range(n):
                    if fx[i] != fy[i]:
                        arcs.add((j, i))
    return frozenset(arcs)


def conjugate_table(table: list[int], perm: tuple[int, ...]) -> list[int]:
    """``perm o f o perm^-1``."""
    out = [0] * len(table)
    for x, y in enumerate(table):
        out[perm[x]] = perm[y]
    return out


def are_conjugate(a: list[int], b: list[int]) -> bool:
    size = len(a)
    return any(conjugate_table(a, p) == b for p in itertools.permutations(range(size)))


def gset(table: list[int], n: int, q: int) -> set[frozenset[tuple[int, int]]]:
    seen, graphs = set(), set()
    for p in itertools.permutations(range(q**n)):
        h = tuple(conjugate_table(table, p))
        if h not in seen:
            seen.add(h)
            graphs.add(graph_arcs(list(h), n, q))
    return graphs


def is_permutation_by_arcs(n: int, arcs) -> bool:
    """Coverability by brute force: some permutation pi with every arc pi(i) -> i present."""
    arcs = set(arcs)
    return any(all((p[i], i) in arcs for i in range(n)) for p in itertools.permutations(range(n)))


def hamiltonian_by_arcs(n: int, arcs) -> bool:
    arcs = set(arcs)
    for p in itertools.permutations(range(1, n)):
        cyc = (0,) + p
        if all((cyc[k], cyc[(k + 1) % n]) in arcs for k in range(n)):
            return True
    return False
