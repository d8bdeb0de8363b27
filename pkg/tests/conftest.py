from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from anet.core import Digraph, FunctionTable

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def functions(draw, max_size: int = 64, n=None, q=None):
    """Small ``FunctionTable`` with ``q^n <= max_size``."""
    if n is None or q is None:
        pairs = [(a, b) for a in range(1, 7) for b in range(2, 9) if b**a <= max_size]
        n, q = draw(st.sampled_from(pairs))
    size = q**n
    table = draw(st.lists(st.integers(0, size - 1), min_size=size, max_size=size))
    return FunctionTable(n, q, np.array(table))


@st.composite
def digraphs(draw, min_n: int = 1, max_n: int = 5):
    n = draw(st.integers(min_n, max_n))
    rows = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n))
    return Digraph(n, tuple(rows))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance reporting: one line per criterion in the terminal summary
ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        status, title, seconds = ACCEPTANCE[num]
        terminalreporter.write_line(f"{status} criterion {num:2d}: {title} ({seconds:.1f}s)")
