from __future__ import annotations

import itertools

import numpy as np
import pytest
from sympy import primerange

from unising.ff_core import multiplicative_order

TRIANGULATION_RS = (2, 3, 5, 7, 11, 13)
TRIANGULATION_LIMIT = 3**11


def triangulation_pairs() -> list[tuple[int, int]]:
    """Prime pairs r in {2,3,5,7,11,13}, p < 50, r != p with r^d <= 3^11."""
    out = []
    for r in TRIANGULATION_RS:
        for p in primerange(2, 50):
            if p != r and r ** multiplicative_order(r, p) <= TRIANGULATION_LIMIT:
                out.append((r, int(p)))
    return out


def all_vectors(n: int, p: int) -> np.ndarray:
    """Every vector of GF(p)^n in canonical order (coordinate 0 least significant)."""
    rows = [tuple(reversed(t)) for t in itertools.product(range(p), repeat=n)]
    return np.array(rows, dtype=np.int64).reshape(-1, n)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, ok: bool, detail: str) -> None:
    """Record and print the one-line result for an acceptance criterion."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
