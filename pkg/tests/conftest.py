"""Shared fixtures and independent oracles.

Oracles use plain numpy on dense 0/1 arrays (no package internals), so they
can cross-check the bitset implementation.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from toffoli_hybrid import builtin_15_1_3, mirror

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def builtin():
    return builtin_15_1_3()


@pytest.fixture(scope="session")
def mirrored(builtin):
    return mirror(builtin)


def dense(rows: list[str]) -> np.ndarray:
    return np.array([[int(c) for c in r] for r in rows], dtype=np.uint8).reshape(len(rows), -1)


def rank_oracle(a: np.ndarray) -> int:
    a = (np.array(a, dtype=np.uint8) & 1).copy()
    r = 0
    for c in range(a.shape[1]):
        piv = [i for i in range(r, a.shape[0]) if a[i, c]]
        if not piv:
            continue
        a[[r, piv[0]]] = a[[piv[0], r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


def span_oracle(a: np.ndarray) -> set[tuple[int, ...]]:
    a = np.asarray(a, dtype=np.uint8)
    out = set()
    for coeffs in itertools.product((0, 1), repeat=a.shape[0]):
        v = (np.array(coeffs, dtype=np.int64) @ a.astype(np.int64)) % 2 if a.shape[0] else np.zeros(a.shape[1], int)
        out.add(tuple(int(x) for x in v))
    return out


def all_vectors(n: int) -> np.ndarray:
    return ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.int64)


def block_oracle(x_stab: np.ndarray, map_a: np.ndarray, p: float) -> tuple[float, float]:
    """(accept, conditional logical error) by summing over every Z-error pattern.

    A pattern is accepted iff it commutes with every X-stabilizer; an accepted
    pattern is logical iff it anticommutes with some logical X representative.
    """
    n = x_stab.shape[1]
    e = all_vectors(n)
    w = e.sum(axis=1)
    prob = p**w * (1 - p) ** (n - w)
    ok = ~((e @ x_stab.T.astype(np.int64)) % 2).any(axis=1)
    logical = ok & ((e @ map_a.T.astype(np.int64)) % 2).any(axis=1)
    acc = prob[ok].sum()
    return float(acc), float(prob[logical].sum() / acc)


def record_acceptance(label: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
