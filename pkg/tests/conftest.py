"""Shared independent oracles for the test suite.

These are deliberately implemented from scratch (trial division, an
Euler-Maclaurin zeta evaluation) so they share no code with the package
under test.
"""

from __future__ import annotations

import math

import numpy as np
import pytest


def trial_division_primes(limit: int) -> list[int]:
    out = []
    for n in range(2, limit + 1):
        if all(n % p for p in out if p * p <= n):
            out.append(n)
    return out


def zeta_em(s: float, n_terms: int = 64) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin with three
    correction terms; accurate to ~1e-14 for s in (1, 10]."""
    n = n_terms
    head = math.fsum(k ** (-s) for k in range(1, n))
    tail = n ** (1.0 - s) / (s - 1.0) + 0.5 * n ** (-s)
    tail += s * n ** (-s - 1.0) / 12.0
    tail -= s * (s + 1.0) * (s + 2.0) * n ** (-s - 3.0) / 720.0
    return head + tail


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


@pytest.fixture(scope="session")
def small_primes():
    return trial_division_primes(10_000)


@pytest.fixture(autouse=True)
def _quiet_expected_warnings(recwarn):
    yield
