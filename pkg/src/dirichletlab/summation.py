"""Deterministic compensated summation helpers.

Large runs accumulate up to 10**8 terms; naive left-to-right float64
accumulation loses several digits there.  Everything below is independent
of thread count and of BLAS builds: arrays are reduced chunk-by-chunk with
numpy's pairwise summation and the chunk totals are combined with
``math.fsum``.
"""

from __future__ import annotations

import math

import numpy as np

# Chunk size for pairwise partial sums; small enough that fsum over the
# chunk totals stays cheap even for 10**8-element inputs.
_CHUNK = 1 << 16


def compensated_sum(values) -> float:
    """Sum a 1-d array of floats with compensated accumulation.

    Deterministic for a fixed input array regardless of worker/thread
    count.  Accurate to a few ulps of the exact sum.
    """
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.size == 0:
        return 0.0
    if arr.size <= _CHUNK:
        return math.fsum(arr.tolist())
    nfull = arr.size - arr.size % _CHUNK
    partials = arr[:nfull].reshape(-1, _CHUNK).sum(axis=1).tolist()
    tail = arr[nfull:]
    if tail.size:
        partials.append(math.fsum(tail.tolist()))
    return math.fsum(partials)


def compensated_dot(x, w) -> float:
    """Compensated sum of an elementwise product."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    if x.shape != w.shape:
        raise ValueError("shape mismatch in compensated_dot")
    return compensated_sum(x * w)


class NeumaierAccumulator:
    """Running compensated sum for streamed scalars/segments."""

    __slots__ = ("_sum", "_comp")

    def __init__(self) -> None:
        self._sum = 0.0
        self._comp = 0.0

    def add(self, value: float) -> None:
        t = self._sum + value
        if abs(self._sum) >= abs(value):
            self._comp += (self._sum - t) + value
        else:
            self._comp += (value - t) + self._sum
        self._sum = t

    def add_array(self, values) -> None:
        self.add(compensated_sum(values))

    @property
    def value(self) -> float:
        return self._sum + self._comp
