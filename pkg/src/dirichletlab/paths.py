"""Deterministic seed-derived sign paths and their prefix sums.

Signs are produced by a counter-mode SplitMix64-style generator keyed by
(master_seed, trial_index, element index), so any sign is random-access:
no stream state, bit-identical results from any thread or worker, and
distinct trial indices give statistically independent streams.  The sign
is the top bit of the mixed 64-bit word, mapped to {-1, +1}.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .errors import ResourceBudgetError, ValidationError
from .frequencies import DEFAULT_TERM_BUDGET, FrequencySequence

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_TRIAL_GAMMA = 0xBF58476D1CE4E5B9


def _mix64(z: int) -> int:
    """Finalizer of SplitMix64 (Stafford variant 13)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


def _stream_key(master_seed: int, trial_index: int) -> int:
    base = _mix64(master_seed & _MASK)
    return _mix64(base ^ ((trial_index + 1) * _TRIAL_GAMMA & _MASK))


@dataclass(frozen=True)
class SamplePath:
    """An assignment of a sign in {-1,+1} to every index of a sequence.

    ``forced`` pins finitely many indices to fixed signs (used to realize
    conditioning events such as "all signs +1 up to a cutoff"); everywhere
    else the counter generator decides.
    """

    seq: FrequencySequence
    master_seed: int
    trial_index: int = 0
    forced: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.trial_index < 0:
            raise ValidationError("trial_index must be >= 0")
        for idx, sign in self.forced:
            if sign not in (-1, 1):
                raise ValidationError(f"forced sign for index {idx} must be +-1")
            if idx < self.seq.start_index:
                raise ValidationError(f"forced index {idx} precedes start_index")

    # ---- sign access --------------------------------------------------

    def sign_at(self, index: int) -> int:
        if index < self.seq.start_index:
            raise ValidationError(f"index {index} precedes start_index")
        for idx, sign in self.forced:
            if idx == index:
                return sign
        key = _stream_key(self.master_seed, self.trial_index)
        z = _mix64((key + index * _GAMMA) & _MASK)
        return 1 if (z >> 63) else -1

    def signs_for_indices(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized signs (float64 in {-1.0, +1.0}) for an index array."""
        idx = np.ascontiguousarray(indices, dtype=np.uint64)
        key = np.uint64(_stream_key(self.master_seed, self.trial_index))
        z = _mix64_array(key + idx * np.uint64(_GAMMA))
        signs = (z >> np.uint64(63)).astype(np.float64) * 2.0 - 1.0
        if self.forced and signs.size:
            # index arrays are served in increasing order throughout the
            # package, which makes the pin lookup a binary search
            for fidx, fsign in self.forced:
                pos = int(np.searchsorted(idx, np.uint64(fidx)))
                if pos < signs.size and int(idx[pos]) == fidx:
                    signs[pos] = float(fsign)
        return signs

    def signs_up_to(self, cutoff: float, budget: int | None = None) -> np.ndarray:
        """Signs of all served elements <= cutoff, in element order."""
        count = self.seq.counting_function(cutoff)
        limit = DEFAULT_TERM_BUDGET if budget is None else budget
        if count > limit:
            raise ResourceBudgetError(f"{count} signs exceed budget {limit}")
        start = self.seq.start_index
        return self.signs_for_indices(np.arange(start, start + count, dtype=np.uint64))


def forced_path(assignment: Mapping[int, int], default: SamplePath) -> SamplePath:
    """A path agreeing with ``assignment`` where given, ``default`` elsewhere."""
    merged = dict(default.forced)
    for idx, sign in assignment.items():
        if sign not in (-1, 1):
            raise ValidationError(f"sign for index {idx} must be -1 or +1")
        merged[int(idx)] = int(sign)
    return replace(default, forced=tuple(sorted(merged.items())))


def all_plus_path(
    seq: FrequencySequence, master_seed: int, trial_index: int, cutoff: float
) -> SamplePath:
    """Path forced to +1 on every element <= cutoff, random beyond."""
    count = seq.counting_function(cutoff)
    start = seq.start_index
    forced = tuple((i, 1) for i in range(start, start + count))
    return SamplePath(seq, master_seed, trial_index, forced=forced)


def running_sup(
    path: SamplePath,
    sigma0: float,
    from_cutoff: float,
    to_cutoff: float,
    budget: int | None = None,
) -> float:
    """max over x in (from_cutoff, to_cutoff] of |sum of X_p * p**-sigma0|.

    Exact over the finite range (up to float rounding of the prefix sums).
    """
    if not from_cutoff < to_cutoff:
        raise ValidationError("from_cutoff must be < to_cutoff")
    elems = path.seq.elements_between(from_cutoff, to_cutoff, budget=budget)
    if elems.size == 0:
        return 0.0
    lo_count = path.seq.counting_function(from_cutoff)
    start = path.seq.start_index + lo_count
    signs = path.signs_for_indices(np.arange(start, start + elems.size, dtype=np.uint64))
    prefix = np.cumsum(signs * elems ** (-float(sigma0)))
    return float(np.max(np.abs(prefix)))


@dataclass
class PrefixSums:
    """Step-function data of a path up to a cutoff.

    ``sign_prefix[i]`` is the running sum of signs over elements
    ``elements[:i+1]``; ``weighted[s][i]`` the running weighted sum with
    weight p**-s.
    """

    cutoff: float
    elements: np.ndarray
    signs: np.ndarray
    sign_prefix: np.ndarray
    weighted: dict[float, np.ndarray]


def prefix_sums(
    path: SamplePath,
    cutoff: float,
    sigmas: tuple[float, ...] = (),
    budget: int | None = None,
) -> PrefixSums:
    elems = path.seq.elements_up_to(cutoff, budget=budget)
    signs = path.signs_up_to(cutoff, budget=budget)
    weighted = {
        float(s): np.cumsum(signs * elems ** (-float(s))) for s in sigmas
    }
    return PrefixSums(
        cutoff=float(cutoff),
        elements=elems,
        signs=signs,
        sign_prefix=np.cumsum(signs),
        weighted=weighted,
    )
