"""Frequency sequences and their deterministic summatory functions.

A frequency sequence is a strictly increasing sequence of reals >= 1 whose
power series sum(p**-sigma) diverges for sigma < 1 and converges for
sigma > 1.  Three built-in families are served (naturals, primes, and
log-weighted naturals whose reciprocal sum converges), plus arbitrary
explicit finite sequences loaded from text files.

All operations are pure and deterministic; sequence objects are immutable
and safe to share across threads and worker processes.
"""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import sieve
from .errors import DivergenceError, ResourceBudgetError, ValidationError
from .summation import compensated_sum

DEFAULT_TERM_BUDGET = 60_000_000
DEFAULT_TAIL_HEAD_TERMS = 10_000


def _check_budget(count: int, budget: int | None) -> None:
    limit = DEFAULT_TERM_BUDGET if budget is None else budget
    if count > limit:
        raise ResourceBudgetError(
            f"operation needs {count} terms, exceeding the budget of {limit}"
        )


class _SequenceOps:
    """Shared summatory operations; concrete kinds fill in the primitives."""

    # ---- primitives implemented by each kind -------------------------

    def element(self, index: int) -> float:
        raise NotImplementedError

    def counting_function(self, x: float) -> int:
        raise NotImplementedError

    def elements_up_to(self, cutoff: float, budget: int | None = None) -> np.ndarray:
        raise NotImplementedError

    def next_elements(self, cutoff: float, count: int) -> np.ndarray:
        """The next ``count`` served elements strictly above ``cutoff``.

        May return fewer for finite sequences.
        """
        raise NotImplementedError

    def tail_converges(self, sigma: float) -> bool:
        raise NotImplementedError

    @property
    def reciprocal_sum_converges(self) -> bool:
        raise NotImplementedError

    # ---- derived operations ------------------------------------------

    def elements_between(
        self, lo: float, hi: float, budget: int | None = None
    ) -> np.ndarray:
        arr = self.elements_up_to(hi, budget=budget)
        return arr[arr > lo]

    def power_sum(self, sigma: float, cutoff: float, budget: int | None = None) -> float:
        """sum(p**-sigma for served p <= cutoff), compensated."""
        if cutoff < 1:
            raise ValidationError("cutoff must be >= 1")
        elems = self.elements_up_to(cutoff, budget=budget)
        if elems.size == 0:
            return 0.0
        return compensated_sum(elems ** (-float(sigma)))

    def tail_power_sum(
        self,
        sigma: float,
        cutoff: float,
        head_terms: int = DEFAULT_TAIL_HEAD_TERMS,
    ) -> tuple[float, float]:
        """Two-sided enclosure of sum(p**-sigma for served p > cutoff).

        The leading ``head_terms`` tail elements are summed exactly; the
        rest is bracketed by monotone integral comparison.  Raises
        DivergenceError below the convergence threshold.
        """
        sigma = float(sigma)
        head_terms = max(int(head_terms), 16)
        head = self.next_elements(cutoff, head_terms)
        if head.size < head_terms:
            # Finite sequence exhausted: the tail is an exact finite sum.
            if head.size == 0:
                return (0.0, 0.0)
            exact = compensated_sum(head ** (-sigma))
            return (exact, exact)
        if not self.tail_converges(sigma):
            raise DivergenceError(
                f"tail diverges at exponent {sigma} for {type(self).__name__}"
            )
        head_sum = compensated_sum(head ** (-sigma))
        rem_lo, rem_hi = self._remainder_enclosure(sigma, head)
        return (head_sum + rem_lo, head_sum + rem_hi)

    def _remainder_enclosure(
        self, sigma: float, head: np.ndarray
    ) -> tuple[float, float]:
        raise NotImplementedError


@dataclass(frozen=True)
class Naturals(_SequenceOps):
    """The natural numbers 1, 2, 3, ... served from ``start_index``."""

    start_index: int = 1

    def __post_init__(self):
        if self.start_index < 1:
            raise ValidationError("start_index must be >= 1")

    def element(self, index: int) -> float:
        if index < self.start_index:
            raise ValidationError(f"index {index} precedes start_index")
        return float(index)

    def counting_function(self, x: float) -> int:
        if x < self.start_index:
            return 0
        return int(math.floor(x)) - self.start_index + 1

    def elements_up_to(self, cutoff: float, budget: int | None = None) -> np.ndarray:
        n = self.counting_function(cutoff)
        _check_budget(n, budget)
        return np.arange(self.start_index, self.start_index + n, dtype=np.float64)

    def next_elements(self, cutoff: float, count: int) -> np.ndarray:
        first = max(int(math.floor(cutoff)) + 1, self.start_index)
        return np.arange(first, first + count, dtype=np.float64)

    def tail_converges(self, sigma: float) -> bool:
        return sigma > 1.0

    @property
    def reciprocal_sum_converges(self) -> bool:
        return False

    def _remainder_enclosure(self, sigma, head):
        n2 = head[-1]  # last exactly-summed integer
        lo = (n2 + 1.0) ** (1.0 - sigma) / (sigma - 1.0)
        hi = n2 ** (1.0 - sigma) / (sigma - 1.0)
        return lo, hi


@dataclass(frozen=True)
class Primes(_SequenceOps):
    """The rational primes 2, 3, 5, ... served by a cached segmented sieve."""

    start_index: int = 1

    def __post_init__(self):
        if self.start_index < 1:
            raise ValidationError("start_index must be >= 1")

    def element(self, index: int) -> float:
        if index < self.start_index:
            raise ValidationError(f"index {index} precedes start_index")
        return float(sieve.nth_prime(index))

    def counting_function(self, x: float) -> int:
        return max(0, sieve.prime_count(x) - self.start_index + 1)

    def elements_up_to(self, cutoff: float, budget: int | None = None) -> np.ndarray:
        total = sieve.prime_count(cutoff)
        n = max(0, total - self.start_index + 1)
        _check_budget(n, budget)
        primes = sieve.primes_up_to(int(math.floor(cutoff)))
        return primes[self.start_index - 1 :].astype(np.float64)

    def next_elements(self, cutoff: float, count: int) -> np.ndarray:
        global_idx = max(sieve.prime_count(cutoff), self.start_index - 1)
        return sieve.primes_slice(global_idx + 1, count).astype(np.float64)

    def tail_converges(self, sigma: float) -> bool:
        return sigma > 1.0

    @property
    def reciprocal_sum_converges(self) -> bool:
        return False

    def _remainder_enclosure(self, sigma, head):
        # Chebyshev-type bounds: x/log x < pi(x) < 1.26 x/log x, the lower
        # valid for x >= 17.  The remainder past the last head prime K is
        # s*Integral_K^inf (pi(x)-pi(K)) x^(-s-1) dx, bounded both ways.
        k = float(head[-1])
        if k < 17:
            raise ValidationError("prime tail remainder requires head past 17")
        logk = math.log(k)
        pi_k = float(sieve.prime_count(k))
        s = sigma
        hi = s * 1.26 / ((s - 1.0) * logk) * k ** (1.0 - s) - pi_k * k ** (-s)
        lo = (
            s / (2.0 * logk * (s - 1.0)) * (k ** (1.0 - s) - k ** (2.0 * (1.0 - s)))
            - pi_k * (k ** (-s) - k ** (-2.0 * s))
        )
        return max(lo, 0.0), max(hi, 0.0)


@dataclass(frozen=True)
class WeightedNaturals(_SequenceOps):
    """Elements n * log(n+1)**exponent with exponent > 1.

    The reciprocal sum converges while the power-sum abscissa stays at 1.
    Served from start_index 2 by default so every element is >= 1
    (the n=1 element log(2)**exponent would fall below 1).
    """

    exponent: float = 2.0
    start_index: int = 2

    def __post_init__(self):
        if not self.exponent > 1.0:
            raise ValidationError("weighted-naturals exponent must be > 1")
        if self.start_index < 1:
            raise ValidationError("start_index must be >= 1")
        if self._value(self.start_index) < 1.0:
            raise ValidationError(
                "first served element falls below 1; raise start_index"
            )

    def _value(self, n: int) -> float:
        return n * math.log(n + 1) ** self.exponent

    def _log_value(self, n: int) -> float:
        return math.log(n) + self.exponent * math.log(math.log(n + 1))

    def element(self, index: int) -> float:
        if index < self.start_index:
            raise ValidationError(f"index {index} precedes start_index")
        return self._value(index)

    def _last_underlying_leq(self, x) -> int:
        """Largest n with n*log(n+1)**a <= x; 0 if none.  Handles huge x."""
        if x < self._value(1):
            return 0
        # ulp-scale slack so an element exactly equal to x still counts;
        # consecutive elements are far wider apart than this at any n the
        # comparison can reach
        logx = math.log(x)
        tol = 32.0 * sys.float_info.epsilon * max(1.0, abs(logx))
        logx += tol
        lo, hi = 1, 2
        while self._log_value(hi) <= logx:
            hi *= 2
        # invariant: value(lo) <= x < value(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self._log_value(mid) <= logx:
                lo = mid
            else:
                hi = mid
        return lo

    def counting_function(self, x: float) -> int:
        if x < 1:
            return 0
        return max(0, self._last_underlying_leq(x) - self.start_index + 1)

    def elements_up_to(self, cutoff: float, budget: int | None = None) -> np.ndarray:
        n = self.counting_function(cutoff)
        _check_budget(n, budget)
        idx = np.arange(self.start_index, self.start_index + n, dtype=np.float64)
        return idx * np.log(idx + 1.0) ** self.exponent

    def next_elements(self, cutoff: float, count: int) -> np.ndarray:
        first = max(self._last_underlying_leq(cutoff) + 1, self.start_index)
        idx = np.arange(first, first + count, dtype=np.float64)
        return idx * np.log(idx + 1.0) ** self.exponent

    def tail_converges(self, sigma: float) -> bool:
        return sigma >= 1.0

    @property
    def reciprocal_sum_converges(self) -> bool:
        return True

    def _remainder_enclosure(self, sigma, head):
        a = self.exponent
        m = int(round(head[-1] / math.log(head[-1] + 1.0) ** a))
        # Upper: terms <= 1/(n log(n)**(a*s)) for s >= 1, then integral
        # comparison; for s > 1 a second bound keeps the algebraic decay.
        asig = a * sigma
        logm = math.log(m)
        hi = logm ** (1.0 - asig) / (asig - 1.0)
        if sigma > 1.0:
            alt = math.log(m + 1) ** (-asig) * m ** (1.0 - sigma) / (sigma - 1.0)
            hi = min(hi, alt)
        # Lower: truncate the comparison integral at (m+2)**2 where the
        # log factor is controlled.
        u = m + 2.0
        log_u2 = 2.0 * math.log(u)
        if sigma > 1.0:
            lo = log_u2 ** (-asig) * (
                u ** (1.0 - sigma) - u ** (2.0 * (1.0 - sigma))
            ) / (sigma - 1.0)
        else:
            lo = log_u2 ** (-asig) * math.log(u)
        return max(lo, 0.0), hi

    def tail_reciprocal_upper_for_count(self, served_count: int) -> float:
        """Upper bound on sum(1/p) past the first ``served_count`` elements.

        Accepts arbitrarily large integer counts (the bound is analytic),
        which lets failure-probability ladders be evaluated far beyond any
        enumerable cutoff.
        """
        if served_count < 1:
            raise ValidationError("served_count must be >= 1")
        m = self.start_index + served_count - 1
        if m < 3:
            raise ValidationError("count too small for the analytic bound")
        return math.log(m) ** (1.0 - self.exponent) / (self.exponent - 1.0)


@dataclass(frozen=True)
class Explicit(_SequenceOps):
    """A finite, strictly increasing sequence supplied by the caller.

    Condition P1 (elements >= 1) is enforced; whether the power sums have
    the right abscissa of convergence is the caller's responsibility and a
    warning is emitted on construction.
    """

    values: tuple[float, ...]
    start_index: int = 1
    _quiet: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.values:
            raise ValidationError("explicit sequence must be nonempty")
        prev = None
        for i, v in enumerate(self.values):
            if not math.isfinite(v) or v < 1.0:
                raise ValidationError(f"element {i + 1} is {v}; must be >= 1")
            if prev is not None and v <= prev:
                raise ValidationError(f"element {i + 1} breaks strict increase")
            prev = v
        if self.start_index < 1 or self.start_index > len(self.values):
            raise ValidationError("start_index out of range")
        if not self._quiet:
            warnings.warn(
                "explicit sequences are accepted as-is; the abscissa-of-"
                "convergence condition is the caller's responsibility",
                stacklevel=3,
            )

    @classmethod
    def from_file(cls, path) -> "Explicit":
        """Load one positive real per line; '#' starts a comment."""
        values = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    v = float(line)
                except ValueError:
                    raise ValidationError(
                        f"{path}:{lineno}: not a real number: {line!r}"
                    ) from None
                if not math.isfinite(v) or v < 1.0:
                    raise ValidationError(f"{path}:{lineno}: element {v} is below 1")
                if values and v <= values[-1]:
                    raise ValidationError(
                        f"{path}:{lineno}: sequence not strictly increasing"
                    )
                values.append(v)
        if not values:
            raise ValidationError(f"{path}: no elements found")
        return cls(tuple(values))

    def element(self, index: int) -> float:
        if index < self.start_index:
            raise ValidationError(f"index {index} precedes start_index")
        if index > len(self.values):
            raise ValidationError(
                f"explicit sequence exhausted: index {index} > {len(self.values)}"
            )
        return float(self.values[index - 1])

    def counting_function(self, x: float) -> int:
        arr = self._array()
        total = int(np.searchsorted(arr, x, side="right"))
        return max(0, total - self.start_index + 1)

    def _array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def elements_up_to(self, cutoff: float, budget: int | None = None) -> np.ndarray:
        arr = self._array()[self.start_index - 1 :]
        return arr[arr <= cutoff]

    def next_elements(self, cutoff: float, count: int) -> np.ndarray:
        arr = self._array()[self.start_index - 1 :]
        arr = arr[arr > cutoff]
        return arr[:count]

    def tail_converges(self, sigma: float) -> bool:
        return True  # finite

    @property
    def reciprocal_sum_converges(self) -> bool:
        return True  # finite

    def _remainder_enclosure(self, sigma, head):
        return 0.0, 0.0


class SummatoryCache:
    """Memoized counting function and power sums at a fixed cutoff."""

    def __init__(self, seq: _SequenceOps, cutoff: float):
        self.seq = seq
        self.cutoff = float(cutoff)
        self.count = seq.counting_function(cutoff)
        self._sums: dict[float, float] = {}

    def power_sum(self, sigma: float) -> float:
        key = float(sigma)
        if key not in self._sums:
            self._sums[key] = self.seq.power_sum(key, self.cutoff)
        return self._sums[key]


# ---------------------------------------------------------------------------
# Factory used by configs/CLI so sequences round-trip through plain strings.

FrequencySequence = _SequenceOps  # public alias for annotations


def make_sequence(spec: str) -> _SequenceOps:
    """Build a sequence from a spec string.

    Formats: ``naturals``, ``primes``, ``weighted:<exponent>``,
    ``explicit:v1,v2,...``, ``explicit@/path/to/file``.
    """
    spec = spec.strip()
    if spec == "naturals":
        return Naturals()
    if spec == "primes":
        return Primes()
    if spec.startswith("weighted:"):
        try:
            a = float(spec.split(":", 1)[1])
        except ValueError:
            raise ValidationError(f"bad weighted exponent in {spec!r}") from None
        return WeightedNaturals(exponent=a)
    if spec == "weighted":
        return WeightedNaturals()
    if spec.startswith("explicit:"):
        body = spec.split(":", 1)[1]
        try:
            values = tuple(float(x) for x in body.split(",") if x.strip())
        except ValueError:
            raise ValidationError(f"bad explicit values in {spec!r}") from None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return Explicit(values)
    if spec.startswith("explicit@"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return Explicit.from_file(spec.split("@", 1)[1])
    raise ValidationError(f"unknown sequence spec {spec!r}")


def sequence_spec(seq: _SequenceOps) -> str:
    """Canonical spec string for a sequence (inverse of make_sequence)."""
    if isinstance(seq, Naturals):
        return "naturals"
    if isinstance(seq, Primes):
        return "primes"
    if isinstance(seq, WeightedNaturals):
        return f"weighted:{seq.exponent!r}"
    if isinstance(seq, Explicit):
        return "explicit:" + ",".join(repr(v) for v in seq.values)
    raise ValidationError(f"unknown sequence type {type(seq).__name__}")
