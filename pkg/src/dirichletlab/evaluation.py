"""Evaluation of the random series at real exponents with error control.

Four certificate grades are produced:

* exact        -- the sequence is finite and fully summed; radius 0.
* deterministic -- a triangle-inequality tail bound (domination).
* probabilistic -- a maximal-inequality tail certificate: with failure
  probability at most eta over the path's randomness, simultaneously for
  every exponent above the certificate's base exponent, the truncation
  error is below threshold * cutoff**-(sigma - sigma0).
* heuristic    -- no bound; only produced in the near-critical regime
  where rigorous radii are vacuous, and clearly flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceBudgetError, ValidationError
from .frequencies import FrequencySequence, sequence_spec
from .paths import SamplePath
from .summation import compensated_sum

EXACT = "exact"
DETERMINISTIC = "deterministic"
PROBABILISTIC = "probabilistic"
HEURISTIC = "heuristic"

# ---------------------------------------------------------------------------
# Weight cache: p**-sigma arrays are path-independent and reused heavily
# across Monte Carlo trials.  Bounded by total float count, per process.

_WEIGHT_CACHE: dict[tuple[str, float], np.ndarray] = {}
_WEIGHT_CACHE_LIMIT = 120_000_000


def _weights(seq: FrequencySequence, sigma: float, cutoff: float,
             budget: int | None = None) -> np.ndarray:
    count = seq.counting_function(cutoff)
    key = (sequence_spec(seq), float(sigma))
    cached = _WEIGHT_CACHE.get(key)
    if cached is not None and cached.size >= count:
        return cached[:count]
    elems = seq.elements_up_to(cutoff, budget=budget)
    w = elems ** (-float(sigma))
    total = sum(a.size for a in _WEIGHT_CACHE.values()) + w.size
    while total > _WEIGHT_CACHE_LIMIT and _WEIGHT_CACHE:
        _, dropped = _WEIGHT_CACHE.popitem()
        total -= dropped.size
    if w.size <= _WEIGHT_CACHE_LIMIT:
        _WEIGHT_CACHE[key] = w
    return w


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailCertificate:
    """Simultaneous bound on tail excursions above a base exponent.

    Claims: P( sup over x > cutoff of |sum over cutoff < p <= x of
    X_p * p**-sigma0| >= threshold ) <= eta.  The threshold is
    sqrt(18 * T * ln(6/eta)) with T the upper end of the tail enclosure at
    the doubled exponent; the constants 3 (maximal inequality) and 2
    (two-sided subgaussian bound) combine into the leading 6.
    """

    seq: FrequencySequence
    sigma0: float
    cutoff: float
    threshold: float
    eta: float
    tail_second_moment: float
    exhausted: bool = False


def excursion_probability_bound(tail_second_moment: float, threshold: float) -> float:
    """6 * exp(-threshold**2 / (18 * T)): failure bound at a fixed threshold."""
    if threshold <= 0:
        raise ValidationError("threshold must be positive")
    if tail_second_moment == 0.0:
        return 0.0
    return 6.0 * math.exp(-(threshold ** 2) / (18.0 * tail_second_moment))


def tail_certificate(
    seq: FrequencySequence,
    sigma0: float,
    cutoff: float,
    eta: float,
    head_terms: int = 10_000,
) -> TailCertificate:
    """Certificate at base exponent sigma0 with failure probability eta.

    Requires the doubled exponent 2*sigma0 to lie above the sequence's
    tail-convergence threshold; at sigma0 = 1/2 this is exactly what fails
    for sequences with divergent reciprocal sum.
    """
    if not 0.0 < eta < 1.0:
        raise ValidationError("eta must lie in (0,1)")
    _, t_upper = seq.tail_power_sum(2.0 * sigma0, cutoff, head_terms=head_terms)
    t_upper = float(t_upper)
    exhausted = t_upper == 0.0
    threshold = math.sqrt(18.0 * t_upper * math.log(6.0 / eta))
    return TailCertificate(
        seq=seq,
        sigma0=float(sigma0),
        cutoff=float(cutoff),
        threshold=threshold,
        eta=0.0 if exhausted else float(eta),
        tail_second_moment=t_upper,
        exhausted=exhausted,
    )


@dataclass(frozen=True)
class CertifiedValue:
    """A partial sum together with an error radius and its provenance."""

    sigma: float
    partial_sum: float
    cutoff: float
    error_radius: float
    kind: str
    eta: float = 0.0
    sigma0: float | None = None

    @property
    def decided_sign(self) -> int | None:
        """+1/-1 when the partial sum beats the radius, else None."""
        if self.partial_sum > self.error_radius:
            return 1
        if self.partial_sum < -self.error_radius:
            return -1
        return None


def partial_sum(
    path: SamplePath, sigma: float, cutoff: float, budget: int | None = None
) -> float:
    """sum(X_p * p**-sigma for served p <= cutoff), compensated and
    deterministic for fixed inputs regardless of worker count."""
    if cutoff < 1:
        raise ValidationError("cutoff must be >= 1")
    w = _weights(path.seq, sigma, cutoff, budget=budget)
    signs = path.signs_up_to(cutoff, budget=budget)
    return compensated_sum(signs * w)


def partial_sum_table(
    path: SamplePath,
    points: list[tuple[float, float]],
    budget: int | None = None,
) -> list[float]:
    """Partial sums for many (sigma, cutoff) pairs, sharing one sign pass."""
    if not points:
        return []
    max_cutoff = max(c for _, c in points)
    signs = path.signs_up_to(max_cutoff, budget=budget)
    out = []
    for sigma, cutoff in points:
        w = _weights(path.seq, sigma, cutoff, budget=budget)
        out.append(compensated_sum(signs[: w.size] * w))
    return out


def evaluate(path: SamplePath, sigma: float, cert: TailCertificate) -> CertifiedValue:
    """Certified evaluation at sigma >= the certificate's base exponent.

    The radius is threshold * cutoff**-(sigma - sigma0); the truncation
    identity behind it carries implied constant exactly 1.
    """
    if sigma < cert.sigma0:
        raise ValidationError(
            f"sigma={sigma} below certificate base exponent {cert.sigma0}"
        )
    value = partial_sum(path, sigma, cert.cutoff)
    if cert.exhausted:
        return CertifiedValue(sigma, value, cert.cutoff, 0.0, EXACT)
    radius = cert.threshold * cert.cutoff ** (-(sigma - cert.sigma0))
    return CertifiedValue(
        sigma, value, cert.cutoff, radius, PROBABILISTIC,
        eta=cert.eta, sigma0=cert.sigma0,
    )


def heuristic_cutoff(sigma: float) -> float:
    """Near-critical truncation rule exp(1/(2*sigma - 1))."""
    if sigma <= 0.5:
        raise ValidationError("heuristic cutoff rule needs sigma > 1/2")
    return math.exp(1.0 / (2.0 * sigma - 1.0))


def heuristic_evaluate(
    path: SamplePath,
    sigma: float,
    min_cutoff: float = 10_000.0,
    max_cutoff: float = 50_000_000.0,
) -> CertifiedValue:
    """Unbounded-error evaluation with cutoff at least the near-critical rule.

    Raises ResourceBudgetError, naming the minimal feasible sigma, when the
    rule demands more terms than max_cutoff allows.
    """
    rule = heuristic_cutoff(sigma)
    if rule > max_cutoff:
        sigma_min = 0.5 + 0.5 / math.log(max_cutoff)
        raise ResourceBudgetError(
            f"cutoff rule needs {rule:.3g} terms > budget {max_cutoff:.3g}; "
            f"minimal feasible sigma is {sigma_min:.6f}"
        )
    cutoff = min(max(rule, min_cutoff), max_cutoff)
    value = partial_sum(path, sigma, cutoff)
    return CertifiedValue(sigma, value, cutoff, math.inf, HEURISTIC)


def domination_certificate(
    path: SamplePath,
    sigma: float,
    max_block: int = 4096,
) -> int | None:
    """Deterministic sign certificate from a leading block beating the tail.

    Tests geometrically growing leading blocks; succeeds when the block's
    partial sum exceeds the rigorous upper tail bound (valid because every
    coefficient has modulus 1).  None means undecided, a legitimate result.
    """
    seq = path.seq
    if not seq.tail_converges(sigma):
        raise ValidationError(
            f"domination needs absolute summability; sigma={sigma} too small"
        )
    start = seq.start_index
    values = getattr(seq, "values", None)
    n_avail = None if values is None else len(values) - start + 1
    block = 1
    while block <= max_block:
        b = block if n_avail is None else min(block, n_avail)
        cutoff = seq.element(start + b - 1)
        s = partial_sum(path, sigma, cutoff)
        _, tail_hi = seq.tail_power_sum(sigma, cutoff)
        if abs(s) > tail_hi:
            return 1 if s > 0 else -1
        if n_avail is not None and b == n_avail:
            break
        block *= 2
    return None


def mellin_discrepancy(path: SamplePath, sigma: float, upper_limit: float) -> float:
    """|closed-form transform of the sign step function - direct sum|.

    The step function is piecewise constant, so the transform integral up
    to ``upper_limit`` has an exact closed form; up to rounding the two
    sides agree identically for any finite path.
    """
    if upper_limit < 1:
        raise ValidationError("upper_limit must be >= 1")
    s = float(sigma)
    elems = path.seq.elements_up_to(upper_limit)
    if elems.size == 0:
        return 0.0
    signs = path.signs_up_to(upper_limit)
    prefix = np.cumsum(signs)
    pows = elems ** (-s)
    nxt = np.empty_like(pows)
    nxt[:-1] = pows[1:]
    nxt[-1] = upper_limit ** (-s)
    left_terms = prefix * (pows - nxt)
    left = math.fsum(left_terms.tolist()) + float(prefix[-1]) * upper_limit ** (-s)
    right = math.fsum((signs * pows).tolist())
    return abs(left - right)
