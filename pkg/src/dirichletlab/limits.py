"""Distributional diagnostics near the critical exponent.

Normalized by its truncated standard deviation, the series value is a
weighted sum of independent signs; as the exponent drops toward 1/2 the
weights flatten and the law approaches a standard normal.  This module
provides the exact characteristic function of the (truncated) value, a
Monte Carlo sampler of the normalized value, a Kolmogorov-Smirnov
distance against the standard normal, and the variance profile at the
near-critical truncation scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, ResourceBudgetError, ValidationError
from .frequencies import (
    DEFAULT_TAIL_HEAD_TERMS,
    DEFAULT_TERM_BUDGET,
    FrequencySequence,
)
from .paths import SamplePath
from .summation import compensated_sum


def normal_cdf(x: float) -> float:
    """Standard normal CDF via erf (double-precision accurate)."""
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def char_function(
    seq: FrequencySequence,
    sigma: float,
    t: float,
    cutoff: float,
    normalization: float | None = None,
    budget: int | None = None,
) -> float:
    """Characteristic function of the normalized truncated value at t.

    Equals the product over served p <= cutoff of cos(t * p**-sigma / V),
    where V defaults to the truncated standard deviation.  Evaluated in
    log space with explicit sign tracking so products of thousands of
    factors neither underflow nor lose the sign.
    """
    elems = seq.elements_up_to(cutoff, budget=budget)
    if elems.size == 0:
        raise ValidationError("no elements at or below cutoff")
    w = elems ** (-float(sigma))
    if normalization is None:
        normalization = math.sqrt(compensated_sum(w * w))
    if normalization <= 0:
        raise ValidationError("normalization must be positive")
    c = np.cos(float(t) * w / normalization)
    if np.any(c == 0.0):
        return 0.0
    sign = 1.0 if int(np.count_nonzero(c < 0)) % 2 == 0 else -1.0
    return sign * math.exp(math.fsum(np.log(np.abs(c)).tolist()))


def char_function_gaussian_gap(
    seq: FrequencySequence,
    sigma: float,
    cutoff: float,
    t_grid: np.ndarray,
    budget: int | None = None,
) -> float:
    """sup over the grid of |char_function(t) - exp(-t**2/2)|."""
    gaps = [
        abs(char_function(seq, sigma, float(t), cutoff, budget=budget)
            - math.exp(-0.5 * float(t) ** 2))
        for t in np.asarray(t_grid, dtype=float)
    ]
    return max(gaps)


def clt_sample(
    seq: FrequencySequence,
    sigma: float,
    cutoff: float,
    master_seed: int,
    trials: int,
    budget: int | None = None,
    head_terms: int = DEFAULT_TAIL_HEAD_TERMS,
) -> np.ndarray:
    """Monte Carlo draws of the truncated value over its truncated sd.

    Warns when the truncated variance captures less than 90% of the full
    variance enclosure, i.e. when the cutoff is too small for the chosen
    exponent to make the normalized truncation honest.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    elems = seq.elements_up_to(cutoff, budget=budget)
    if elems.size == 0:
        raise ValidationError("no elements at or below cutoff")
    w = elems ** (-float(sigma))
    var = compensated_sum(w * w)
    if var <= 0.0:
        raise ValidationError("zero truncated variance")
    if seq.tail_converges(2.0 * sigma):
        _, tail_hi = seq.tail_power_sum(2.0 * sigma, cutoff, head_terms=head_terms)
        if var < 0.9 * (var + tail_hi):
            warnings.warn(
                f"truncated variance captures only "
                f"{var / (var + tail_hi):.1%} of the variance enclosure",
                stacklevel=2,
            )
    sd = math.sqrt(var)
    out = np.empty(trials, dtype=np.float64)
    for i in range(trials):
        path = SamplePath(seq, master_seed, i)
        signs = path.signs_up_to(cutoff, budget=budget)
        out[i] = compensated_sum(signs * w) / sd
    return out


def ks_statistic(samples: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance of the sample to the standard normal."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValidationError("empty sample")
    cdf = 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))


@dataclass(frozen=True)
class VarianceProfile:
    """Variance split at the near-critical truncation scale.

    ``head_variance`` is the summed squared gap between the sigma-weight
    and the critical weight over elements up to the scale;
    ``tail_variance`` is a rigorous enclosure of the variance carried by
    elements beyond the scale at the doubled exponent.  For sequences with
    convergent reciprocal sum both stay bounded as sigma drops to 1/2; for
    divergent ones the head blows up.
    """

    sigma: float
    scale: float
    head_count: int
    head_variance: float
    tail_variance_lo: float
    tail_variance_hi: float
    truncated_second_moment: float
    second_moment_cutoff: float


def variance_profile(
    seq: FrequencySequence,
    sigma: float,
    second_moment_cutoff: float = 1_000_000.0,
    budget: int | None = None,
    head_terms: int = DEFAULT_TAIL_HEAD_TERMS,
) -> VarianceProfile:
    """Head/tail variance decomposition at scale exp(1/(2*sigma - 1)).

    Valid for 1/2 < sigma <= 1.  Raises ResourceBudgetError, naming the
    minimal feasible exponent, when the scale requires more served
    elements than the budget allows.
    """
    if not 0.5 < sigma <= 1.0:
        raise ValidationError("variance profile needs 1/2 < sigma <= 1")
    scale = math.exp(1.0 / (2.0 * sigma - 1.0))
    limit = DEFAULT_TERM_BUDGET if budget is None else budget
    count = seq.counting_function(scale) if scale < 1e18 else limit + 1
    if count > limit:
        # invert the scale rule at the budget to name the smallest workable sigma
        sigma_min = 0.5 + 0.5 / math.log(float(limit))
        raise ResourceBudgetError(
            f"scale {scale:.3g} needs {count if count <= limit else 'too many'} "
            f"elements > budget {limit}; minimal feasible sigma is about "
            f"{sigma_min:.6f}"
        )
    elems = seq.elements_up_to(scale, budget=budget)
    gaps = elems ** (-float(sigma)) - elems ** (-0.5)
    head = compensated_sum(gaps * gaps)
    if not seq.tail_converges(2.0 * sigma):
        raise DivergenceError("tail variance diverges at the doubled exponent")
    t_lo, t_hi = seq.tail_power_sum(2.0 * sigma, scale, head_terms=head_terms)
    w = seq.elements_up_to(second_moment_cutoff, budget=budget) ** (-float(sigma))
    second = compensated_sum(w * w)
    return VarianceProfile(
        sigma=float(sigma),
        scale=scale,
        head_count=int(elems.size),
        head_variance=head,
        tail_variance_lo=t_lo,
        tail_variance_hi=t_hi,
        truncated_second_moment=second,
        second_moment_cutoff=float(second_moment_cutoff),
    )


def samples_to_csv(samples: np.ndarray) -> str:
    """One normalized draw per line with a header, for external plotting."""
    lines = ["sample"]
    lines.extend(repr(float(x)) for x in samples)
    return "\n".join(lines) + "\n"
