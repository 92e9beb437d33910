"""Certified sign scanning, sign-change counting, and no-zero certification.

Zeros are counted as certified sign changes between adjacent decided grid
points: a lower bound on the true zero count.  Undecided points break
adjacency, so the count is conservative.  Probabilistic failure is
accounted by a union bound over the distinct tail certificates used; one
certificate covers every exponent above its base, so a whole scan
normally spends its budget exactly once.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .evaluation import (
    CertifiedValue,
    TailCertificate,
    evaluate,
    tail_certificate,
)
from .frequencies import Explicit, sequence_spec
from .paths import SamplePath

SCHEMA_VERSION = 1

_MAX_GRID_POINTS = 20_000


def certified_sign(path: SamplePath, sigma: float, cert: TailCertificate) -> int | None:
    """+1 / -1 when the partial sum beats the radius, None when undecided."""
    return evaluate(path, sigma, cert).decided_sign


@dataclass
class SignScanReport:
    """Outcome of a certified sign scan over a sigma interval."""

    seq: str
    master_seed: int
    trial_index: int
    sigma_lo: float
    sigma_hi: float
    sigma_grid: list[float]
    decided_signs: list[str]  # "+", "-", or "undecided" per grid point
    sign_changes: int
    undecided_measure: float
    no_zero_certified: bool
    eta_total: float
    certificate: dict
    refinement_rounds: int
    resolution: float
    domination_sigma: float | None = None
    schema_version: int = SCHEMA_VERSION
    kind: str = field(default="sign_scan")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "schema_version": self.schema_version,
            "seq": self.seq,
            "master_seed": self.master_seed,
            "trial_index": self.trial_index,
            "sigma_lo": self.sigma_lo,
            "sigma_hi": self.sigma_hi,
            "sigma_grid": self.sigma_grid,
            "decided_signs": self.decided_signs,
            "sign_changes": self.sign_changes,
            "undecided_measure": self.undecided_measure,
            "no_zero_certified": self.no_zero_certified,
            "eta_total": self.eta_total,
            "certificate": self.certificate,
            "refinement_rounds": self.refinement_rounds,
            "resolution": self.resolution,
            "domination_sigma": self.domination_sigma,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _initial_grid(sigma_lo: float, sigma_hi: float, points: int) -> list[float]:
    """Geometric in (sigma - 1/2) when possible: the action accumulates
    toward the critical exponent.  Falls back to uniform spacing when the
    interval starts at or below 1/2 (exact-certificate scans allow that)."""
    points = max(int(points), 2)
    if sigma_lo > 0.5:
        d_lo, d_hi = sigma_lo - 0.5, sigma_hi - 0.5
        ratio = (d_hi / d_lo) ** (1.0 / (points - 1))
        grid = [0.5 + d_lo * ratio ** i for i in range(points)]
    else:
        step = (sigma_hi - sigma_lo) / (points - 1)
        grid = [sigma_lo + step * i for i in range(points)]
    grid[0], grid[-1] = sigma_lo, sigma_hi
    return grid


def _sign_str(sign: int | None) -> str:
    if sign is None:
        return "undecided"
    return "+" if sign > 0 else "-"


def scan(
    path: SamplePath,
    sigma_lo: float,
    sigma_hi: float,
    initial_grid: int = 16,
    max_refinement: int = 6,
    eta_budget: float = 0.05,
    *,
    cutoff: float = 10_000.0,
    sigma0: float | None = None,
    resolution: float = 1e-3,
    head_terms: int = 10_000,
) -> SignScanReport:
    """Certified signs on an adaptive grid plus a conservative change count.

    One tail certificate at (sigma0, cutoff) covers every grid point, so
    the whole scan spends eta_budget once.  Undecided or sign-change
    intervals are bisected down to ``resolution`` for up to
    ``max_refinement`` rounds.
    """
    if not sigma_lo < sigma_hi:
        raise ValidationError("need sigma_lo < sigma_hi")
    if not 0.0 < eta_budget < 1.0:
        raise ValidationError("eta_budget must lie in (0,1)")
    seq = path.seq
    exact_possible = isinstance(seq, Explicit) and cutoff >= seq.values[-1]
    if sigma_lo <= 0.5 and not exact_possible:
        raise ValidationError(
            "scanning at or below 1/2 needs a finite sequence summed exactly"
        )
    if sigma0 is None:
        sigma0 = (sigma_lo + 0.5) / 2.0 if sigma_lo > 0.5 else sigma_lo
    cert = tail_certificate(seq, sigma0, cutoff, eta_budget, head_terms=head_terms)

    grid = _initial_grid(sigma_lo, sigma_hi, initial_grid)
    signs: dict[float, int | None] = {
        s: certified_sign(path, s, cert) for s in grid
    }
    rounds = 0
    for rounds in range(1, max_refinement + 1):
        pts = sorted(signs)
        new_points = []
        for a, b in zip(pts, pts[1:]):
            if b - a <= resolution:
                continue
            sa, sb = signs[a], signs[b]
            if sa is None or sb is None or sa != sb:
                new_points.append(0.5 * (a + b))
        if not new_points or len(signs) + len(new_points) > _MAX_GRID_POINTS:
            rounds -= 1
            break
        for s in new_points:
            signs[s] = certified_sign(path, s, cert)

    pts = sorted(signs)
    decided = [signs[s] for s in pts]
    changes = sum(
        1
        for x, y in zip(decided, decided[1:])
        if x is not None and y is not None and x != y
    )
    undecided_measure = math.fsum(
        b - a
        for (a, b, x, y) in zip(pts, pts[1:], decided, decided[1:])
        if x is None or y is None
    )
    return SignScanReport(
        seq=sequence_spec(seq),
        master_seed=path.master_seed,
        trial_index=path.trial_index,
        sigma_lo=float(sigma_lo),
        sigma_hi=float(sigma_hi),
        sigma_grid=[float(s) for s in pts],
        decided_signs=[_sign_str(s) for s in decided],
        sign_changes=changes,
        undecided_measure=float(undecided_measure),
        no_zero_certified=False,
        eta_total=cert.eta,
        certificate={
            "sigma0": cert.sigma0,
            "cutoff": cert.cutoff,
            "threshold": cert.threshold,
            "eta": cert.eta,
            "exhausted": cert.exhausted,
        },
        refinement_rounds=rounds,
        resolution=float(resolution),
    )


def _single_term_domination_sigma(seq, sigma_start: float, sigma_max: float = 64.0):
    """Smallest ladder exponent where the first element alone beats the
    rigorous upper tail bound.  Termwise monotonicity then makes the
    domination persist for every larger exponent."""
    p1 = seq.element(seq.start_index)
    sigma = sigma_start
    while sigma <= sigma_max:
        _, tail_hi = seq.tail_power_sum(sigma, p1)
        if tail_hi < p1 ** (-sigma):
            return sigma
        sigma *= 1.5
    return None


def certify_no_zeros(
    path: SamplePath,
    sigma_lo: float,
    *,
    sigma_switch: float = 2.0,
    initial_grid: int = 16,
    max_refinement: int = 6,
    eta_budget: float = 1e-3,
    cutoff: float = 10_000.0,
    sigma0: float | None = None,
    resolution: float = 1e-3,
    head_terms: int = 10_000,
) -> SignScanReport:
    """Attempt to certify that the series has no zero on [sigma_lo, inf).

    Strategy: find an exponent where the leading element dominates the
    whole tail (this closes the unbounded region, because the domination
    ratio is termwise decreasing in the exponent), certify one common sign
    on [sigma_lo, that exponent] by scanning, and require the common sign
    to match the leading element's sign.  Failure to certify is a
    legitimate outcome and raises nothing.
    """
    seq = path.seq
    dom_sigma = _single_term_domination_sigma(seq, max(sigma_switch, sigma_lo + 1e-9))
    hi = dom_sigma if dom_sigma is not None else max(sigma_switch, sigma_lo + 1.0)
    report = scan(
        path,
        sigma_lo,
        hi,
        initial_grid=initial_grid,
        max_refinement=max_refinement,
        eta_budget=eta_budget,
        cutoff=cutoff,
        sigma0=sigma0,
        resolution=resolution,
        head_terms=head_terms,
    )
    report.domination_sigma = dom_sigma
    if dom_sigma is None:
        return report
    decided = set(report.decided_signs)
    clean = "undecided" not in decided and len(decided) == 1
    if not clean:
        return report
    common = 1 if report.decided_signs[0] == "+" else -1
    leading = path.sign_at(seq.start_index)
    report.no_zero_certified = common == leading and report.sign_changes == 0
    return report
