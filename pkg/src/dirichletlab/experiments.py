"""Reproducible Monte Carlo experiments over random sign series.

Four studies are provided:

* no_zero      -- per-trial no-zero certification on a half-line, with an
  additional all-plus conditioned variant whose exact conditioning
  probability 2**-pi(U) turns the conditional certified fraction into a
  constructive lower bound on the unconditional no-zero probability.
* sign_change  -- certified sign-change counts on nested intervals
  [sigma_k, sigma_hi] for a descending ladder of left endpoints,
  supplemented by heuristic signs below the certifiable range.
* bu_event     -- empirical frequency of critical-exponent tail
  excursions beyond a cutoff versus the closed-form bound
  6*exp(-threshold**2/(18*T_U)), plus the bound on a ladder of cutoffs.
* exceedance   -- frequency with which the normalized critical partial
  sum exceeds a level at at least one of several scales.  Finite-scale
  frequencies only: no almost-sure statement is claimed or checkable.

Every per-trial outcome is a pure function of (config, trial_index), so
reports are byte-identical for any worker count.  Wall time is recorded
on the report object but excluded from the payload and its hash.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from functools import lru_cache

import numpy as np

from ._version import VERSION
from .bounds import wilson_interval
from .errors import ValidationError
from .evaluation import (
    excursion_probability_bound,
    partial_sum_table,
    tail_certificate,
    _weights,
)
from .frequencies import make_sequence
from .paths import SamplePath, all_plus_path
from .summation import compensated_sum
from .zeros import certify_no_zeros

SCHEMA_VERSION = 1


@lru_cache(maxsize=32)
def _seq(spec: str):
    return make_sequence(spec)


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config_dict: dict) -> str:
    return hashlib.sha256(_canonical_json(config_dict).encode()).hexdigest()


def _config_dict(cfg) -> dict:
    d = {"kind": cfg.kind}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        d[f.name] = list(v) if isinstance(v, tuple) else v
    return d


# ---------------------------------------------------------------------------
# Configs


@dataclass(frozen=True)
class NoZeroConfig:
    seq: str = "weighted:2.0"
    sigma_lo: float = 0.6
    cutoff: float = 100_000.0
    eta: float = 1e-3
    trials: int = 500
    master_seed: int = 1
    sigma0: float | None = None
    initial_grid: int = 16
    max_refinement: int = 6
    resolution: float = 2e-3
    sigma_switch: float = 2.0
    head_terms: int = 20_000
    include_forced: bool = True
    kind: str = field(default="no_zero", init=False)


@dataclass(frozen=True)
class SignChangeConfig:
    seq: str = "naturals"
    ladder: tuple[float, ...] = (0.70, 0.62, 0.56, 0.53)
    sigma_hi: float = 2.0
    trials: int = 200
    master_seed: int = 1
    grid_points: int = 28
    cert_cutoff: float = 100_000.0
    eta: float = 0.01
    heuristic_min_cutoff: float = 10_000.0
    heuristic_max_cutoff: float = 20_000_000.0
    head_terms: int = 20_000
    kind: str = field(default="sign_change", init=False)


@dataclass(frozen=True)
class BuEventConfig:
    seq: str = "weighted:2.0"
    cutoff_ladder: tuple[float, ...] = (100.0, 1_000.0, 10_000.0, 30_000.0)
    horizon_factor: float = 1_000.0
    threshold: float = 0.1
    trials: int = 2000
    master_seed: int = 1
    bound_count_ladder: tuple[int, ...] = ()
    head_terms: int = 20_000
    kind: str = field(default="bu_event", init=False)


@dataclass(frozen=True)
class ExceedanceConfig:
    seq: str = "naturals"
    scales: tuple[float, ...] = (100.0, 1_000.0, 10_000.0)
    level: float = 1.0
    trials: int = 1000
    master_seed: int = 1
    kind: str = field(default="exceedance", init=False)


# ---------------------------------------------------------------------------
# Report


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    config_hash: str
    master_seed: int
    per_trial: list[dict]
    aggregates: dict
    wall_time_s: float
    code_version: str = VERSION
    schema_version: int = SCHEMA_VERSION

    def payload_dict(self) -> dict:
        """Everything except wall time: the reproducible part."""
        return {
            "kind": self.kind,
            "schema_version": self.schema_version,
            "code_version": self.code_version,
            "config": self.config,
            "config_hash": self.config_hash,
            "master_seed": self.master_seed,
            "per_trial": self.per_trial,
            "aggregates": self.aggregates,
        }

    def payload_json(self) -> str:
        return _canonical_json(self.payload_dict())

    def report_hash(self) -> str:
        return hashlib.sha256(self.payload_json().encode()).hexdigest()

    def per_trial_csv(self) -> str:
        cols: list[str] = []
        for row in self.per_trial:
            for k in row:
                if k not in cols:
                    cols.append(k)
        lines = [",".join(cols)]
        for row in self.per_trial:
            cells = []
            for k in cols:
                v = row.get(k, "")
                if isinstance(v, (list, tuple)):
                    cells.append('"' + _canonical_json(list(v)) + '"')
                elif isinstance(v, float):
                    cells.append(repr(v))
                else:
                    cells.append(str(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _fraction_entry(successes: int, trials: int, confidence: float = 0.95) -> dict:
    lo, hi = wilson_interval(successes, trials, confidence)
    return {
        "count": successes,
        "trials": trials,
        "fraction": successes / trials,
        "wilson_confidence": confidence,
        "wilson_lo": lo,
        "wilson_hi": hi,
    }


# ---------------------------------------------------------------------------
# no_zero


def _no_zero_trial(cfg: NoZeroConfig, i: int) -> dict:
    seq = _seq(cfg.seq)
    kwargs = dict(
        sigma_switch=cfg.sigma_switch,
        initial_grid=cfg.initial_grid,
        max_refinement=cfg.max_refinement,
        eta_budget=cfg.eta,
        cutoff=cfg.cutoff,
        sigma0=cfg.sigma0,
        resolution=cfg.resolution,
        head_terms=cfg.head_terms,
    )
    rep = certify_no_zeros(SamplePath(seq, cfg.master_seed, i), cfg.sigma_lo, **kwargs)
    out = {
        "trial": i,
        "certified": bool(rep.no_zero_certified),
        "sign_changes": rep.sign_changes,
        "undecided_measure": rep.undecided_measure,
        "eta_total": rep.eta_total,
    }
    if cfg.include_forced:
        fp = all_plus_path(seq, cfg.master_seed, i, cfg.cutoff)
        frep = certify_no_zeros(fp, cfg.sigma_lo, **kwargs)
        out["forced_certified"] = bool(frep.no_zero_certified)
    return out


def _validate_no_zero(cfg: NoZeroConfig) -> None:
    seq = _seq(cfg.seq)
    if cfg.trials < 1:
        raise ValidationError("trials must be >= 1")
    if not 0.0 < cfg.eta < 1.0:
        raise ValidationError("eta must lie in (0,1)")
    from .frequencies import Explicit

    if cfg.sigma_lo <= 0.5 and not isinstance(seq, Explicit):
        raise ValidationError(
            "sigma_lo at or below 1/2 needs a finite sequence summed exactly"
        )
    if not seq.reciprocal_sum_converges:
        warnings.warn(
            "reciprocal sum diverges: no-zero certification is expected to "
            "fail on most trials in this regime",
            stacklevel=2,
        )


def _aggregate_no_zero(cfg: NoZeroConfig, rows: list[dict]) -> dict:
    n = len(rows)
    certified = sum(1 for r in rows if r["certified"])
    agg = {"certified": _fraction_entry(certified, n)}
    seq = _seq(cfg.seq)
    pi_u = seq.counting_function(cfg.cutoff)
    agg["conditioning_count"] = pi_u
    agg["log2_conditioning_probability"] = -pi_u
    if cfg.include_forced:
        forced = sum(1 for r in rows if r["forced_certified"])
        agg["forced_certified"] = _fraction_entry(forced, n)
        if forced > 0:
            agg["no_zero_probability_log2_lower_bound"] = (
                math.log2(forced / n) - pi_u
            )
        else:
            agg["no_zero_probability_log2_lower_bound"] = None
    return agg


def run_no_zero_experiment(cfg: NoZeroConfig, workers: int = 1) -> ExperimentReport:
    _validate_no_zero(cfg)
    return _run(cfg, _no_zero_trial, _aggregate_no_zero, workers)


# ---------------------------------------------------------------------------
# sign_change


_SIGN_CHANGE_SETUP: dict[SignChangeConfig, dict] = {}


def _sign_change_setup(cfg: SignChangeConfig) -> dict:
    setup = _SIGN_CHANGE_SETUP.get(cfg)
    if setup is not None:
        return setup
    seq = _seq(cfg.seq)
    ladder = sorted(cfg.ladder, reverse=True)
    sigma_min = ladder[-1]
    d_lo, d_hi = sigma_min - 0.5, cfg.sigma_hi - 0.5
    ratio = (d_hi / d_lo) ** (1.0 / (cfg.grid_points - 1))
    grid = sorted(
        set([0.5 + d_lo * ratio ** i for i in range(cfg.grid_points)])
        | set(float(s) for s in cfg.ladder)
        | {float(cfg.sigma_hi)}
    )
    cutoffs = []
    for s in grid:
        rule = math.exp(1.0 / (2.0 * s - 1.0))
        cutoffs.append(min(max(rule, cfg.heuristic_min_cutoff),
                           cfg.heuristic_max_cutoff))
    sigma0 = 0.5 + 0.5 * (sigma_min - 0.5)
    cert = tail_certificate(seq, sigma0, cfg.cert_cutoff, cfg.eta,
                            head_terms=cfg.head_terms)
    counts = [seq.counting_function(c) for c in cutoffs]
    cert_count = seq.counting_function(cfg.cert_cutoff)
    weights = [_weights(seq, s, c) for s, c in zip(grid, cutoffs)]
    cert_weights = [_weights(seq, s, cfg.cert_cutoff) for s in grid]
    radii = [cert.threshold * cert.cutoff ** (-(s - cert.sigma0)) for s in grid]
    rung_start = [next(j for j, s in enumerate(grid) if s >= rv - 1e-12)
                  for rv in ladder]
    setup = {
        "seq": seq,
        "grid": grid,
        "counts": counts,
        "cert_count": cert_count,
        "weights": weights,
        "cert_weights": cert_weights,
        "radii": radii,
        "ladder": ladder,
        "rung_start": rung_start,
        "eta": cert.eta,
        "max_count": max(counts + [cert_count]),
    }
    _SIGN_CHANGE_SETUP.clear()
    _SIGN_CHANGE_SETUP[cfg] = setup
    return setup


def _sign_change_trial(cfg: SignChangeConfig, i: int) -> dict:
    st = _sign_change_setup(cfg)
    seq = st["seq"]
    path = SamplePath(seq, cfg.master_seed, i)
    start = seq.start_index
    signs = path.signs_for_indices(
        np.arange(start, start + st["max_count"], dtype=np.uint64)
    )
    combined: list[int] = []
    decided: list[bool] = []
    for j, _sigma in enumerate(st["grid"]):
        cw = st["cert_weights"][j]
        cert_value = compensated_sum(signs[: cw.size] * cw)
        if abs(cert_value) > st["radii"][j]:
            combined.append(1 if cert_value > 0 else -1)
            decided.append(True)
        else:
            w = st["weights"][j]
            hv = compensated_sum(signs[: w.size] * w)
            combined.append(1 if hv >= 0 else -1)
            decided.append(False)
    m = len(combined)
    combined_counts = []
    certified_counts = []
    for j0 in st["rung_start"]:
        combined_counts.append(
            sum(1 for j in range(j0, m - 1) if combined[j] != combined[j + 1])
        )
        certified_counts.append(
            sum(
                1
                for j in range(j0, m - 1)
                if decided[j] and decided[j + 1] and combined[j] != combined[j + 1]
            )
        )
    return {
        "trial": i,
        "combined_counts": combined_counts,
        "certified_counts": certified_counts,
        "decided_fraction": sum(decided) / m,
    }


def _aggregate_sign_change(cfg: SignChangeConfig, rows: list[dict]) -> dict:
    st = _sign_change_setup(cfg)
    n = len(rows)
    per_rung = []
    for k, sigma_k in enumerate(st["ladder"]):
        comb = [r["combined_counts"][k] for r in rows]
        cert = [r["certified_counts"][k] for r in rows]
        per_rung.append(
            {
                "sigma": sigma_k,
                "mean_count": math.fsum(comb) / n,
                "median_count": float(sorted(comb)[n // 2]),
                "mean_certified_count": math.fsum(cert) / n,
                "median_certified_count": float(sorted(cert)[n // 2]),
            }
        )
    return {
        "ladder_descending": list(st["ladder"]),
        "per_rung": per_rung,
        "mean_decided_fraction": math.fsum(r["decided_fraction"] for r in rows) / n,
        "eta_per_trial": st["eta"],
        "includes_heuristic_signs": True,
    }


def run_sign_change_experiment(
    cfg: SignChangeConfig, workers: int = 1
) -> ExperimentReport:
    if cfg.trials < 1:
        raise ValidationError("trials must be >= 1")
    if min(cfg.ladder) <= 0.5:
        raise ValidationError("ladder values must exceed 1/2")
    if cfg.grid_points < 2:
        raise ValidationError("grid_points must be >= 2")
    rule = math.exp(1.0 / (2.0 * min(cfg.ladder) - 1.0))
    if rule > cfg.heuristic_max_cutoff:
        raise ValidationError(
            f"smallest ladder value needs cutoff {rule:.3g} > "
            f"heuristic_max_cutoff {cfg.heuristic_max_cutoff:.3g}"
        )
    return _run(cfg, _sign_change_trial, _aggregate_sign_change, workers)


# ---------------------------------------------------------------------------
# bu_event


def _bu_trial(cfg: BuEventConfig, i: int) -> dict:
    seq = _seq(cfg.seq)
    path = SamplePath(seq, cfg.master_seed, i)
    max_hi = max(cfg.cutoff_ladder) * cfg.horizon_factor
    w = _weights(seq, 0.5, max_hi)  # critical-exponent weights, cached
    signs = path.signs_up_to(max_hi)
    prefix = np.cumsum(signs * w)
    start = seq.start_index
    sups = []
    for u in cfg.cutoff_ladder:
        a = seq.counting_function(u)
        b = seq.counting_function(u * cfg.horizon_factor)
        if b <= a:
            sups.append(0.0)
            continue
        base = prefix[a - 1] if a > 0 else 0.0
        window = prefix[a:b] - base
        sups.append(float(np.max(np.abs(window))))
    return {"trial": i, "sups": sups}


def _aggregate_bu(cfg: BuEventConfig, rows: list[dict]) -> dict:
    seq = _seq(cfg.seq)
    n = len(rows)
    per_cutoff = []
    for k, u in enumerate(cfg.cutoff_ladder):
        exceed = sum(1 for r in rows if r["sups"][k] >= cfg.threshold)
        _, t_upper = seq.tail_power_sum(1.0, u, head_terms=cfg.head_terms)
        per_cutoff.append(
            {
                "cutoff": u,
                "horizon": u * cfg.horizon_factor,
                "tail_reciprocal_upper": t_upper,
                "bound": excursion_probability_bound(t_upper, cfg.threshold),
                **_fraction_entry(exceed, n),
            }
        )
    agg = {"threshold": cfg.threshold, "per_cutoff": per_cutoff}
    ladder = []
    count_bound = getattr(seq, "tail_reciprocal_upper_for_count", None)
    for c in cfg.bound_count_ladder:
        if count_bound is None:
            break
        t_upper = count_bound(int(c))
        ladder.append(
            {
                "leading_count": int(c),
                "tail_reciprocal_upper": t_upper,
                "bound": excursion_probability_bound(t_upper, cfg.threshold),
            }
        )
    agg["bound_count_ladder"] = ladder
    return agg


def run_bu_event_experiment(cfg: BuEventConfig, workers: int = 1) -> ExperimentReport:
    seq = _seq(cfg.seq)
    if cfg.trials < 1:
        raise ValidationError("trials must be >= 1")
    if not seq.reciprocal_sum_converges:
        raise ValidationError(
            "excursion study needs a convergent reciprocal sum"
        )
    if cfg.threshold <= 0:
        raise ValidationError("threshold must be positive")
    if cfg.horizon_factor <= 1:
        raise ValidationError("horizon_factor must exceed 1")
    return _run(cfg, _bu_trial, _aggregate_bu, workers)


# ---------------------------------------------------------------------------
# exceedance


def _exceedance_trial(cfg: ExceedanceConfig, i: int) -> dict:
    seq = _seq(cfg.seq)
    path = SamplePath(seq, cfg.master_seed, i)
    sums = partial_sum_table(path, [(0.5, y) for y in cfg.scales])
    normalized = []
    for y, s in zip(cfg.scales, sums):
        norm = math.sqrt(seq.power_sum(1.0, y))
        normalized.append(s / norm)
    return {"trial": i, "normalized": normalized}


def _aggregate_exceedance(cfg: ExceedanceConfig, rows: list[dict]) -> dict:
    n = len(rows)
    m = len(cfg.scales)
    cumulative = []
    for k in range(1, m + 1):
        hit = sum(
            1 for r in rows if any(v >= cfg.level for v in r["normalized"][:k])
        )
        cumulative.append({"scales_used": k, **_fraction_entry(hit, n)})
    per_scale = []
    for k, y in enumerate(cfg.scales):
        hit = sum(1 for r in rows if r["normalized"][k] >= cfg.level)
        per_scale.append({"scale": y, **_fraction_entry(hit, n)})
    return {
        "level": cfg.level,
        "degenerate_level": cfg.level <= 0,
        "cumulative": cumulative,
        "per_scale": per_scale,
        "finite_scale_only": True,
    }


def run_exceedance_experiment(
    cfg: ExceedanceConfig, workers: int = 1
) -> ExperimentReport:
    if cfg.trials < 1:
        raise ValidationError("trials must be >= 1")
    if list(cfg.scales) != sorted(set(cfg.scales)):
        raise ValidationError("scales must be strictly increasing")
    return _run(cfg, _exceedance_trial, _aggregate_exceedance, workers)


# ---------------------------------------------------------------------------
# Runner plumbing

_TRIAL_FNS = {
    "no_zero": _no_zero_trial,
    "sign_change": _sign_change_trial,
    "bu_event": _bu_trial,
    "exceedance": _exceedance_trial,
}


def _trial_entry(args) -> dict:
    kind, cfg, i = args
    return _TRIAL_FNS[kind](cfg, i)


def _run(cfg, trial_fn, aggregate_fn, workers: int) -> ExperimentReport:
    t0 = time.monotonic()
    if workers <= 1:
        rows = [trial_fn(cfg, i) for i in range(cfg.trials)]
    else:
        args = [(cfg.kind, cfg, i) for i in range(cfg.trials)]
        chunk = max(1, cfg.trials // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_trial_entry, args, chunksize=chunk))
    agg = aggregate_fn(cfg, rows)
    cd = _config_dict(cfg)
    return ExperimentReport(
        kind=cfg.kind,
        config=cd,
        config_hash=config_hash(cd),
        master_seed=cfg.master_seed,
        per_trial=rows,
        aggregates=agg,
        wall_time_s=time.monotonic() - t0,
    )


_RUNNERS = {
    "no_zero": run_no_zero_experiment,
    "sign_change": run_sign_change_experiment,
    "bu_event": run_bu_event_experiment,
    "exceedance": run_exceedance_experiment,
}


def run_experiment(cfg, workers: int = 1) -> ExperimentReport:
    """Dispatch on the config's kind field."""
    return _RUNNERS[cfg.kind](cfg, workers=workers)
