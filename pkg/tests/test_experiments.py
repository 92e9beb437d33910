import json
import math

import pytest

from dirichletlab import (
    BuEventConfig,
    ExceedanceConfig,
    NoZeroConfig,
    SignChangeConfig,
    ValidationError,
    run_experiment,
)
from dirichletlab.experiments import config_hash, _config_dict

from conftest import normal_cdf


def test_config_hash_is_canonical():
    cfg = NoZeroConfig(trials=5)
    d1 = _config_dict(cfg)
    d2 = dict(reversed(list(d1.items())))
    assert config_hash(d1) == config_hash(d2)
    assert config_hash(d1) != config_hash(_config_dict(NoZeroConfig(trials=6)))


def test_payload_excludes_wall_time():
    rep = run_experiment(ExceedanceConfig(trials=5))
    payload = rep.payload_dict()
    assert "wall_time" not in json.dumps(payload)
    assert rep.wall_time_s >= 0.0
    assert payload["config_hash"] == rep.config_hash
    assert payload["code_version"]


def test_reports_identical_across_worker_counts():
    cfg = ExceedanceConfig(trials=12)
    r1 = run_experiment(cfg, workers=1)
    r2 = run_experiment(cfg, workers=4)
    assert r1.payload_json() == r2.payload_json()
    assert r1.report_hash() == r2.report_hash()


def test_rerun_is_bit_identical():
    cfg = NoZeroConfig(trials=4, cutoff=1e4)
    assert (
        run_experiment(cfg).payload_json() == run_experiment(cfg).payload_json()
    )


# ---------------------------------------------------------------------------
# no_zero


def test_no_zero_finite_sequence_certifies_every_assignment():
    cfg = NoZeroConfig(
        seq="explicit:2.0,3.0", sigma_lo=0.1, trials=4, include_forced=False
    )
    rep = run_experiment(cfg)
    assert rep.aggregates["certified"]["fraction"] == 1.0
    assert all(r["eta_total"] == 0.0 for r in rep.per_trial)


def test_no_zero_forced_variant_certifies_fully():
    cfg = NoZeroConfig(trials=6, cutoff=1e4)
    rep = run_experiment(cfg)
    agg = rep.aggregates
    assert agg["forced_certified"]["fraction"] == 1.0
    assert agg["conditioning_count"] > 0
    assert agg["log2_conditioning_probability"] == -agg["conditioning_count"]
    assert agg["no_zero_probability_log2_lower_bound"] == pytest.approx(
        -agg["conditioning_count"]
    )


def test_no_zero_conditioning_decomposition_consistent():
    cfg = NoZeroConfig(trials=25, cutoff=1e4)
    rep = run_experiment(cfg)
    agg = rep.aggregates
    p_forced = 2.0 ** agg["log2_conditioning_probability"]
    lower = p_forced * agg["forced_certified"]["fraction"]
    assert lower <= agg["certified"]["wilson_hi"] + p_forced


def test_no_zero_validation_and_divergence_warning():
    with pytest.raises(ValidationError):
        run_experiment(NoZeroConfig(trials=0))
    with pytest.raises(ValidationError):
        run_experiment(NoZeroConfig(seq="naturals", sigma_lo=0.4, trials=1))
    with pytest.warns(UserWarning, match="diverges"):
        run_experiment(
            NoZeroConfig(seq="naturals", trials=1, cutoff=1e3,
                         include_forced=False)
        )


# ---------------------------------------------------------------------------
# sign_change


def test_sign_change_counts_nondecreasing_along_descending_ladder():
    cfg = SignChangeConfig(
        ladder=(0.70, 0.65, 0.62), trials=25, heuristic_max_cutoff=1e6
    )
    rep = run_experiment(cfg)
    for row in rep.per_trial:
        cc = row["combined_counts"]  # ordered by descending sigma rung
        assert all(x <= y for x, y in zip(cc, cc[1:]))
        kk = row["certified_counts"]
        assert all(x <= y for x, y in zip(kk, kk[1:]))
        assert all(k <= c for k, c in zip(kk, cc))


def test_sign_change_convergent_sequence_counts_stay_flat():
    cfg = SignChangeConfig(
        seq="weighted:2.0", ladder=(0.70, 0.65, 0.62), trials=25,
        heuristic_max_cutoff=1e6,
    )
    rep = run_experiment(cfg)
    means = [r["mean_count"] for r in rep.aggregates["per_rung"]]
    assert max(means) - min(means) < 0.5


def test_sign_change_validation():
    with pytest.raises(ValidationError):
        run_experiment(SignChangeConfig(ladder=(0.5, 0.7), trials=1))
    with pytest.raises(ValidationError):
        run_experiment(
            SignChangeConfig(ladder=(0.53,), heuristic_max_cutoff=1e5, trials=1)
        )


# ---------------------------------------------------------------------------
# bu_event


def test_bu_event_past_finite_sequence_is_trivial():
    cfg = BuEventConfig(
        seq="explicit:2.0,3.0,4.0",
        cutoff_ladder=(10.0,),
        horizon_factor=100.0,
        trials=10,
    )
    rep = run_experiment(cfg)
    row = rep.aggregates["per_cutoff"][0]
    assert row["fraction"] == 0.0
    assert row["bound"] >= 0.0


def test_bu_event_bound_ladder_decays_below_half():
    cfg = BuEventConfig(
        trials=5,
        cutoff_ladder=(100.0,),
        horizon_factor=10.0,
        bound_count_ladder=(10 ** 3, 10 ** 9, 10 ** 100, 10 ** 1950),
    )
    rep = run_experiment(cfg)
    bounds = [b["bound"] for b in rep.aggregates["bound_count_ladder"]]
    assert all(x > y for x, y in zip(bounds, bounds[1:]))
    assert bounds[-1] < 0.5


def test_bu_event_wilson_contains_fraction():
    cfg = BuEventConfig(trials=30, cutoff_ladder=(100.0, 1000.0),
                        horizon_factor=50.0)
    rep = run_experiment(cfg)
    for row in rep.aggregates["per_cutoff"]:
        assert row["wilson_lo"] <= row["fraction"] <= row["wilson_hi"]


def test_bu_event_validation():
    with pytest.raises(ValidationError):
        run_experiment(BuEventConfig(seq="naturals", trials=1))
    with pytest.raises(ValidationError):
        run_experiment(BuEventConfig(threshold=0.0, trials=1))


# ---------------------------------------------------------------------------
# exceedance


def test_exceedance_cumulative_fraction_nondecreasing():
    rep = run_experiment(ExceedanceConfig(trials=60))
    fracs = [c["fraction"] for c in rep.aggregates["cumulative"]]
    assert all(x <= y for x, y in zip(fracs, fracs[1:]))
    assert not rep.aggregates["degenerate_level"]


def test_exceedance_single_scale_matches_normal_tail():
    cfg = ExceedanceConfig(scales=(10_000.0,), level=2.0, trials=400)
    rep = run_experiment(cfg)
    row = rep.aggregates["per_scale"][0]
    target = 1.0 - normal_cdf(2.0)
    # finite-scale bias allowed: the Wilson interval must reach the target
    assert row["wilson_lo"] - 0.02 <= target <= row["wilson_hi"] + 0.02


def test_exceedance_degenerate_level_flagged():
    rep = run_experiment(ExceedanceConfig(level=0.0, trials=10))
    assert rep.aggregates["degenerate_level"]


def test_exceedance_validation():
    with pytest.raises(ValidationError):
        run_experiment(ExceedanceConfig(scales=(100.0, 100.0), trials=1))


def test_per_trial_csv_shape():
    rep = run_experiment(ExceedanceConfig(trials=5))
    csv = rep.per_trial_csv()
    lines = csv.strip().split("\n")
    assert lines[0].split(",")[0] == "trial"
    assert len(lines) == 6
