"""Numerical laboratory for random sign Dirichlet series.

Frequency sequences, deterministic seed-derived sign paths, certified
evaluation with truncation-error certificates, certified sign-change
scanning and no-zero certification, distributional diagnostics near the
critical exponent, exact concentration oracles, and reproducible Monte
Carlo experiments.
"""

from ._version import VERSION as __version__
from .bounds import (
    WeightedRademacherInstance,
    exact_tail,
    hoeffding_bound,
    levy_bound,
    wilson_interval,
)
from .errors import (
    DirichletLabError,
    DivergenceError,
    ResourceBudgetError,
    ValidationError,
)
from .evaluation import (
    CertifiedValue,
    TailCertificate,
    domination_certificate,
    evaluate,
    excursion_probability_bound,
    heuristic_cutoff,
    heuristic_evaluate,
    mellin_discrepancy,
    partial_sum,
    partial_sum_table,
    tail_certificate,
)
from .experiments import (
    BuEventConfig,
    ExceedanceConfig,
    ExperimentReport,
    NoZeroConfig,
    SignChangeConfig,
    run_bu_event_experiment,
    run_exceedance_experiment,
    run_experiment,
    run_no_zero_experiment,
    run_sign_change_experiment,
)
from .frequencies import (
    Explicit,
    FrequencySequence,
    Naturals,
    Primes,
    WeightedNaturals,
    make_sequence,
    sequence_spec,
)
from .limits import (
    VarianceProfile,
    char_function,
    clt_sample,
    ks_statistic,
    variance_profile,
)
from .paths import SamplePath, all_plus_path, forced_path, prefix_sums, running_sup
from .zeros import SignScanReport, certified_sign, certify_no_zeros, scan

__all__ = [
    "__version__",
    "BuEventConfig",
    "CertifiedValue",
    "DirichletLabError",
    "DivergenceError",
    "ExceedanceConfig",
    "ExperimentReport",
    "Explicit",
    "FrequencySequence",
    "Naturals",
    "NoZeroConfig",
    "Primes",
    "ResourceBudgetError",
    "SamplePath",
    "SignChangeConfig",
    "SignScanReport",
    "TailCertificate",
    "ValidationError",
    "VarianceProfile",
    "WeightedNaturals",
    "WeightedRademacherInstance",
    "all_plus_path",
    "certified_sign",
    "certify_no_zeros",
    "char_function",
    "clt_sample",
    "domination_certificate",
    "evaluate",
    "exact_tail",
    "excursion_probability_bound",
    "forced_path",
    "heuristic_cutoff",
    "heuristic_evaluate",
    "hoeffding_bound",
    "ks_statistic",
    "levy_bound",
    "make_sequence",
    "mellin_discrepancy",
    "partial_sum",
    "partial_sum_table",
    "prefix_sums",
    "run_bu_event_experiment",
    "run_exceedance_experiment",
    "run_experiment",
    "run_no_zero_experiment",
    "run_sign_change_experiment",
    "running_sup",
    "scan",
    "sequence_spec",
    "tail_certificate",
    "variance_profile",
    "wilson_interval",
]
