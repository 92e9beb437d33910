import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirichletlab import (
    DivergenceError,
    Explicit,
    Naturals,
    Primes,
    ResourceBudgetError,
    ValidationError,
    WeightedNaturals,
    make_sequence,
    sequence_spec,
)
from dirichletlab.frequencies import SummatoryCache

from conftest import zeta_em


def quiet_explicit(values, **kw):
    return Explicit(tuple(values), _quiet=True, **kw)


# ---------------------------------------------------------------------------
# Naturals


def test_naturals_basics():
    seq = Naturals()
    assert seq.element(1) == 1.0
    assert seq.counting_function(10.5) == 10
    assert seq.elements_up_to(5).tolist() == [1, 2, 3, 4, 5]
    assert seq.elements_between(3, 6).tolist() == [4, 5, 6]
    assert not seq.reciprocal_sum_converges
    assert seq.tail_converges(1.5) and not seq.tail_converges(1.0)


def test_naturals_power_sum_matches_zeta_oracle():
    seq = Naturals()
    for s in (1.5, 2.0, 3.0):
        full = zeta_em(s)
        head = seq.power_sum(s, 10_000)
        lo, hi = seq.tail_power_sum(s, 10_000)
        assert lo <= full - head <= hi
        assert hi - lo < 1e-6


def test_naturals_tail_diverges():
    with pytest.raises(DivergenceError):
        Naturals().tail_power_sum(1.0, 100)


def test_budget_enforced():
    with pytest.raises(ResourceBudgetError):
        Naturals().elements_up_to(1e9, budget=1000)
    with pytest.raises(ResourceBudgetError):
        Naturals().power_sum(2.0, 1e12)


# ---------------------------------------------------------------------------
# Primes


def test_primes_match_sieve_oracle(small_primes):
    seq = Primes()
    assert seq.elements_up_to(1000).tolist() == [
        float(p) for p in small_primes if p <= 1000
    ]
    assert seq.element(25) == small_primes[24]
    assert seq.counting_function(541) == 100


def test_primes_tail_enclosure_brackets_brute_force():
    seq = Primes()
    for s, cutoff in ((2.0, 100.0), (1.5, 1000.0)):
        lo, hi = seq.tail_power_sum(s, cutoff)
        # brute force far enough out that the missing remainder is tiny
        elems = seq.elements_between(cutoff, 2_000_000)
        brute = float(np.sum(elems ** (-s)))
        missing = 2_000_000.0 ** (1.0 - s) / (s - 1.0)
        assert lo <= brute + missing
        assert brute <= hi
        assert lo < hi


def test_primes_start_index_shifts():
    seq = Primes(start_index=3)
    assert seq.element(3) == 5.0
    assert seq.elements_up_to(11).tolist() == [5.0, 7.0, 11.0]
    assert seq.counting_function(11) == 3


# ---------------------------------------------------------------------------
# WeightedNaturals


def test_weighted_values_and_counting():
    seq = WeightedNaturals(exponent=2.0)
    assert seq.start_index == 2  # keeps every served element >= 1
    assert seq.element(2) == pytest.approx(2 * math.log(3) ** 2)
    for i in range(2, 200):
        assert seq.counting_function(seq.element(i)) == i - 1


def test_weighted_reciprocal_sum_converges_but_abscissa_is_one():
    seq = WeightedNaturals(exponent=2.0)
    assert seq.reciprocal_sum_converges
    assert seq.tail_converges(1.0)
    assert not seq.tail_converges(0.99)


def test_weighted_tail_enclosure_brackets_brute_force():
    seq = WeightedNaturals(exponent=2.0)
    lo, hi = seq.tail_power_sum(1.0, 1000.0, head_terms=200)
    elems = seq.elements_between(1000.0, 5_000_000.0)
    brute = float(np.sum(1.0 / elems))
    assert brute <= hi
    assert lo <= brute + 1.0 / math.log(5_000_000.0)  # crude remainder room
    assert lo < hi


def test_weighted_count_bound_dominates_brute_force():
    seq = WeightedNaturals(exponent=2.0)
    count = 500
    bound = seq.tail_reciprocal_upper_for_count(count)
    last = seq.element(seq.start_index + count - 1)
    elems = seq.elements_between(last, 10_000_000.0)
    brute = float(np.sum(1.0 / elems))
    assert brute < bound
    # the analytic bound accepts astronomically large counts and decays
    b1 = seq.tail_reciprocal_upper_for_count(10 ** 9)
    b2 = seq.tail_reciprocal_upper_for_count(10 ** 1950)
    assert b2 < b1 < bound


def test_weighted_exponent_validation():
    with pytest.raises(ValidationError):
        WeightedNaturals(exponent=1.0)


# ---------------------------------------------------------------------------
# Explicit


def test_explicit_validation():
    with pytest.raises(ValidationError):
        quiet_explicit([2.0, 2.0])
    with pytest.raises(ValidationError):
        quiet_explicit([0.5, 2.0])
    with pytest.raises(ValidationError):
        quiet_explicit([])


def test_explicit_warns_on_construction():
    with pytest.warns(UserWarning):
        Explicit((2.0, 3.0))


def test_explicit_exact_tail():
    seq = quiet_explicit([2.0, 3.0, 4.0])
    lo, hi = seq.tail_power_sum(0.3, 2.5)
    exact = 3.0 ** -0.3 + 4.0 ** -0.3
    assert lo == hi == pytest.approx(exact, abs=1e-15)
    assert seq.tail_power_sum(1.0, 10.0) == (0.0, 0.0)


def test_explicit_from_file(tmp_path):
    p = tmp_path / "seq.txt"
    p.write_text("# comment\n2.0\n3.5 # inline\n\n7\n")
    seq = Explicit.from_file(p)
    assert seq.values == (2.0, 3.5, 7.0)
    bad = tmp_path / "bad.txt"
    bad.write_text("2.0\nnot-a-number\n")
    with pytest.raises(ValidationError, match="bad.txt:2"):
        Explicit.from_file(bad)
    dec = tmp_path / "dec.txt"
    dec.write_text("3.0\n2.0\n")
    with pytest.raises(ValidationError, match="dec.txt:2"):
        Explicit.from_file(dec)


# ---------------------------------------------------------------------------
# Factory round trip, cache, properties


@pytest.mark.parametrize(
    "spec", ["naturals", "primes", "weighted:2.0", "weighted:1.5",
             "explicit:2.0,3.0,5.5"]
)
def test_spec_round_trip(spec):
    seq = make_sequence(spec)
    again = make_sequence(sequence_spec(seq))
    assert type(again) is type(seq)
    assert sequence_spec(again) == sequence_spec(seq)


def test_make_sequence_rejects_unknown():
    with pytest.raises(ValidationError):
        make_sequence("fibonacci")
    with pytest.raises(ValidationError):
        make_sequence("weighted:abc")


def test_summatory_cache_memoizes():
    seq = Naturals()
    cache = SummatoryCache(seq, 1000)
    assert cache.count == 1000
    v1 = cache.power_sum(1.5)
    assert v1 == seq.power_sum(1.5, 1000)
    assert cache.power_sum(1.5) is not None  # memo path


@given(st.integers(1, 5000))
@settings(max_examples=60, deadline=None)
def test_property_naturals_count_inverts_element(i):
    seq = Naturals()
    assert seq.counting_function(seq.element(i)) == i


@given(st.integers(2, 3000), st.floats(1.1, 4.0))
@settings(max_examples=60, deadline=None)
def test_property_weighted_enclosure_is_ordered(i, sigma):
    seq = WeightedNaturals(exponent=2.0)
    cutoff = seq.element(i)
    lo, hi = seq.tail_power_sum(sigma, cutoff, head_terms=64)
    assert 0.0 <= lo <= hi


@given(st.floats(1.2, 3.5), st.floats(10.0, 5000.0))
@settings(max_examples=40, deadline=None)
def test_property_tail_decreases_in_cutoff(sigma, cutoff):
    seq = Naturals()
    lo1, hi1 = seq.tail_power_sum(sigma, cutoff)
    lo2, hi2 = seq.tail_power_sum(sigma, cutoff * 2.0)
    assert hi2 <= hi1
    assert lo2 <= hi1
