import numpy as np

from dirichletlab import sieve


def test_primes_up_to_matches_trial_division(small_primes):
    got = sieve.primes_up_to(10_000)
    assert got.tolist() == small_primes


def test_cache_grows_consistently(small_primes):
    a = sieve.primes_up_to(100).tolist()
    b = sieve.primes_up_to(10_000).tolist()
    assert b[: len(a)] == a
    assert b == small_primes


def test_prime_count(small_primes):
    assert sieve.prime_count(1) == 0
    assert sieve.prime_count(2) == 1
    assert sieve.prime_count(9999.5) == len(
        [p for p in small_primes if p <= 9999]
    )


def test_nth_prime(small_primes):
    for n in (1, 2, 5, 6, 25, 168, 1229):
        assert sieve.nth_prime(n) == small_primes[n - 1]


def test_primes_slice(small_primes):
    got = sieve.primes_slice(10, 7).tolist()
    assert got == small_primes[9:16]
