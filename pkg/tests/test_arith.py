import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from multoep.arith import (
    Factorization,
    divisors,
    euler_phi,
    factor_small,
    factorize,
    prime_reciprocal_sum,
    sieve,
    trial_division_primes,
    valuation,
)
from multoep.errors import ArgumentError, OutOfRangeError, ResourceError

_TABLE = sieve(10**6)


def test_small_sieves():
    assert list(sieve(10).primes) == [2, 3, 5, 7]
    assert list(sieve(2).primes) == [2]
    assert len(sieve(100).primes) == 25


def test_sieve_matches_trial_division():
    T = sieve(20000)
    assert list(T.primes) == trial_division_primes(20000)


def test_smallest_factor(table):
    lpf = table.smallest_factor
    for n in range(2, 3000):
        p = int(lpf[n])
        assert n % p == 0
        assert all(n % d for d in range(2, p))


def test_sieve_limits():
    with pytest.raises(ArgumentError):
        sieve(1)
    with pytest.raises(ResourceError):
        sieve(10**6, max_limit=10**5)


def test_factorize_examples(table):
    assert factorize(1, table).parts == ()
    assert factorize(12, table).parts == ((2, 2), (3, 1))
    assert factorize(2016, table).parts == ((2, 5), (3, 2), (7, 1))
    with pytest.raises(OutOfRangeError):
        factorize(table.limit + 1, table)


def test_factorization_rejects_bad_parts():
    with pytest.raises(ArgumentError):
        Factorization(12, ((3, 1), (2, 2)))
    with pytest.raises(ArgumentError):
        Factorization(12, ((2, 1), (3, 1)))


@given(st.integers(1, 10**6))
def test_factorize_multiplies_back(n):
    T = _TABLE
    parts = factorize(n, T).parts
    assert math.prod(p**e for p, e in parts) == n
    assert all(T.is_prime(p) for p, _ in parts)
    assert parts == tuple(factor_small(n))


@given(st.integers(1, 10**9), st.sampled_from([2, 3, 5, 7, 11]))
def test_valuation(n, p):
    b = valuation(n, p)
    assert n % p**b == 0
    assert n % p ** (b + 1) != 0


def test_prime_power_split(table):
    N = 10**5
    ppow, cof = table.prime_power_split(N)
    n = np.arange(2, N + 1)
    assert np.array_equal(ppow[2:] * cof[2:], n)
    assert np.all(np.gcd(ppow[2:], cof[2:]) == 1)
    lpf = table.smallest_factor[2 : N + 1]
    assert np.all(cof[2:] % lpf != 0)


def test_prime_powers(table):
    q, p, k = table.prime_powers(1000)
    assert np.array_equal(q, p**k)
    brute = [n for n in range(2, 1001) if len(factor_small(n)) == 1]
    assert list(q) == brute


def test_reciprocal_sums(table):
    assert prime_reciprocal_sum(table, 2, 10) == math.fsum([1 / 2, 1 / 3, 1 / 5, 1 / 7])
    s = prime_reciprocal_sum(table, 2, 10**6)
    assert abs(s - (math.log(math.log(10**6)) + 0.2615)) < 0.01
    w = prime_reciprocal_sum(table, 2, 10**5, weight=lambda p: 2)
    wv = prime_reciprocal_sum(table, 2, 10**5, weight=lambda ps: 2 * np.ones(len(ps)), vectorized=True)
    assert w == wv
    with pytest.raises(OutOfRangeError):
        prime_reciprocal_sum(table, 2, table.limit + 1)
    with pytest.raises(ArgumentError):
        prime_reciprocal_sum(table, 10, 2)


def test_reciprocal_window(table7):
    s = prime_reciprocal_sum(table7, 10**3.5, 10**7, weight=lambda p: 2)
    assert abs(s - 2 * math.log(2)) < 0.05


def test_small_helpers():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(1) == [1]
    assert [euler_phi(n) for n in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    for n in range(1, 200):
        assert euler_phi(n) == sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)
