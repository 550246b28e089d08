"""Prime sieve, factorization, valuations and prime reciprocal sums.

The sieve stores the least prime factor of every integer up to ``limit``,
so factorizing any ``n <= limit`` costs O(log n) table lookups.  Tables are
immutable after construction and can be shared between threads.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ArgumentError, OutOfRangeError, ResourceError

#: Largest sieve limit accepted without an explicit override (~0.8 GB of int32).
MAX_SIEVE_LIMIT = int(os.environ.get("MULTOEP_MAX_SIEVE", 2 * 10**8))


@dataclass(frozen=True)
class Factorization:
    """Canonical prime-power decomposition ``n = prod p**e``."""

    n: int
    parts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.parts:
            if p <= last or e < 1:
                raise ArgumentError(f"non-canonical factorization parts {self.parts}")
            prod *= p**e
            last = p
        if prod != self.n:
            raise ArgumentError(f"parts {self.parts} multiply to {prod}, not {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.parts)

    def exponent(self, p: int) -> int:
        for q, e in self.parts:
            if q == p:
                return e
        return 0


class PrimeTable:
    """Least-prime-factor sieve up to ``limit``.

    ``smallest_factor[n]`` is the least prime dividing ``n`` for ``2 <= n <=
    limit`` (and 1 at index 1).  ``primes`` lists every prime up to the limit
    in ascending order.
    """

    def __init__(self, limit: int, max_limit: Optional[int] = None):
        limit = int(limit)
        if limit < 2:
            raise ArgumentError("sieve limit must be at least 2")
        budget = MAX_SIEVE_LIMIT if max_limit is None else max_limit
        if limit > budget:
            raise ResourceError(f"sieve limit {limit} exceeds the memory budget {budget}")
        self.limit = limit
        lpf = np.zeros(limit + 1, dtype=np.int32)
        lpf[1] = 1
        for p in range(2, math.isqrt(limit) + 1):
            if lpf[p] == 0:
                block = lpf[p * p :: p]
                block[block == 0] = p
        rest = np.flatnonzero(lpf == 0)
        rest = rest[rest >= 2]
        lpf[rest] = rest
        lpf.setflags(write=False)
        self.smallest_factor = lpf
        primes = np.flatnonzero(lpf[2:] == np.arange(2, limit + 1)) + 2
        primes = primes.astype(np.int64)
        primes.setflags(write=False)
        self.primes = primes
        self._split = None
        self._lock = threading.Lock()

    def __repr__(self):
        return f"PrimeTable(limit={self.limit}, primes={len(self.primes)})"

    def check(self, n: int, what: str = "argument"):
        if n > self.limit:
            raise OutOfRangeError(f"{what} {n} exceeds the sieve limit {self.limit}")

    def primes_between(self, lo: float, hi: float) -> np.ndarray:
        """Primes ``p`` with ``lo <= p <= hi`` (hi must be within the table)."""
        if hi > self.limit:
            raise OutOfRangeError(f"upper end {hi} exceeds the sieve limit {self.limit}")
        i = np.searchsorted(self.primes, math.ceil(lo), side="left")
        j = np.searchsorted(self.primes, math.floor(hi), side="right")
        return self.primes[i:j]

    def is_prime(self, n: int) -> bool:
        self.check(n)
        return n >= 2 and int(self.smallest_factor[n]) == n

    def prime_power_split(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """Arrays ``(ppow, cof)`` of length ``N+1``.

        For ``n >= 2`` with least prime ``p``, ``ppow[n] = p**nu_p(n)`` and
        ``cof[n] = n // ppow[n]``; index 1 maps to ``(1, 1)``.  Cached.
        """
        self.check(N, "range end")
        with self._lock:
            if self._split is not None and len(self._split[0]) > N:
                ppow, cof = self._split
                return ppow[: N + 1], cof[: N + 1]
            n = np.arange(N + 1, dtype=np.int64)
            lpf = self.smallest_factor[: N + 1].astype(np.int64)
            ppow = lpf.copy()
            ppow[0] = 1
            cof = np.ones(N + 1, dtype=np.int64)
            cof[2:] = n[2:] // lpf[2:]
            idx = np.arange(2, N + 1, dtype=np.int64)
            while idx.size:
                c = cof[idx]
                idx = idx[(c > 1) & (lpf[c] == lpf[idx])]
                ppow[idx] *= lpf[idx]
                cof[idx] //= lpf[idx]
            ppow.setflags(write=False)
            cof.setflags(write=False)
            self._split = (ppow, cof)
            return ppow, cof

    def prime_powers(self, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All prime powers ``q = p**k <= N`` (k >= 1), sorted: ``(q, p, k)``."""
        self.check(N, "range end")
        qs, ps, ks = [], [], []
        primes = self.primes[self.primes <= N]
        pw = primes.copy()
        k = 1
        while pw.size:
            qs.append(pw)
            ps.append(primes)
            ks.append(np.full(pw.size, k, dtype=np.int64))
            keep = pw <= N // primes
            primes = primes[keep]
            pw = pw[keep] * primes
            k += 1
        q = np.concatenate(qs)
        order = np.argsort(q, kind="stable")
        return q[order], np.concatenate(ps)[order], np.concatenate(ks)[order]


def sieve(limit: int, max_limit: Optional[int] = None) -> PrimeTable:
    """Build a :class:`PrimeTable` covering ``[1, limit]``."""
    return PrimeTable(limit, max_limit=max_limit)


def factorize(n: int, table: PrimeTable) -> Factorization:
    if n < 1:
        raise ArgumentError("factorize needs n >= 1")
    table.check(n)
    lpf = table.smallest_factor
    parts = []
    m = int(n)
    while m > 1:
        p = int(lpf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        parts.append((p, e))
    return Factorization(int(n), tuple(parts))


def valuation(n: int, p: int) -> int:
    """Largest ``b`` with ``p**b | n``."""
    if n < 1:
        raise ArgumentError("valuation needs n >= 1")
    b = 0
    while n % p == 0:
        n //= p
        b += 1
    return b


def trial_division_primes(limit: int) -> list[int]:
    """Independent slow oracle for the sieve."""
    return [n for n in range(2, limit + 1) if all(n % d for d in range(2, math.isqrt(n) + 1))]


def prime_reciprocal_sum(
    table: PrimeTable,
    lo: float,
    hi: float,
    weight: Optional[Callable] = None,
    vectorized: bool = False,
) -> float:
    """``sum weight(p)/p`` over primes ``lo <= p <= hi``.

    ``weight=None`` means weight 1.  With ``vectorized=True`` the weight is
    called once on the array of primes.  Summation is correctly rounded
    (``math.fsum``), so the result does not depend on how callers partition
    the range.
    """
    if lo < 2 or lo > hi:
        raise ArgumentError(f"need 2 <= lo <= hi, got lo={lo}, hi={hi}")
    ps = table.primes_between(lo, hi)
    if weight is None:
        terms = 1.0 / ps
    elif vectorized:
        terms = np.asarray(weight(ps), dtype=float) / ps
    else:
        terms = [float(weight(int(p))) / int(p) for p in ps]
    return math.fsum(terms)


def divisors(n: int) -> list[int]:
    """Sorted divisors of a small integer by trial division."""
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def factor_small(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization for small moduli (no table needed)."""
    parts = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            parts.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        parts.append((n, 1))
    return parts


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factor_small(n):
        out = out // p * (p - 1)
    return out


def spec_of(n: int) -> frozenset[int]:
    """Set of primes dividing ``n``."""
    return frozenset(p for p, _ in factor_small(n))
