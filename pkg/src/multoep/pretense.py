"""Pretentious distances and aperiodicity functionals.

All prime sums run over ascending primes and are reduced with ``math.fsum``.
When both values at a prime are exact roots of unity, the term is computed
from the exact phase difference, so a term that vanishes mathematically is
exactly zero.  Scans over ``t`` are grid scans: the reported minima are
upper bounds for the true infima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arith import PrimeTable, spec_of
from .characters import DirichletCharacter, characters_up_to
from .errors import ArgumentError, UnsupportedError
from .multfun import MAX_EXACT_DENOMINATOR, MultFunction, archimedean, from_character, is_exact, prime_array, product
from .series import ScanSeries

DEFAULT_Q = 12
DEFAULT_WINDOW = 20.0
DEFAULT_ETAS = (0.3, 0.5, 0.7)


@dataclass
class PrimeValues:
    """``f(p)`` on the primes up to ``X``; exact phases over ``den`` when available."""

    primes: np.ndarray
    values: np.ndarray
    num: Optional[np.ndarray] = None  # -1 encodes 0
    den: int = 1

    def upto(self, X: float) -> "PrimeValues":
        j = int(np.searchsorted(self.primes, math.floor(X), side="right"))
        num = None if self.num is None else self.num[:j]
        return PrimeValues(self.primes[:j], self.values[:j], num, self.den)


def prime_values(f: MultFunction, X: float, table: PrimeTable) -> PrimeValues:
    """Values of ``f`` at primes ``p <= X`` (cached on ``f``)."""
    table.check(int(X), "cutoff")
    cache = getattr(f, "_pv", None)
    if cache is not None and cache.limit == table.limit and cache.X >= X:
        return cache.upto(X)
    ps = table.primes_between(2, X)
    arr = prime_array(f, ps)
    cv, num, den = arr.values, arr.num, arr.den
    out = PrimeValues(ps, cv, num, den)
    out.X, out.limit = X, table.limit
    f._pv = out
    return out


def _pair_terms(a: PrimeValues, b: PrimeValues) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of ``1 - a(p) conj(b(p))``, exact where possible."""
    z = a.values * np.conj(b.values)
    re = 1.0 - z.real
    im = -z.imag
    if a.num is not None and b.num is not None:
        L = a.den * b.den // math.gcd(a.den, b.den)
        if L <= MAX_EXACT_DENOMINATOR:
            zero = (a.num < 0) | (b.num < 0)
            k = (a.num * (L // a.den) - b.num * (L // b.den)) % L
            ang = 2 * np.pi * (k / L)
            re = np.where(zero, 1.0, 1.0 - np.cos(ang))
            im = np.where(zero, 0.0, -np.sin(ang))
            same = (~zero) & (k == 0)
            re[same] = 0.0
            im[same] = 0.0
            half = (~zero) & (2 * k == L)
            re[half] = 2.0
            im[half] = 0.0
    return re, im


def _check_range(x, y, table):
    if x < 2 or x > y:
        raise ArgumentError(f"need 2 <= x <= y, got x={x}, y={y}")
    table.check(int(math.floor(y)), "cutoff")


def distance_squared(f: MultFunction, g: MultFunction, X: float, table: PrimeTable) -> float:
    """``sum_{p <= X} (1 - Re f(p) conj g(p)) / p``."""
    _check_range(2, X, table)
    a, b = prime_values(f, X, table), prime_values(g, X, table)
    re, _ = _pair_terms(a, b)
    return math.fsum(re / a.primes)


def windowed_distance(f: MultFunction, g: MultFunction, x: float, y: float, table: PrimeTable) -> float:
    """``sum_{x <= p < y} (1 - Re f(p) conj g(p)) / p``."""
    _check_range(x, y, table)
    a, b = prime_values(f, y, table), prime_values(g, y, table)
    re, _ = _pair_terms(a, b)
    i = int(np.searchsorted(a.primes, math.ceil(x), side="left"))
    j = int(np.searchsorted(a.primes, y, side="left"))
    return math.fsum(re[i:j] / a.primes[i:j])


@dataclass
class DistanceCurve:
    f_label: str
    g_label: str
    cutoffs: list
    partial: list

    def series(self) -> ScanSeries:
        return ScanSeries("X", list(zip(self.cutoffs, self.partial)), {"f": self.f_label, "g": self.g_label})


def distance_curve(f: MultFunction, g: MultFunction, cutoffs, table: PrimeTable) -> DistanceCurve:
    cutoffs = sorted(float(x) for x in cutoffs)
    top = cutoffs[-1]
    _check_range(2, top, table)
    a, b = prime_values(f, top, table), prime_values(g, top, table)
    re, _ = _pair_terms(a, b)
    terms = re / a.primes
    out = []
    for X in cutoffs:
        j = int(np.searchsorted(a.primes, math.floor(X), side="right"))
        out.append(math.fsum(terms[:j]))
    return DistanceCurve(f.label, g.label, cutoffs, out)


# -- convergence diagnostics ---------------------------------------------------
def mlok_partial_sums(f: MultFunction, chi: DirichletCharacter, cutoffs, table: PrimeTable, X0: Optional[float] = None) -> ScanSeries:
    """``S(X) = sum_{p <= X} (1 - f(p) conj chi(p)) / p`` with a Cauchy drift.

    ``drift`` is the largest ``|S(X') - S(X'')|`` over cutoffs ``>= X0``
    (default: the first cutoff).  A finite cutoff list can only suggest
    convergence.
    """
    cutoffs = sorted(float(x) for x in cutoffs)
    top = cutoffs[-1]
    _check_range(2, top, table)
    a = prime_values(f, top, table)
    b = prime_values(from_character(chi), top, table)
    re, im = _pair_terms(a, b)
    tr, ti = re / a.primes, im / a.primes
    pts = []
    for X in cutoffs:
        j = int(np.searchsorted(a.primes, math.floor(X), side="right"))
        pts.append((X, complex(math.fsum(tr[:j]), math.fsum(ti[:j]))))
    X0 = cutoffs[0] if X0 is None else X0
    tail = [s for X, s in pts if X >= X0]
    drift = max((abs(u - v) for u in tail for v in tail), default=0.0)
    return ScanSeries("X", pts, {"f": f.label, "chi": chi.label, "X0": X0, "drift": drift})


def certificate_threshold(f: MultFunction) -> int:
    """``max(F u spec(d))`` for a certified function (1 if empty)."""
    c = f.certificate
    if c is None:
        raise UnsupportedError(f"{f.label} carries no Toeplitz certificate")
    return max(set(c.F) | spec_of(c.chi.modulus), default=1)


def mlok1_sum(f: MultFunction, chi: DirichletCharacter, X: float, table: PrimeTable) -> float:
    """``sum_{p <= X, f(p) != chi(p)} 1/p`` with exact comparisons."""
    _check_range(2, X, table)
    ps = table.primes_between(2, X)
    m = chi.modulus
    terms = []
    for p in ps:
        p = int(p)
        v = f.pp(p, 1)
        if not is_exact(v):
            raise UnsupportedError(f"{f.label}({p}) is approximate; the inequality is not decidable")
        if v != chi(p % m):
            terms.append(1.0 / p)
    return math.fsum(terms)


# -- aperiodicity scans ----------------------------------------------------------
@dataclass
class AperiodicityScan:
    X: float
    t_grid: tuple  # (lo, hi, step)
    Q: int
    chars: list  # labels
    values: np.ndarray  # shape (len(ts), len(chars))
    ts: np.ndarray
    min_value: float
    argmin: tuple  # (t, char label, modulus)
    value_at_origin: float  # t = 0, principal character mod 1
    refined: bool = True
    upper_bound: bool = True
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "X": self.X,
            "t_grid": list(self.t_grid),
            "Q": self.Q,
            "n_t": int(len(self.ts)),
            "n_chars": len(self.chars),
            "min_value": self.min_value,
            "argmin": {"t": self.argmin[0], "chi": self.argmin[1], "modulus": self.argmin[2]},
            "value_at_origin": self.value_at_origin,
            "upper_bound": self.upper_bound,
            **self.extra,
        }

    def rows(self):
        """``(t, chi label, value)`` triples of the grid."""
        for i, t in enumerate(self.ts):
            for j, c in enumerate(self.chars):
                yield float(t), c, float(self.values[i, j])


def _point_value(S1, a_chi, logp, t) -> float:
    z = a_chi * np.exp(1j * t * logp)
    return S1 - math.fsum(z.real)


def strong_aperiodicity_scan(
    f: MultFunction,
    X: float,
    table: PrimeTable,
    Q: int = DEFAULT_Q,
    t_range: Optional[tuple] = None,
    t_step: Optional[float] = None,
    window: float = DEFAULT_WINDOW,
    refine: bool = True,
    chunk: int = 32,
) -> AperiodicityScan:
    """Grid minimum of ``sum_{p <= X} (1 - Re f(p) chi(p) p^(it)) / p``.

    ``t`` runs over multiples of ``t_step`` (default ``pi / (2 log X)``) in
    ``t_range`` (default ``[-min(X, window), min(X, window)]``), and ``chi``
    over every character of modulus ``<= Q``.  The best few grid points are
    refined on a 16x finer local grid.
    """
    _check_range(2, X, table)
    if Q < 1:
        raise ArgumentError("Q must be positive")
    pv = prime_values(f, X, table)
    ps = pv.primes
    logp = np.log(ps.astype(float))
    inv = 1.0 / ps
    S1 = math.fsum(inv)
    chars = characters_up_to(Q)
    C = np.stack([c.complex_table[ps % c.modulus] for c in chars], axis=1)
    A = (pv.values * inv)[:, None] * C
    step = float(t_step) if t_step else math.pi / (2 * math.log(X))
    if t_range is None:
        w = min(float(X), float(window))
        t_range = (-w, w)
    lo, hi = float(t_range[0]), float(t_range[1])
    if lo > hi:
        raise ArgumentError("empty t range")
    ks = np.arange(math.ceil(lo / step - 1e-9), math.floor(hi / step + 1e-9) + 1)
    ts = ks * step
    vals = np.empty((len(ts), len(chars)))
    for i in range(0, len(ts), chunk):
        E = np.exp(1j * np.outer(ts[i : i + chunk], logp))
        vals[i : i + chunk] = S1 - (E @ A).real
    j0 = 0  # principal mod 1 comes first
    at_origin = _point_value(S1, A[:, j0], logp, 0.0)
    flat = np.argsort(vals, axis=None, kind="stable")[:5]
    best = (float(vals.flat[flat[0]]), float(ts[flat[0] // len(chars)]), int(flat[0] % len(chars)))
    if refine:
        for idx in flat:
            i, j = divmod(int(idx), len(chars))
            for tt in ts[i] + step * np.arange(-16, 17) / 16:
                if lo <= tt <= hi:
                    v = _point_value(S1, A[:, j], logp, float(tt))
                    if v < best[0]:
                        best = (v, float(tt), j)
    if at_origin < best[0]:
        best = (at_origin, 0.0, j0)
    c = chars[best[2]]
    return AperiodicityScan(
        X=float(X),
        t_grid=(lo, hi, step),
        Q=Q,
        chars=[ch.label for ch in chars],
        values=vals,
        ts=ts,
        min_value=best[0],
        argmin=(best[1], c.label, c.modulus),
        value_at_origin=at_origin,
        refined=refine,
    )


def moderate_aperiodicity_scan(f: MultFunction, X: float, table: PrimeTable, A: float = 1.0, t_step=None, window: float = DEFAULT_WINDOW, q_cap: int = 30) -> AperiodicityScan:
    """Scan with ``|t| <= min(X^A, window)`` and moduli ``q <= min((log X)^A, q_cap)``."""
    Q = max(1, min(int(math.log(X) ** A), q_cap))
    w = min(X**A, window)
    sc = strong_aperiodicity_scan(f, X, table, Q=Q, t_range=(-w, w), t_step=t_step)
    sc.extra = {"A": A, "normalized": sc.min_value / math.log(math.log(X)), "q_bound": Q, "t_bound": w}
    return sc


def moderate_aperiodicity_value(f: MultFunction, X: float, table: PrimeTable, A: float = 1.0, t_step=None, window: float = DEFAULT_WINDOW, q_cap: int = 30) -> float:
    """Grid minimum divided by ``log log X`` (an upper bound for the normalized infimum)."""
    return moderate_aperiodicity_scan(f, X, table, A, t_step, window, q_cap).extra["normalized"]


def kmt_window_check(f: MultFunction, X: float, eta: float, t: float, chi: DirichletCharacter, table: PrimeTable) -> float:
    """``D(f, chi n^(it); X^eta, X)^2``."""
    if not 0 < eta < 1:
        raise ArgumentError("eta must lie in (0, 1)")
    x = X**eta
    if x < 2:
        raise ArgumentError("X^eta must be at least 2")
    g = product(from_character(chi), archimedean(t)) if t else from_character(chi)
    return windowed_distance(f, g, x, X, table)


@dataclass
class IntervalSum:
    r: int
    lo: float
    hi: float
    n_primes: int
    total: float
    min_cos: float


def interval_bounds(t: float, r: int) -> tuple[float, float]:
    """Log-endpoints of ``I_r = [e^(4pi/3t + 2pi r/t), e^(8pi/3t + 2pi r/t)]`` (using ``|t|``)."""
    t = abs(t)
    return 4 * math.pi / (3 * t) + 2 * math.pi * r / t, 8 * math.pi / (3 * t) + 2 * math.pi * r / t


def j_interval_bounds(t: float, r: int) -> tuple[float, float]:
    t = abs(t)
    return 2 * math.pi / (3 * t) + 2 * math.pi * r / t, 4 * math.pi / (3 * t) + 2 * math.pi * r / t


def interval_sums(t: float, r_range, table: PrimeTable) -> list[IntervalSum]:
    """``sum_{p in I_r} (1 + cos(t log p)) / p`` for each reachable ``r``."""
    if t == 0:
        raise ArgumentError("t must be nonzero")
    out = []
    for r in r_range:
        a, b = interval_bounds(t, r)
        lo, hi = math.exp(a), math.exp(b)
        if hi > table.limit:
            continue
        ps = table.primes_between(max(2.0, lo), hi)
        ps = ps[(np.log(ps.astype(float)) >= a) & (np.log(ps.astype(float)) <= b)]
        c = np.cos(t * np.log(ps.astype(float)))
        out.append(IntervalSum(int(r), lo, hi, int(ps.size), math.fsum((1 + c) / ps), float(c.min()) if ps.size else 1.0))
    if not out:
        raise ArgumentError(f"no interval I_r with r in {list(r_range)} fits below {table.limit}")
    return out
