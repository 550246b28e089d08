"""Finite-N estimators of dynamical statistics of multiplicative functions.

Every estimator replaces a limit by an average over ``n = 1..N``; none of
the returned numbers is a limit.  Long arrays are reduced with numpy's
pairwise summation (deterministic for a given array); per-chunk or per-shift
partial results are combined in index order with ``math.fsum``, so the
thread count never changes a result.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arith import PrimeTable, spec_of
from .characters import DirichletCharacter
from .errors import ArgumentError
from .multfun import MultFunction, evaluate_range, conj
from .series import ScanSeries


def _values(f, N: int, table: Optional[PrimeTable]) -> np.ndarray:
    """Complex values at ``0..N`` (index 0 is 0) from a function or an array."""
    if isinstance(f, MultFunction):
        return evaluate_range(f, N, table).values
    arr = np.asarray(f, dtype=complex)
    if arr.size < N + 1:
        raise ArgumentError(f"array of length {arr.size} does not cover 0..{N}")
    return arr


def csum(z) -> complex:
    z = np.asarray(z, dtype=complex)
    return complex(np.sum(z.real), np.sum(z.imag))


# -- means and correlations ------------------------------------------------------
def mean(f, N: int, table: Optional[PrimeTable] = None) -> complex:
    """``(1/N) sum_{n=1}^{N} f(n)``."""
    v = _values(f, N, table)
    return csum(v[1 : N + 1]) / N


def mean_progression(f, a: int, r: int, N: int, table: Optional[PrimeTable] = None) -> complex:
    """``(1/N) sum f(a n + r)`` over ``n = 0..N-1`` (``n = 1..N`` when ``r = 0``)."""
    if a < 1 or r < 0:
        raise ArgumentError("need a >= 1 and r >= 0")
    start = r if r > 0 else a
    top = start + a * (N - 1)
    v = _values(f, top, table)
    return csum(v[start : top + 1 : a]) / N


@dataclass(frozen=True)
class CorrelationSpec:
    """``prod_j g_j(n + b_j)`` with ``g_j = f^(a_j)``, conjugated where flagged."""

    shifts: tuple
    powers: tuple = ()
    conjugate: tuple = ()

    def __post_init__(self):
        k = len(self.shifts)
        if k < 1:
            raise ArgumentError("a correlation needs at least one factor")
        if any(b < 0 for b in self.shifts) or any(y <= x for x, y in zip(self.shifts, self.shifts[1:])):
            raise ArgumentError("shifts must be nonnegative and strictly increasing")
        object.__setattr__(self, "shifts", tuple(int(b) for b in self.shifts))
        object.__setattr__(self, "powers", tuple(int(a) for a in (self.powers or (1,) * k)))
        object.__setattr__(self, "conjugate", tuple(bool(c) for c in (self.conjugate or (False,) * k)))
        if len(self.powers) != k or len(self.conjugate) != k or any(a < 1 for a in self.powers):
            raise ArgumentError("powers (>= 1) and conjugation flags must match the shifts")

    def to_json(self) -> dict:
        return {"shifts": list(self.shifts), "powers": list(self.powers), "conjugate": list(self.conjugate)}


def correlation(f, spec: CorrelationSpec, N: int, table: Optional[PrimeTable] = None) -> complex:
    """``(1/N) sum_{n=1}^{N} prod_j g_j(n + b_j)``.

    ``f`` may be a list of functions, one per factor.
    """
    fs = list(f) if isinstance(f, (list, tuple)) else [f] * len(spec.shifts)
    if len(fs) != len(spec.shifts):
        raise ArgumentError("one function per factor expected")
    top = N + spec.shifts[-1]
    acc = None
    for fj, b, a, c in zip(fs, spec.shifts, spec.powers, spec.conjugate):
        v = _values(fj, top, table)[1 + b : N + 1 + b]
        if a != 1:
            v = v**a
        if c:
            v = np.conj(v)
        acc = v.copy() if acc is None else acc * v
    return csum(acc) / N


@dataclass
class NonconvergenceReport:
    N_list: list
    values: list
    diagnostic: float
    note: str = "finitely many N sampled; a small value is consistent with, not a proof of, convergence"

    def to_json(self) -> dict:
        return {
            "N": self.N_list,
            "values": [[z.real, z.imag] for z in self.values],
            "diagnostic": self.diagnostic,
            "note": self.note,
        }


def nonconvergence_diagnostic(f, spec: CorrelationSpec, N_list, table: Optional[PrimeTable] = None) -> NonconvergenceReport:
    """Largest pairwise distance among correlation values at the given ``N``."""
    N_list = [int(n) for n in N_list]
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ArgumentError("N_list must be strictly increasing")
    vals = [correlation(f, spec, n, table) for n in N_list]
    diag = max((abs(u - v) for u in vals for v in vals), default=0.0)
    return NonconvergenceReport(N_list, vals, diag)


def spectral_coefficient(f, k: int, N: int, table: Optional[PrimeTable] = None, auto: bool = False) -> complex:
    """``(1/N) sum f(n) f(n+k)``, or ``(1/N) sum f(n) conj f(n+k)`` with ``auto``."""
    k = int(k)
    lo = 1 if k >= 0 else 1 - k  # keep n + k >= 1
    v = _values(f, lo + N - 1 + max(k, 0), table)
    a = v[lo : lo + N]
    b = v[lo + k : lo + k + N]
    z = a * (np.conj(b) if auto else b)
    return csum(z) / N


# -- GHK seminorm estimators ---------------------------------------------------------
@dataclass
class SeminormEstimate:
    value: float
    power_mean: float  # the averaged quantity before the root (u1: square, u2: fourth power)
    N: int
    H: int
    terms: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"value": self.value, "power_mean": self.power_mean, "N": self.N, "H": self.H}


def ghk_u1_estimate(f, N: int, H: int, table: Optional[PrimeTable] = None) -> SeminormEstimate:
    """``u1^2 = (1/H) sum_{h=1}^{H} Re (1/N) sum f(n) conj f(n+h)``."""
    v = _values(f, N + H, table)
    terms = [spectral_coefficient(v, h, N, auto=True) for h in range(1, H + 1)]
    sq = math.fsum(z.real for z in terms) / H
    return SeminormEstimate(math.sqrt(max(sq, 0.0)), sq, N, H, terms)


def ghk_u1(f, N: int, H: int, table: Optional[PrimeTable] = None) -> float:
    return ghk_u1_estimate(f, N, H, table).value


def _u1_sq_of(g: np.ndarray, N: int, H: int) -> float:
    """``(1/H) sum_{h'=1}^{H} Re (1/N) sum_n g(n) conj g(n+h')`` by window sums."""
    c = np.concatenate(([0], np.cumsum(g)))
    # W(n) = sum_{h'=1}^{H} g(n+h') for n = 0..N-1 (array index, position n+1)
    W = c[H + 1 : N + H + 1] - c[1 : N + 1]
    z = g[:N] * np.conj(W)
    return float(np.sum(z.real)) / (N * H)


def ghk_u2_estimate(f, N: int, H: int, table: Optional[PrimeTable] = None, threads: int = 1) -> SeminormEstimate:
    """``u2^4 = (1/H) sum_h ||g_h||_{u1}^2`` with ``g_h(n) = f(n+h) conj f(n)``.

    Both inner averages use the same ``N``; per-``h`` results are combined
    in index order, so the thread count does not change the result.
    """
    v = _values(f, N + 2 * H, table)
    base = v[1 : N + H + 1]

    def one(h):
        g = v[1 + h : N + H + 1 + h] * np.conj(base)
        return _u1_sq_of(g, N, H)

    hs = range(1, H + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            terms = list(ex.map(one, hs))
    else:
        terms = [one(h) for h in hs]
    q = math.fsum(terms) / H
    return SeminormEstimate(max(q, 0.0) ** 0.25, q, N, H, terms)


def ghk_u2(f, N: int, H: int, table: Optional[PrimeTable] = None, threads: int = 1) -> float:
    return ghk_u2_estimate(f, N, H, table, threads).value


# -- Besicovitch / RAP errors -----------------------------------------------------------
def _weiszfeld(P: np.ndarray, W: np.ndarray, tol: float = 1e-13, iters: int = 3000) -> np.ndarray:
    """Weighted geometric medians of the rows of ``P`` (weights ``W``, 0 = absent).

    Vardi-Zhang modification of the Weiszfeld step, so an iterate sitting on
    a heavy data point still moves (or correctly stays).
    """
    tot = W.sum(axis=1)
    c = (P * W).sum(axis=1) / np.where(tot > 0, tot, 1)
    act = np.arange(c.size)  # rows still moving
    for _ in range(iters):
        if act.size == 0:
            break
        Pa, Wa, ca = P[act], W[act], c[act]
        diff = Pa - ca[:, None]
        d = np.abs(diff)
        hit = d < 1e-14
        eta = np.where(hit, Wa, 0.0).sum(axis=1)
        inv = np.where(hit, 0.0, Wa / np.where(hit, 1.0, d))
        s = inv.sum(axis=1)
        ok = s > 0
        T = np.where(ok, (Pa * inv).sum(axis=1) / np.where(ok, s, 1), ca)
        r = np.abs((diff * inv).sum(axis=1))
        beta = np.where(eta > 0, np.minimum(1.0, eta / np.where(r > 0, r, 1.0)), 0.0)
        beta = np.where((eta > 0) & (r == 0), 1.0, beta)
        new = (1 - beta) * T + beta * ca
        step = np.abs(new - ca)
        c[act] = new
        act = act[step >= tol]
    return c


def _cost(P, W, c):
    return (W * np.abs(P - c[:, None])).sum(axis=1)


def _class_medians(P: np.ndarray, W: np.ndarray) -> np.ndarray:
    c = _weiszfeld(P, W)
    best = _cost(P, W, c)
    if P.shape[1] <= 64:
        # candidates at the data points themselves (where Weiszfeld stalls)
        for j in range(P.shape[1]):
            cj = P[:, j]
            cost = _cost(P, W, cj)
            better = (W[:, j] > 0) & (cost < best)
            c = np.where(better, cj, c)
            best = np.where(better, cost, best)
    return c


def rap_error(f, q: int, N: int, table: Optional[PrimeTable] = None) -> float:
    """``min over q-periodic g of (1/N) sum_{n<=N} |f(n) - g(n)|``.

    The optimal ``g`` takes, on each residue class, the geometric median of
    the class's values.
    """
    if q < 1 or q > N // 10:
        raise ArgumentError(f"need 1 <= q <= N/10, got q={q}, N={N}")
    seq = evaluate_range(f, N, table) if isinstance(f, MultFunction) else None
    v = _values(f, N, table)[1 : N + 1]
    cls = np.arange(N) % q  # class of position n = index + 1 is (n-1) % q
    if seq is not None and seq.phase is not None:
        codes, inv = np.unique(seq.phase[1 : N + 1], return_inverse=True)
        if codes.size <= 512:
            S = codes.size
            counts = np.bincount(cls * S + inv, minlength=q * S).reshape(q, S).astype(float)
            pts = np.array([complex(v[np.flatnonzero(inv == s)[0]]) for s in range(S)])
            P = np.broadcast_to(pts, (q, S)).copy()
            c = _class_medians(P, counts)
            return math.fsum(_cost(P, counts, c)) / N
    L = -(-N // q)
    P = np.zeros(q * L, dtype=complex)
    Wt = np.zeros(q * L)
    P[:N] = v
    Wt[:N] = 1.0
    P = P.reshape(L, q).T.copy()
    Wt = Wt.reshape(L, q).T.copy()
    c = _class_medians(P, Wt) if L <= 64 else _weiszfeld(P, Wt)
    return math.fsum(_cost(P, Wt, c)) / N


def best_rap_error(f, q_list, N: int, table: Optional[PrimeTable] = None) -> tuple[int, float]:
    best = None
    for q in q_list:
        e = rap_error(f, q, N, table)
        if best is None or e < best[1]:
            best = (int(q), e)
    return best


# -- local factors ----------------------------------------------------------------------
@dataclass
class LocalFactors:
    value: complex
    excluded: list
    max_tail_bound: float
    n_factors: int
    max_factor_abs: float
    factors: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "excluded": self.excluded,
            "max_tail_bound": self.max_tail_bound,
            "n_factors": self.n_factors,
            "max_factor_abs": self.max_factor_abs,
        }


def local_factor(f: MultFunction, chi: DirichletCharacter, p: int, limit: int) -> tuple[complex, float]:
    """``1 - 2/p + (1 - 1/p) 2 sum_{j>=1, p^j <= limit} F(p^j)/p^j`` and its tail bound."""
    m = chi.modulus
    terms = []
    j, pj = 1, p
    while pj <= limit:
        F = complex(f.pp(p, j)) * complex(conj(chi(pow(p, j, m))))
        terms.append(F / pj)
        j += 1
        pj *= p
    s = csum(np.array(terms)) if terms else 0j
    tail = 2.0 / (pj * (1 - 1 / p))
    return 1 - 2 / p + (1 - 1 / p) * 2 * s, tail


def local_factor_product(f: MultFunction, chi: DirichletCharacter, a: int, P: int, table: PrimeTable) -> LocalFactors:
    """Product of local factors over primes ``p <= P`` coprime to ``a * modulus``."""
    if a < 1:
        raise ArgumentError("shift a must be positive")
    table.check(P, "prime cutoff")
    bad = spec_of(a * chi.modulus)
    prod = 1 + 0j
    excluded, factors = [], []
    tail_max, fmax = 0.0, 0.0
    for p in table.primes_between(2, P):
        p = int(p)
        if p in bad:
            excluded.append(p)
            continue
        Mp, tail = local_factor(f, chi, p, table.limit)
        factors.append((p, Mp))
        prod *= Mp
        tail_max = max(tail_max, tail)
        fmax = max(fmax, abs(Mp))
    return LocalFactors(prod, excluded, tail_max, len(factors), fmax, factors)


# -- local 1-Fourier uniformity -----------------------------------------------------------
@dataclass
class L1FUEstimate:
    value: float
    M: int
    H: int
    grid: int
    sup_upper_factor: float  # true sup <= grid sup * this factor (Bernstein)

    def to_json(self) -> dict:
        return {"value": self.value, "M": self.M, "H": self.H, "grid": self.grid, "sup_upper_factor": self.sup_upper_factor}


def l1fu_estimate(f, M: int, H: int, grid: Optional[int] = None, table: Optional[PrimeTable] = None, chunk: int = 256, threads: int = 1) -> L1FUEstimate:
    """``(1/M) sum_{m=1}^{M} max_alpha |(1/H) sum_{h<H} f(m+h) e(h alpha)|`` on a grid.

    ``alpha`` runs over ``grid >= 4H`` equispaced points, so each inner value
    is a lower bound for the true supremum.
    """
    G = int(grid) if grid else 4 * H
    if G < 4 * H:
        raise ArgumentError("alpha grid must have at least 4H points")
    v = _values(f, M + H - 1, table)
    win = np.lib.stride_tricks.sliding_window_view(v[1 : M + H], H)

    def block(i):
        X = np.fft.ifft(win[i : i + chunk], n=G, axis=1) * (G / H)
        return np.abs(X).max(axis=1)

    starts = range(0, M, chunk)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(block, starts))
    else:
        parts = [block(i) for i in starts]
    sups = np.concatenate(parts)
    ratio = math.pi * (H - 1) / G
    factor = 1 / (1 - ratio) if ratio < 1 else math.inf
    return L1FUEstimate(math.fsum(sups) / M, M, H, G, factor)


def random_signs(N: int, seed: int) -> np.ndarray:
    """Random +-1 control sequence at positions ``0..N`` (index 0 is 0)."""
    rng = np.random.default_rng(seed)
    out = np.zeros(N + 1, dtype=complex)
    out[1:] = rng.choice([-1.0, 1.0], size=N)
    return out


def series_over(param: str, xs, fn) -> ScanSeries:
    """Evaluate ``fn`` at each parameter value into a :class:`ScanSeries`."""
    xs = sorted(xs)
    return ScanSeries(param, [(x, fn(x)) for x in xs])
