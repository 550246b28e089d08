"""Period analysis: Per_m sets, skeletons, period structures and classifiers.

Two kinds of statements are kept apart everywhere:

* *certified*: follows from the algebra of a :class:`ToeplitzCertificate`
  (the explicit period ``T(n) = d * prod_{p in F} p^(nu_p(n)+1)`` holds for
  every shift, not only on the truncation);
* *verified*: checked on the truncation ``[1, N]`` only.

A refutation is always a concrete pair of positions, so "refuted" results are
exact whichever way they were found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arith import PrimeTable, factor_small, spec_of, valuation
from .characters import DirichletCharacter, conductor, induce, ONE
from .errors import ArgumentError, ClassificationError, InconclusiveError, UnsupportedError
from .multfun import MultFunction, Sequence, evaluate_range, geometric, modify_at_primes, values_equal

DEFAULT_BOUND = 12
DEFAULT_P = 64
DEFAULT_K = 256
HOLE = -2


def _seq(f, N: int, table: PrimeTable) -> Sequence:
    if isinstance(f, Sequence):
        return f.head(N) if f.N > N else f
    return evaluate_range(f, N, table)


# -- single periods ----------------------------------------------------------
@dataclass
class PeriodCheck:
    verified: bool
    witness: Optional[int] = None  # least failing shift s
    compared: int = 0  # number of other positions n' = n (mod m) in [1, N]

    @property
    def vacuous(self) -> bool:
        return self.compared == 0


def _period_check(seq: Sequence, n: int, m: int) -> PeriodCheck:
    N = seq.N
    start = (n - 1) % m + 1
    if seq.phase is not None:
        eq = seq.phase[start::m] == seq.phase[n]
    else:
        eq = np.abs(seq.values[start::m] - seq.values[n]) <= 1e-9
    bad = np.flatnonzero(~eq)
    compared = eq.size - 1
    if bad.size:
        return PeriodCheck(False, int((start + bad[0] * m - n) // m), compared)
    return PeriodCheck(True, None, compared)


def is_period_at(f, n: int, m: int, N: int, table: PrimeTable) -> PeriodCheck:
    """Check ``f(n') = f(n)`` for every ``n' = n (mod m)`` in ``[1, N]``.

    A refutation reports the least shift ``s`` with ``f(n + s*m) != f(n)``.
    """
    if not 1 <= n <= N:
        raise ArgumentError(f"position {n} outside [1, {N}]")
    if m < 1:
        raise ArgumentError("period must be positive")
    return _period_check(_seq(f, N, table), n, m)


def certified_period(f: MultFunction, n: int) -> int:
    """``T(n) = d * prod_{p in F} p^(nu_p(n)+1)``; a period of ``n`` for all shifts."""
    cert = getattr(f, "certificate", None)
    if cert is None:
        raise UnsupportedError(f"{f.label} carries no Toeplitz certificate")
    T = cert.chi.modulus
    for p in sorted(cert.F):
        T *= p ** (valuation(n, p) + 1)
    return T


def certified_periods(f: MultFunction, N: int) -> np.ndarray:
    """Vector of ``T(n)`` for ``n = 0..N`` (index 0 unused); Python ints if large."""
    cert = f.certificate
    if cert is None:
        raise UnsupportedError(f"{f.label} carries no Toeplitz certificate")
    n = np.arange(N + 1, dtype=np.int64)
    n[0] = 1
    T = np.full(N + 1, cert.chi.modulus, dtype=object)
    for p in sorted(cert.F):
        v = np.zeros(N + 1, dtype=np.int64)
        m = n.copy()
        live = np.flatnonzero(m % p == 0)
        while live.size:
            v[live] += 1
            m[live] //= p
            live = live[m[live] % p == 0]
        T = T * np.array([p**int(e + 1) for e in range(int(v.max()) + 1)], dtype=object)[v]
    return T


# -- skeletons ---------------------------------------------------------------
@dataclass
class SkeletonView:
    """``filled[r-1]`` tells whether class ``r`` mod ``m`` is constant on ``[1, N]``."""

    m: int
    N: int
    filled: np.ndarray
    symbols: np.ndarray  # phase code (or index into values) per class, HOLE if not filled
    values: list

    def classes(self):
        """Per class ``r = 1..m``: the common value, or None for a hole."""
        return [self.values[r] if self.filled[r] else None for r in range(self.m)]


def skeleton(f, m: int, N: int, table: Optional[PrimeTable] = None) -> SkeletonView:
    seq = _seq(f, N, table)
    N = seq.N
    if m < 1 or m > N:
        raise ArgumentError(f"skeleton modulus {m} must lie in [1, {N}]")
    n = np.arange(1, N + 1)
    rep = (n - 1) % m + 1
    if seq.phase is not None:
        codes = seq.phase
        mism = codes[1:] != codes[rep]
    else:
        codes = None
        mism = np.abs(seq.values[1:] - seq.values[rep]) > 1e-9
    bad = np.bincount(rep[mism] - 1, minlength=m)
    filled = bad == 0
    if codes is not None:
        symbols = np.where(filled, codes[1 : m + 1], HOLE)
    else:
        # symbol ids for approximate values: cluster by rounding
        keys = np.round(seq.values[1 : m + 1] * 1e8)
        _, inv = np.unique(keys.real + 1j * keys.imag, return_inverse=True)
        symbols = np.where(filled, inv, HOLE)
    vals = [complex(v) for v in seq.values[1 : m + 1]]
    return SkeletonView(m, N, filled, symbols.astype(np.int64), vals)


def _skeleton_has_period(sym: np.ndarray, d: int) -> bool:
    return bool(np.array_equal(sym[d:], sym[:-d])) if d < len(sym) else True


def essential_period_test(f, m: int, N: int, table: Optional[PrimeTable] = None) -> bool:
    """Whether ``m`` is the least period of the ``m``-skeleton.

    Holes are a separate symbol: a hole matches only a hole.  A skeleton
    consisting of holes only carries no period information and is not
    counted as essential.
    """
    seq = _seq(f, N, table)
    if m > seq.N // 4:
        raise ArgumentError(f"essential period test needs m <= N/4, got m={m}, N={seq.N}")
    sk = skeleton(seq, m, seq.N)
    return _essential_from_skeleton(sk)


def _essential_from_skeleton(sk: SkeletonView) -> bool:
    if not sk.filled.any():
        return False
    for p, _ in factor_small(sk.m):
        if _skeleton_has_period(sk.symbols, sk.m // p):
            return False
    return True


# -- candidate lattices --------------------------------------------------------
def divisors_from_exponents(exps: dict, cap: int) -> list[int]:
    out = [1]
    for p in sorted(exps):
        nxt = []
        for d in out:
            x = d
            for _ in range(exps[p] + 1):
                if x > cap:
                    break
                nxt.append(x)
                x *= p
        out = nxt
    return sorted(out)


def candidate_lattice(f: MultFunction, B: int = DEFAULT_BOUND, cap: int = 10**6, base: Optional[int] = None) -> list[int]:
    """Ascending divisors of ``d * prod_{p in F} p^B`` up to ``cap``.

    Without a certificate ``base`` (typically ``m_1``) plays the role of d
    and its prime factors the role of F.
    """
    if getattr(f, "certificate", None) is not None:
        d = f.certificate.chi.modulus
        F = set(f.certificate.F)
    else:
        if base is None:
            raise UnsupportedError("uncertified functions need an explicit base modulus")
        d, F = base, set(spec_of(base))
    exps = {p: e for p, e in factor_small(d)}
    for p in F:
        exps[p] = exps.get(p, 0) + B
    return divisors_from_exponents(exps, cap)


def minimal_period_of_one(f, N: int, table: PrimeTable, bound: Optional[int] = None, B: int = DEFAULT_BOUND) -> int:
    """Least candidate ``m`` with ``1`` in ``Per_m`` on ``[1, N]``.

    Candidates come from the certificate lattice, or every integer up to
    ``bound`` for uncertified input.  All other candidate periods of
    position 1 are checked to be multiples of the result.
    """
    seq = _seq(f, N, table)
    cap = min(bound or seq.N // 4, seq.N // 4)
    cands = candidate_lattice(f, B, cap) if getattr(f, "certificate", None) else range(1, cap + 1)
    found = None
    for m in cands:
        chk = _period_check(seq, 1, m)
        if chk.verified and not chk.vacuous:
            if found is None:
                found = m
                if not getattr(f, "certificate", None):
                    break
            elif m % found:
                raise ClassificationError(f"period {m} of position 1 is not a multiple of {found}", witness=m)
    if found is None:
        raise ClassificationError(f"no period of position 1 found up to {cap}", witness=1)
    return found


def _position_period(f, seq: Sequence, n: int, lattice) -> Optional[int]:
    if getattr(f, "certificate", None) is not None:
        return certified_period(f, n)
    for m in lattice:
        chk = _period_check(seq, n, m)
        if chk.verified and not chk.vacuous:
            return m
    return None


# -- period structure ------------------------------------------------------------
@dataclass
class Valuation:
    """``nu_p(Per(f))`` as far as it can be decided.

    status is ``certified`` (exact), ``verified`` (upper bound only checked
    on the truncation), ``inf`` (refuted at every level below ``bound``) or
    ``lower`` (refuted below ``value``, undecided at ``value``).
    """

    prime: int
    value: Optional[int]
    status: str
    bound: int
    witnesses: list = field(default_factory=list)

    @property
    def infinite(self) -> bool:
        return self.status == "inf"

    def to_json(self):
        if self.status == "inf":
            return f"inf@{self.bound}"
        if self.status == "lower":
            return f"ge@{self.value}"
        return self.value


@dataclass
class PeriodStructure:
    essential: list
    chain: list
    valuations: dict
    spectrum: list
    lcm_closed: bool
    N: int
    bound: int
    certified: bool

    def to_json(self) -> dict:
        return {
            "essential": self.essential,
            "chain": self.chain,
            "valuations": {str(p): v.to_json() for p, v in sorted(self.valuations.items())},
            "spectrum": self.spectrum,
            "lcm_closed": self.lcm_closed,
            "N": self.N,
            "bound": self.bound,
            "certified": self.certified,
        }


def _probes(p: int, N: int, B: int) -> list[int]:
    out = set(range(1, min(64, N) + 1))
    for r in (1, 2, 3, 5, 7, 11, 13):
        if r % p == 0:
            continue
        x = r
        for _ in range(B + 2):
            if 2 * x > N:
                break
            out.add(x)
            x *= p
    return sorted(out)


def p_valuation(f, p: int, N: int, table: PrimeTable, B: int = DEFAULT_BOUND, lattice=None) -> Valuation:
    """Decide ``nu_p(Per(f))`` level by level up to ``B``.

    Level ``b`` is refuted when some probe ``n`` with a period ``K``,
    ``nu_p(K) > b``, fails to have the period ``K / p^(nu_p(K)-b)``.  If
    every position had a period with ``nu_p <= b`` that reduced period
    would be forced, so a failure proves ``nu_p(Per(f)) > b``.
    """
    seq = _seq(f, N, table)
    N = seq.N
    cert = getattr(f, "certificate", None)
    witnesses = []
    probes = _probes(p, N, B)
    periods = {n: _position_period(f, seq, n, lattice or []) for n in probes}
    for b in range(B):
        refuted = None
        vacuous = False
        for n in probes:
            K = periods[n]
            if K is None:
                continue
            e = valuation(K, p)
            if e <= b:
                continue
            Kbar = K // p ** (e - b)
            chk = _period_check(seq, n, Kbar)
            if not chk.verified:
                refuted = (b, n, Kbar, chk.witness)
                break
            if chk.vacuous:
                vacuous = True
        if refuted is not None:
            witnesses.append(refuted)
            continue
        if cert is not None and p not in cert.F:
            # every certified period has nu_p = nu_p(d)
            return Valuation(p, b, "certified", B, witnesses)
        return Valuation(p, b, "lower" if vacuous else "verified", B, witnesses)
    return Valuation(p, None, "inf", B, witnesses)


def period_structure(
    f,
    N: int,
    table: PrimeTable,
    B: int = DEFAULT_BOUND,
    essential_bound: int = 10**4,
    check_positions: int = 1000,
) -> PeriodStructure:
    """Essential periods, their lcm chain and the p-valuations of ``Per(f)``.

    Uncertified input is treated as asserted Toeplitz: the candidate
    lattice is built from ``m_1`` and every position up to
    ``check_positions`` must have a verified candidate period, otherwise a
    ClassificationError carries the offending position.
    """
    seq = _seq(f, N, table)
    N = seq.N
    cert = getattr(f, "certificate", None)
    if cert is not None:
        primes = sorted(set(cert.F) | spec_of(cert.chi.modulus))
        lattice = candidate_lattice(f, B, N // 4)
    else:
        m1 = minimal_period_of_one(seq, N, table, bound=min(N // 4, 10**4))
        primes = sorted(spec_of(m1))
        lattice = candidate_lattice(f, B, N // 4, base=m1)
        covered = np.zeros(min(check_positions, N) + 1, dtype=bool)
        covered[0] = True
        pos = np.arange(1, covered.size)
        for m in lattice:
            sk = skeleton(seq, m, N)
            covered[1:] |= sk.filled[(pos - 1) % m]
            if covered.all():
                break
        if not covered.all():
            w = int(np.flatnonzero(~covered)[0])
            raise ClassificationError(f"position {w} has no period in the candidate lattice", witness=w)
    essential = []
    for m in lattice:
        if m > min(essential_bound, N // 4):
            break
        if _essential_from_skeleton(skeleton(seq, m, N)):
            essential.append(m)
    ess_set = set(essential)
    lcm_closed = True
    top = min(essential_bound, N // 4)
    for i, a in enumerate(essential):
        for b in essential[i + 1 :]:
            l = a * b // math.gcd(a, b)
            if l <= top and l not in ess_set:
                lcm_closed = False
    chain = []
    cur = 1
    for r in essential:
        cur = cur * r // math.gcd(cur, r)
        if cur > top:
            break
        if not chain or chain[-1] != cur:
            chain.append(cur)
    vals = {p: p_valuation(f if cert is not None else seq, p, N, table, B, lattice) for p in primes}
    spectrum = [p for p, v in vals.items() if v.infinite or (v.value or 0) > 0]
    return PeriodStructure(essential, chain, vals, spectrum, lcm_closed, N, B, cert is not None)


# -- regularity -----------------------------------------------------------------
def regularity_density(f: MultFunction, v: dict, N: int, table: PrimeTable) -> tuple[float, float]:
    """Density of ``[1, N] \\ Per_T`` and its union bound ``sum q^-(v_q+1)``.

    ``T = prod q^(v_q+1) * m_1``; a position counts as in ``Per_T`` when its
    certified period divides ``T``.
    """
    if f.certificate is None:
        raise UnsupportedError("regularity_density needs a certificate")
    m1 = minimal_period_of_one(f, min(N, 10**6), table)
    T = m1
    for q, e in v.items():
        T *= q ** (e + 1)
    Tn = certified_periods(f, N)[1:]
    outside = sum(1 for x in Tn if T % int(x))
    bound = math.fsum(q ** -(e + 1) for q, e in v.items())
    return outside / N, bound


def lemma_general_check(f, p: int, b: int, n: int, K: int, N: int, table: PrimeTable, check_positions: int = 2000, B: int = DEFAULT_BOUND) -> bool:
    """Test ``n in Per_Kbar`` with ``Kbar = p^(b - nu_p(K)) K``.

    Hypotheses checked on the truncation first: positions up to
    ``check_positions`` each have a verified period with ``nu_p <= b``, and
    ``n in Per_K``.  Otherwise InconclusiveError.
    """
    seq = _seq(f, N, table)
    N = seq.N
    if not _period_check(seq, n, K).verified:
        raise InconclusiveError(f"{n} is not in Per_{K} on [1, {N}]")
    base = K
    if getattr(f, "certificate", None) is not None:
        lat = candidate_lattice(f, B, N // 4)
    else:
        lat = divisors_from_exponents(dict(factor_small(base)), N // 4)
    exps = {}
    for m in lat + [K]:
        for q, e in factor_small(m):
            exps[q] = max(exps.get(q, 0), e)
    exps[p] = min(exps.get(p, 0), b)
    moduli = divisors_from_exponents(exps, N // 4)
    top = min(check_positions, N)
    covered = np.zeros(top, dtype=bool)
    pos = np.arange(1, top + 1)
    for m in moduli:
        sk = skeleton(seq, m, N)
        covered |= sk.filled[(pos - 1) % m]
        if covered.all():
            break
    if not covered.all():
        w = int(np.flatnonzero(~covered)[0]) + 1
        raise InconclusiveError(f"position {w} has no verified period with nu_{p} <= {b}")
    e = valuation(K, p)
    Kbar = K * p**b // p**e if e >= b else K * p ** (b - e)
    return _period_check(seq, n, Kbar).verified


# -- characters from sequences --------------------------------------------------------
def extract_character(f, N: int, table: PrimeTable, m: Optional[int] = None) -> DirichletCharacter:
    """The character mod ``m`` agreeing with ``f`` on ``m^perp``.

    ``m`` defaults to ``m_1``.  Raises ClassificationError if the values on
    ``m^perp`` do not form a character or some unit class is not in
    ``Per_m`` on the truncation.
    """
    seq = _seq(f, N, table)
    if m is None:
        m = minimal_period_of_one(f, N, table)
    if m > seq.N:
        raise ArgumentError(f"modulus {m} exceeds truncation {seq.N}")
    units = [a for a in range(1, m + 1) if math.gcd(a, m) == 1]
    exps = np.full(m, -1, dtype=np.int64)
    phi = len(units)
    for a in units:
        chk = _period_check(seq, a, m)
        if not chk.verified:
            raise ClassificationError(f"unit class {a} mod {m} is not in Per_{m}", witness=(a, a + chk.witness * m))
    if seq.phase is not None:
        den = seq.den
        for a in units:
            ph = int(seq.phase[a])
            if ph < 0:
                raise ClassificationError(f"f({a}) = 0 on a unit class mod {m}", witness=a)
            if (ph * phi) % den:
                raise ClassificationError(f"f({a}) is not a phi({m})-th root of unity", witness=a)
            exps[a % m] = ph * phi // den
    else:
        for a in units:
            z = seq.values[a]
            k = round(float(np.angle(z)) * phi / (2 * math.pi)) % phi
            if abs(z - np.exp(2j * math.pi * k / phi)) > 1e-9:
                raise ClassificationError(f"f({a}) = {z} is not a phi({m})-th root of unity", witness=a)
            exps[a % m] = k
    chi = DirichletCharacter(m, exps, phi)
    try:
        chi.validate()
    except ArgumentError as exc:
        raise ClassificationError(f"values on {m}^perp are not a character: {exc}") from exc
    return chi


# -- periodicity ----------------------------------------------------------------------
@dataclass
class PeriodicResult:
    periodic: bool
    M: Optional[int] = None
    theta: Optional[DirichletCharacter] = None
    t: Optional[int] = None
    newformula_failures: list = field(default_factory=list)
    witness: Optional[tuple] = None

    def to_json(self) -> dict:
        if not self.periodic:
            return {"periodic": False, "witness": list(self.witness) if self.witness else None}
        return {
            "periodic": True,
            "M": self.M,
            "t": self.t,
            "theta": self.theta.to_json(),
            "newformula_ok": not self.newformula_failures,
            "newformula_failures": [list(x) for x in self.newformula_failures],
        }


def _full_period(seq: Sequence, m: int) -> Optional[int]:
    """None if ``m`` is a period of the whole truncation, else the first bad index."""
    N = seq.N
    arr = seq.phase if seq.phase is not None else seq.values
    lo = 1
    step = 4096
    while lo + m <= N:
        hi = min(N - m, lo + step - 1)
        a, b = arr[lo : hi + 1], arr[lo + m : hi + m + 1]
        bad = np.flatnonzero(a != b) if seq.phase is not None else np.flatnonzero(np.abs(a - b) > 1e-9)
        if bad.size:
            return lo + int(bad[0])
        lo = hi + 1
        step *= 4
    return None


def newformula_failures(f: MultFunction, M: int, theta: DirichletCharacter, qmax: int = 50, L: int = 6) -> list:
    """Pairs ``(q, l)`` violating ``f(q^(b+l)) = f(q^b) theta(q^l)``, ``b = nu_q(M/t)``."""
    t = theta.modulus
    bad = []
    for q in range(2, qmax + 1):
        if any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
            continue
        b = valuation(M // t, q)
        base = f.pp(q, b)
        for l in range(1, L + 1):
            rhs = base * theta(pow(q, l, t))
            if not values_equal(f.pp(q, b + l), rhs):
                bad.append((q, l))
    return bad


def classify_periodic(f: MultFunction, N: int, table: PrimeTable, B: int = DEFAULT_BOUND, max_period: Optional[int] = None) -> PeriodicResult:
    """Least period ``M`` on ``[1, N]`` with supporting character and conductor.

    Candidates are the certificate lattice (or all integers up to
    ``max_period``) below ``N/4``.
    """
    seq = _seq(f, N, table)
    cap = min(max_period or seq.N // 4, seq.N // 4)
    cands = candidate_lattice(f, B, cap) if f.certificate is not None else range(1, cap + 1)
    last = None
    for m in cands:
        bad = _full_period(seq, m)
        if bad is None:
            chi = extract_character(seq, seq.N, table, m=m)
            t, theta = conductor(chi)
            return PeriodicResult(True, m, theta, t, newformula_failures(f, m, theta))
        last = (bad, bad + m, m)
    return PeriodicResult(False, witness=last)


# -- automaticity ------------------------------------------------------------------
@dataclass
class EventuallyPeriodic:
    preperiod: int
    period: int
    values: list  # a_0 .. a_(preperiod+period-1)

    def __call__(self, k: int):
        if k < self.preperiod + self.period:
            return self.values[k]
        return self.values[self.preperiod + (k - self.preperiod) % self.period]


def eventual_period(seq: list, P: int = DEFAULT_P) -> Optional[EventuallyPeriodic]:
    """Least (preperiod + period, period) description of ``seq`` with sum <= P."""
    K = len(seq)
    for total in range(1, P + 1):
        for per in range(1, total + 1):
            pre = total - per
            if all(values_equal(seq[k], seq[k + per]) for k in range(pre, K - per)):
                return EventuallyPeriodic(pre, per, list(seq[:total]))
    return None


@dataclass
class AutomaticResult:
    automatic_nonsingular: bool
    p: Optional[int] = None
    f1: Optional[EventuallyPeriodic] = None
    f2: Optional[MultFunction] = None
    reason: str = ""
    periodic: Optional[PeriodicResult] = None
    structure: Optional[PeriodStructure] = None

    def to_json(self) -> dict:
        out = {"automatic_nonsingular": self.automatic_nonsingular, "reason": self.reason}
        if self.p is not None:
            out["p"] = self.p
        if self.f1 is not None:
            from .multfun import value_to_json

            out["f1"] = {
                "preperiod": self.f1.preperiod,
                "period": self.f1.period,
                "values": [value_to_json(v) for v in self.f1.values],
            }
        return out


def classify_automatic(f: MultFunction, N: int, table: PrimeTable, B: int = DEFAULT_BOUND, K: int = DEFAULT_K, P: int = DEFAULT_P, periodic: Optional[PeriodicResult] = None, structure: Optional[PeriodStructure] = None) -> AutomaticResult:
    """Periodic, or a single infinite valuation with eventually periodic ``f(p^k)``."""
    per = periodic or classify_periodic(f, N, table, B)
    if per.periodic:
        return AutomaticResult(True, reason="periodic", periodic=per)
    st = structure or period_structure(f, N, table, B)
    inf = [p for p, v in st.valuations.items() if v.infinite]
    if len(inf) != 1:
        why = "no infinite valuation detected and no period found" if not inf else f"infinite valuations at {inf}"
        return AutomaticResult(False, reason=why, periodic=per, structure=st)
    p = inf[0]
    seqp = [f.pp(p, k) for k in range(K + 1)]
    ep = eventual_period(seqp, P)
    if ep is None:
        return AutomaticResult(False, p=p, reason=f"(f({p}^k)) not eventually periodic within {P}", periodic=per, structure=st)
    f2 = modify_at_primes(f, {p: geometric(ONE)}, label=f"{f.label} on {p}^perp")
    return AutomaticResult(True, p=p, f1=ep, f2=f2, reason=f"single infinite valuation at {p}", periodic=per, structure=st)


def form1_value(res: AutomaticResult, n: int, table: PrimeTable):
    """``f1(nu_p(n)) * f2(n / p^nu_p(n))`` from an automatic decomposition."""
    from .multfun import evaluate

    e = valuation(n, res.p)
    return res.f1(e) * evaluate(res.f2, n // res.p**e, table)


# -- reports ----------------------------------------------------------------------------
@dataclass
class PeriodReport:
    positions: dict  # n -> smallest verified lattice period (or None)
    certified: dict  # n -> certified period (or None)
    candidate_set: list

    def to_json(self) -> dict:
        return {
            "positions": {str(n): m for n, m in self.positions.items()},
            "certified": {str(n): c for n, c in self.certified.items()},
            "candidate_set_size": len(self.candidate_set),
            "candidate_max": self.candidate_set[-1] if self.candidate_set else None,
        }


def period_report(f: MultFunction, positions, N: int, table: PrimeTable, B: int = DEFAULT_BOUND) -> PeriodReport:
    seq = _seq(f, N, table)
    if f.certificate is not None:
        lattice = candidate_lattice(f, B, seq.N // 4)
    else:
        m1 = minimal_period_of_one(seq, seq.N, table, bound=min(seq.N // 4, 10**4))
        lattice = candidate_lattice(f, B, seq.N // 4, base=m1)
    found, cert = {}, {}
    for n in positions:
        found[n] = None
        for m in lattice:
            chk = _period_check(seq, n, m)
            if chk.verified and not chk.vacuous:
                found[n] = m
                break
        cert[n] = certified_period(f, n) if f.certificate is not None else None
    return PeriodReport(found, cert, lattice)
