"""Multiplicative functions defined by prime-power rules.

A :class:`MultFunction` holds a rule ``(p, k) -> value`` for ``k >= 1``.
Values are exact (:class:`~multoep.characters.RootOfUnity`, or
:class:`ScaledRoot` for a rational magnitude) or approximate (``complex``).
Exact values multiply exactly; anything mixed with an approximate value
degrades to ``complex``.

Functions of the form "a Dirichlet character away from finitely many
primes" carry a :class:`ToeplitzCertificate`, which the period analysis
uses to produce exact period certificates.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .arith import PrimeTable, factorize, spec_of
from .characters import (
    ONE,
    ZERO,
    DirichletCharacter,
    RootOfUnity,
    char_product,
    enumerate_characters,
    principal,
)
from .errors import ArgumentError, UnsupportedError

log = logging.getLogger(__name__)

#: Tolerance for comparisons involving approximate values.
TOLERANCE = 1e-9

#: Common phase denominators above this are evaluated approximately.
MAX_EXACT_DENOMINATOR = 10**12

MINUS_ONE = RootOfUnity(1, 2)


# -- values ----------------------------------------------------------------
@dataclass(frozen=True)
class ScaledRoot:
    """Exact value ``magnitude * root`` with a rational magnitude."""

    magnitude: Fraction
    root: RootOfUnity

    def __mul__(self, other):
        if isinstance(other, RootOfUnity):
            return exact_value(self.magnitude * (0 if other.is_zero else 1), self.root * other)
        if isinstance(other, ScaledRoot):
            return exact_value(self.magnitude * other.magnitude, self.root * other.root)
        if isinstance(other, (complex, float, int)) and not isinstance(other, bool):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return exact_value(self.magnitude**k, self.root**k)

    def conjugate(self):
        return ScaledRoot(self.magnitude, self.root.conjugate())

    def __complex__(self):
        return float(self.magnitude) * complex(self.root)

    def __abs__(self):
        return float(self.magnitude)

    def __repr__(self):
        return f"{self.magnitude}*{self.root!r}"


Value = Union[RootOfUnity, ScaledRoot, complex]


def exact_value(magnitude, root: RootOfUnity = ONE) -> Union[RootOfUnity, ScaledRoot]:
    """Normalized exact value: ZERO, a bare root, or a scaled root."""
    magnitude = Fraction(magnitude)
    if magnitude < 0:
        magnitude, root = -magnitude, root * MINUS_ONE
    if magnitude == 0 or root.is_zero:
        return ZERO
    if magnitude == 1:
        return root
    return ScaledRoot(magnitude, root)


def is_exact(v) -> bool:
    return isinstance(v, (RootOfUnity, ScaledRoot))


def as_complex(v) -> complex:
    return complex(v)


def conj(v):
    if is_exact(v):
        return v.conjugate()
    return complex(v).conjugate()


def vpow(v, k: int):
    if is_exact(v):
        return v**k
    return complex(v) ** k


def values_equal(a, b, tol: float = TOLERANCE) -> bool:
    """Exact equality for exact pairs, ``|a-b| <= tol`` otherwise."""
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(complex(a) - complex(b)) <= tol


def value_to_json(v):
    if isinstance(v, RootOfUnity):
        return v.to_json()
    if isinstance(v, ScaledRoot):
        return {"mag": [v.magnitude.numerator, v.magnitude.denominator], "root": v.root.to_json()}
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def value_from_json(obj, where: str = "value"):
    try:
        if obj is None or isinstance(obj, list):
            return RootOfUnity.from_json(obj)
        if isinstance(obj, dict) and "mag" in obj:
            a, b = obj["mag"]
            return exact_value(Fraction(int(a), int(b)), RootOfUnity.from_json(obj.get("root", [0, 1])))
        if isinstance(obj, dict) and "re" in obj:
            return complex(float(obj["re"]), float(obj.get("im", 0.0)))
        if isinstance(obj, (int, float)) and not isinstance(obj, bool):
            return complex(obj)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ArgumentError(f"{where}: cannot parse value {obj!r} ({exc})") from exc
    raise ArgumentError(f"{where}: cannot parse value {obj!r}")


# -- kappa rules -----------------------------------------------------------
class Kappa:
    """A rule ``k -> value`` used to modify a function at one prime.

    ``xi`` is set when the rule is geometric (``k -> xi**k``).
    """

    def __init__(self, fn: Callable[[int], Value], xi=None, spec=None):
        self._fn = fn
        self.xi = xi
        self.spec = spec

    def __call__(self, k: int):
        return self._fn(k)

    @property
    def geometric(self) -> bool:
        return self.xi is not None

    def to_json(self):
        if self.spec is None:
            raise UnsupportedError("this kappa rule has no serializable description")
        return self.spec


def geometric(xi) -> Kappa:
    return Kappa(lambda k: vpow(xi, k), xi=xi, spec={"geometric": value_to_json(xi)})


def kappa_table(values, period: int = 1) -> Kappa:
    """``values[k-1]`` for ``k <= len(values)``; beyond, the last ``period`` repeat."""
    values = list(values)
    if not values or not 1 <= period <= len(values):
        raise ArgumentError("kappa table needs 1 <= period <= len(values)")
    L = len(values)

    def fn(k):
        if k <= L:
            return values[k - 1]
        return values[L - period + (k - L - 1) % period]

    spec = {"values": [value_to_json(v) for v in values], "period": period}
    return Kappa(fn, spec=spec)


def _as_kappa(rule) -> Kappa:
    return rule if isinstance(rule, Kappa) else Kappa(rule)


def kappa_from_json(obj, where="kappa") -> Kappa:
    if not isinstance(obj, dict):
        raise ArgumentError(f"{where}: expected an object")
    if "geometric" in obj:
        return geometric(value_from_json(obj["geometric"], where + ".geometric"))
    if "values" in obj:
        vals = [value_from_json(v, f"{where}.values[{i}]") for i, v in enumerate(obj["values"])]
        return kappa_table(vals, int(obj.get("period", 1)))
    raise ArgumentError(f"{where}: needs 'geometric' or 'values'")


# -- certificates and functions -------------------------------------------
@dataclass
class ToeplitzCertificate:
    """``f(p^k) = chi(p^k)`` for ``p`` outside ``F``; ``kappa[p](k)`` on ``F``."""

    chi: DirichletCharacter
    F: frozenset
    kappa: dict = field(default_factory=dict)

    @property
    def modulus(self) -> int:
        return self.chi.modulus

    def value(self, p: int, k: int):
        if p in self.F:
            return self.kappa[p](k)
        return self.chi(pow(p, k, self.chi.modulus))


class MultFunction:
    """Multiplicative function from a prime-power rule.

    ``rule(p, k)`` is called with a prime ``p`` and ``k >= 1``; results are
    memoized.  ``completely_multiplicative`` is a declared property (the
    test-suite checks it).  ``bounded`` marks membership of the class of
    functions bounded by 1.
    """

    def __init__(
        self,
        rule: Callable[[int, int], Value],
        *,
        completely_multiplicative: bool = False,
        certificate: Optional[ToeplitzCertificate] = None,
        label: str = "",
        spec: Optional[dict] = None,
        bounded: bool = True,
        prime_vec: Optional[Callable] = None,
    ):
        self.rule = rule
        self.prime_vec = prime_vec
        self.completely_multiplicative = completely_multiplicative
        self.certificate = certificate
        self.label = label or "f"
        self.spec = spec
        self.bounded = bounded
        self._memo: dict = {}
        self._seq: Optional[Sequence] = None

    def __repr__(self):
        return f"MultFunction({self.label!r})"

    def pp(self, p: int, k: int):
        """Value at the prime power ``p**k`` (``k = 0`` gives 1)."""
        if k == 0:
            return ONE
        key = (p, k)
        v = self._memo.get(key)
        if v is None:
            v = self.rule(p, k)
            if not is_exact(v):
                v = complex(v)
            self._memo[key] = v
        return v

    def to_spec(self) -> dict:
        if self.spec is None:
            raise UnsupportedError(f"{self.label} was not built from a serializable spec")
        return self.spec

    def spec_hash(self) -> str:
        blob = json.dumps(self.to_spec(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def evaluate(f: MultFunction, n: int, table: PrimeTable):
    """``f(n)`` by factorization; exact when every factor is exact."""
    acc = ONE
    for p, e in factorize(n, table).parts:
        acc = acc * f.pp(p, e)
    return acc


# -- evaluation on a range --------------------------------------------------
@dataclass
class Sequence:
    """Values ``f(0..N)`` (index 0 is a placeholder 0).

    When every prime-power value is a root of unity or zero, ``phase``
    holds exact exponents over ``den`` (``-1`` encodes 0) and position
    comparisons are exact integer comparisons.
    """

    values: np.ndarray
    phase: Optional[np.ndarray] = None
    den: int = 1
    label: str = ""

    @property
    def N(self) -> int:
        return len(self.values) - 1

    @property
    def exact(self) -> bool:
        return self.phase is not None

    def head(self, N: int) -> "Sequence":
        ph = None if self.phase is None else self.phase[: N + 1]
        return Sequence(self.values[: N + 1], ph, self.den, self.label)

    def equal(self, i, j, tol: float = TOLERANCE):
        """Elementwise ``f(i) == f(j)`` for index arrays."""
        if self.phase is not None:
            return self.phase[i] == self.phase[j]
        return np.abs(self.values[i] - self.values[j]) <= tol

    def equal_to(self, i, ref_index: int, tol: float = TOLERANCE):
        if self.phase is not None:
            return self.phase[i] == self.phase[ref_index]
        return np.abs(self.values[i] - self.values[ref_index]) <= tol


def _phase_to_complex(phase: np.ndarray, den: int) -> np.ndarray:
    out = np.zeros(len(phase), dtype=complex)
    nz = phase >= 0
    out[nz] = np.exp(2j * np.pi * (phase[nz] / den))
    out[phase == 0] = 1
    if den % 2 == 0:
        out[phase == den // 2] = -1
    if den % 4 == 0:
        out[phase == den // 4] = 1j
        out[phase == 3 * den // 4] = -1j
    return out


def evaluate_range(f: MultFunction, N: int, table: PrimeTable) -> Sequence:
    """Evaluate ``f`` on ``1..N`` with the least-prime-factor decomposition."""
    if f._seq is not None and f._seq.N >= N:
        return f._seq.head(N)
    table.check(N, "range end")
    q, ps, ks = table.prime_powers(N)
    pa = _prime_power_array(f, ps, ks)
    exact = pa.num is not None
    den = pa.den
    ppow, cof = table.prime_power_split(N)
    n_idx = np.arange(2, N + 1, dtype=np.int64)
    slot = np.searchsorted(q, ppow[2:])
    if exact:
        pp_phase = pa.num
        phase = np.zeros(N + 1, dtype=np.int64)
        phase[0] = -1
        acc = pp_phase[slot]
        cur = cof[2:].copy()
        live = np.flatnonzero(cur > 1)
        slot_of = np.zeros(N + 1, dtype=np.int64)
        slot_of[2:] = slot
        while live.size:
            c = cur[live]
            add = pp_phase[slot_of[c]]
            a = acc[live]
            acc[live] = np.where((a < 0) | (add < 0), -1, (a + add) % den)
            cur[live] = cof[c]
            live = live[cur[live] > 1]
        phase[2:] = acc
        values = _phase_to_complex(phase, den)
        values[0] = 0
        seq = Sequence(values, phase, den, f.label)
    else:
        pp_val = pa.values
        values = np.zeros(N + 1, dtype=complex)
        values[1] = 1
        acc = pp_val[slot]
        cur = cof[2:].copy()
        slot_of = np.zeros(N + 1, dtype=np.int64)
        slot_of[2:] = slot
        live = np.flatnonzero(cur > 1)
        while live.size:
            c = cur[live]
            acc[live] *= pp_val[slot_of[c]]
            cur[live] = cof[c]
            live = live[cur[live] > 1]
        values[2:] = acc
        seq = Sequence(values, None, 1, f.label)
    del n_idx
    for arr in (seq.values, seq.phase):
        if arr is not None:
            arr.setflags(write=False)
    f._seq = seq
    return seq


def _prime_power_array(f: MultFunction, ps: np.ndarray, ks: np.ndarray) -> "PrimeArray":
    """``f(p^k)`` over parallel arrays; the ``k = 1`` entries go through ``prime_array``."""
    one = ks == 1
    a = prime_array(f, ps[one])
    b = _array_from_values([f.pp(int(p), int(k)) for p, k in zip(ps[~one], ks[~one])])
    if a.num is not None and b.num is not None:
        L = a.den * b.den // math.gcd(a.den, b.den)
        if L <= MAX_EXACT_DENOMINATOR:
            num = np.empty(ps.size, dtype=np.int64)
            num[one] = np.where(a.num < 0, -1, a.num * (L // a.den))
            num[~one] = np.where(b.num < 0, -1, b.num * (L // b.den))
            return PrimeArray(np.empty(0, dtype=complex), num, L)
    vals = np.empty(ps.size, dtype=complex)
    vals[one] = a.values
    vals[~one] = b.values
    return PrimeArray(vals)


@dataclass
class PrimeArray:
    """``f(p)`` over an array of primes; ``num`` holds exact phases over ``den``."""

    values: np.ndarray
    num: Optional[np.ndarray] = None  # -1 encodes 0
    den: int = 1


def _exact_array(num: np.ndarray, den: int) -> PrimeArray:
    return PrimeArray(_phase_to_complex(num, den), num, den)


def prime_array(f: MultFunction, primes: np.ndarray) -> PrimeArray:
    """``f(p)`` for every prime in ``primes`` (vectorized when the builder allows)."""
    primes = np.asarray(primes, dtype=np.int64)
    if f.prime_vec is not None:
        return f.prime_vec(primes)
    vals = [f.pp(int(p), 1) for p in primes]
    return _array_from_values(vals)


def _array_from_values(vals) -> PrimeArray:
    cv = np.array([complex(v) for v in vals], dtype=complex)
    if all(isinstance(v, RootOfUnity) for v in vals):
        den = 1
        for v in vals:
            if not v.is_zero:
                den = den * v.denominator // math.gcd(den, v.denominator)
                if den > MAX_EXACT_DENOMINATOR:
                    return PrimeArray(cv)
        num = np.array([-1 if v.is_zero else v.numerator * (den // v.denominator) for v in vals], dtype=np.int64)
        return PrimeArray(cv, num, den)
    return PrimeArray(cv)


def _array_product(a: PrimeArray, b: PrimeArray) -> PrimeArray:
    if a.num is not None and b.num is not None:
        L = a.den * b.den // math.gcd(a.den, b.den)
        if L <= MAX_EXACT_DENOMINATOR:
            zero = (a.num < 0) | (b.num < 0)
            num = np.where(zero, -1, (a.num * (L // a.den) + b.num * (L // b.den)) % L)
            return _exact_array(num, L)
    return PrimeArray(a.values * b.values)


def _array_patch(a: PrimeArray, primes: np.ndarray, patch: dict) -> PrimeArray:
    """Overwrite the entries at the primes listed in ``patch`` (prime -> value)."""
    idx = {int(p): i for i, p in enumerate(primes) if int(p) in patch} if len(patch) > 64 else None
    if idx is None:
        idx = {}
        for p in patch:
            j = int(np.searchsorted(primes, p))
            if j < len(primes) and primes[j] == p:
                idx[p] = j
    if not idx:
        return a
    repl = {p: patch[p] for p in idx}
    exact = a.num is not None and all(isinstance(v, RootOfUnity) for v in repl.values())
    if exact:
        den = a.den
        for v in repl.values():
            if not v.is_zero:
                den = den * v.denominator // math.gcd(den, v.denominator)
        if den <= MAX_EXACT_DENOMINATOR:
            num = np.where(a.num < 0, -1, a.num * (den // a.den))
            for p, j in idx.items():
                v = repl[p]
                num[j] = -1 if v.is_zero else v.numerator * (den // v.denominator)
            return _exact_array(num, den)
    vals = a.values.copy()
    for p, j in idx.items():
        vals[j] = complex(repl[p])
    return PrimeArray(vals)


# -- builders ----------------------------------------------------------------
def from_character(chi: DirichletCharacter, label: str = "") -> MultFunction:
    """The character itself as a (completely) multiplicative function."""
    m = chi.modulus
    return MultFunction(
        lambda p, k: chi(pow(p, k, m)),
        completely_multiplicative=True,
        certificate=ToeplitzCertificate(chi, frozenset(), {}),
        label=label or f"chi mod {m}",
        spec={"kind": "character", "character": chi.to_json()},
        prime_vec=lambda ps: _exact_array(chi.exps[ps % m], chi.den),
    )


def modify_at_primes(f: MultFunction, kappa: Mapping[int, Callable], label: str = "") -> MultFunction:
    """Replace ``f(p^k)`` by ``kappa[p](k)`` for the listed primes."""
    kap = {int(p): _as_kappa(r) for p, r in kappa.items()}
    for p in kap:
        if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
            raise ArgumentError(f"kappa key {p} is not a prime")
    base = f

    def rule(p, k):
        r = kap.get(p)
        return r(k) if r is not None else base.pp(p, k)

    cert = None
    if f.certificate is not None:
        merged = dict(f.certificate.kappa)
        merged.update(kap)
        cert = ToeplitzCertificate(f.certificate.chi, frozenset(f.certificate.F) | frozenset(kap), merged)
    complete = f.completely_multiplicative and all(r.geometric for r in kap.values())
    spec = None
    if f.spec is not None and all(r.spec is not None for r in kap.values()):
        spec = {
            "kind": "modified_character" if f.spec.get("kind") == "character" else "modified",
            "base": f.spec,
            "kappa": {str(p): kap[p].to_json() for p in sorted(kap)},
        }
        if f.spec.get("kind") == "character":
            spec = {"kind": "modified_character", "character": f.spec["character"], "kappa": spec["kappa"]}
    bounded = f.bounded and all(_bounded_kappa(r) for r in kap.values())
    vec = None
    if f.prime_vec is not None:
        vec = lambda ps: _array_patch(f.prime_vec(ps), ps, {p: r(1) for p, r in kap.items()})
    return MultFunction(
        rule,
        prime_vec=vec,
        completely_multiplicative=complete,
        certificate=cert,
        label=label or f"{f.label} modified at {sorted(kap)}",
        spec=spec,
        bounded=bounded,
    )


def _bounded_kappa(r: Kappa, K: int = 64) -> bool:
    return all(abs(complex(r(k))) <= 1 + 1e-12 for k in range(1, K + 1))


def periodic_multiplicative(
    theta: DirichletCharacter, heads: Mapping[int, list], label: str = ""
) -> MultFunction:
    """Periodic multiplicative function with free values at ``q^1..q^b``.

    ``heads[q]`` lists ``f(q), ..., f(q^b)``; beyond, ``f(q^(b+l)) =
    f(q^b) * theta(q^l)``.  The result has period ``prod q^b * t``.
    """
    kappa = {}
    for q, head in heads.items():
        head = list(head)
        if not head:
            continue
        last = head[-1]
        tq = theta(q % theta.modulus)
        if tq.is_zero:
            tail, period = [ZERO], 1
        else:
            o = tq.denominator
            tail = [last * tq**j for j in range(1, o + 1)]
            period = o
        kappa[q] = kappa_table(head + tail, period)
    f = from_character(theta)
    return modify_at_primes(f, kappa, label=label or f"periodic from chi mod {theta.modulus} at {sorted(kappa)}")


def liouville() -> MultFunction:
    return MultFunction(
        lambda p, k: MINUS_ONE**k,
        completely_multiplicative=True,
        prime_vec=lambda ps: _exact_array(np.ones(len(ps), dtype=np.int64), 2),
        label="liouville",
        spec={"kind": "liouville"},
    )


class PrimeSet:
    """Predicate on primes with a JSON description."""

    def __init__(self, pred: Callable[[int], bool], spec: Optional[dict] = None, finite=None, vec=None):
        self.pred = pred
        self.vec = vec
        self.spec = spec
        self.finite = None if finite is None else frozenset(finite)

    def __call__(self, p: int) -> bool:
        return self.pred(p)

    @classmethod
    def residues(cls, modulus: int, residues) -> "PrimeSet":
        rs = frozenset(int(r) % modulus for r in residues)
        return cls(
            lambda p: p % modulus in rs,
            {"type": "residues", "modulus": modulus, "residues": sorted(rs)},
            vec=lambda ps: np.isin(ps % modulus, sorted(rs)),
        )

    @classmethod
    def of(cls, primes) -> "PrimeSet":
        ps = frozenset(int(p) for p in primes)
        return cls(lambda p: p in ps, {"type": "set", "primes": sorted(ps)}, finite=ps, vec=lambda a: np.isin(a, sorted(ps)))

    @classmethod
    def log_windows(cls) -> "PrimeSet":
        """Primes in the windows ``[e^(k^2), e^(k^2+k)]``, ``k >= 1``.

        Relative density tends to 0 while the reciprocal sum diverges.
        """

        def pred(p):
            x = math.log(p)
            k = math.isqrt(int(x))
            return k >= 1 and x <= k * k + k

        def vec(ps):
            x = np.log(ps.astype(float))
            k = np.floor(np.sqrt(np.floor(x))).astype(np.int64)
            return (k >= 1) & (x <= k * k + k)

        return cls(pred, {"type": "log_windows"}, vec=vec)

    @classmethod
    def from_json(cls, obj, where="primes") -> "PrimeSet":
        kind = obj.get("type") if isinstance(obj, dict) else None
        if kind == "residues":
            return cls.residues(int(obj["modulus"]), obj["residues"])
        if kind == "set":
            return cls.of(obj["primes"])
        if kind == "log_windows":
            return cls.log_windows()
        raise ArgumentError(f"{where}: unknown prime set {obj!r}")


def liouville_like(P, label: str = "") -> MultFunction:
    """``(-1)^(number of prime factors from P, with multiplicity)``."""
    if not isinstance(P, PrimeSet):
        P = PrimeSet(P)
    cert = None
    if P.finite is not None:
        neg = geometric(MINUS_ONE)
        cert = ToeplitzCertificate(principal(1), P.finite, {p: neg for p in P.finite})
    vec = None
    if P.vec is not None:
        vec = lambda ps: _exact_array(np.where(P.vec(ps), 1, 0).astype(np.int64), 2)
    return MultFunction(
        lambda p, k: MINUS_ONE**k if P(p) else ONE,
        completely_multiplicative=True,
        certificate=cert,
        prime_vec=vec,
        label=label or "liouville_like",
        spec=None if P.spec is None else {"kind": "liouville_like", "primes": P.spec},
    )


def archimedean(t: float) -> MultFunction:
    """``n -> n^(it)``."""
    t = float(t)
    if t == 0:
        f = from_character(principal(1), label="archimedean(0)")
        f.spec = {"kind": "archimedean", "t": 0.0}
        return f
    return MultFunction(
        lambda p, k: cmath.exp(1j * t * k * math.log(p)),
        completely_multiplicative=True,
        prime_vec=lambda ps: PrimeArray(np.exp(1j * t * np.log(ps.astype(float)))),
        label=f"n^(i*{t:g})",
        spec={"kind": "archimedean", "t": t},
    )


def twist(f: MultFunction, t: float) -> MultFunction:
    """``n -> f(n) * n^(it)``."""
    t = float(t)
    if t == 0:
        return f
    return MultFunction(
        lambda p, k: complex(f.pp(p, k)) * cmath.exp(1j * t * k * math.log(p)),
        completely_multiplicative=f.completely_multiplicative,
        prime_vec=lambda ps: PrimeArray(prime_array(f, ps).values * np.exp(1j * t * np.log(ps.astype(float)))),
        label=f"{f.label}*n^(i*{t:g})",
        spec=None if f.spec is None else {"kind": "twist", "base": f.spec, "t": t},
        bounded=f.bounded,
    )


def perturbed_archimedean(t: float) -> MultFunction:
    """``f(n) = n^(it)`` for odd ``n`` and ``f(2^k) = -2^(ikt)``."""
    g = modify_at_primes(from_character(principal(1)), {2: kappa_table([MINUS_ONE])}, label="(-1)^(n+1)")
    f = twist(g, t)
    f.label = f"perturbed n^(i*{t:g})"
    return f


def product(f: MultFunction, g: MultFunction, label: str = "") -> MultFunction:
    cert = None
    if f.certificate is not None and g.certificate is not None:
        cf, cg = f.certificate, g.certificate
        F = frozenset(cf.F) | frozenset(cg.F)
        kap = {p: Kappa(lambda k, p=p: f.pp(p, k) * g.pp(p, k)) for p in F}
        cert = ToeplitzCertificate(char_product(cf.chi, cg.chi), F, kap)
    spec = None
    if f.spec is not None and g.spec is not None:
        spec = {"kind": "product", "factors": [f.spec, g.spec]}
    return MultFunction(
        lambda p, k: f.pp(p, k) * g.pp(p, k),
        completely_multiplicative=f.completely_multiplicative and g.completely_multiplicative,
        prime_vec=lambda ps: _array_product(prime_array(f, ps), prime_array(g, ps)),
        certificate=cert,
        label=label or f"({f.label})*({g.label})",
        spec=spec,
        bounded=f.bounded and g.bounded,
    )


def power(f: MultFunction, m: int, label: str = "") -> MultFunction:
    if m < 0:
        raise ArgumentError("power needs m >= 0")
    cert = None
    if f.certificate is not None:
        c = f.certificate
        kap = {p: Kappa(lambda k, p=p: vpow(f.pp(p, k), m)) for p in c.F}
        cert = ToeplitzCertificate(c.chi**m, c.F, kap)
    vec = None
    if m >= 1:
        vec = lambda ps: _pow_array(prime_array(f, ps), m)
    return MultFunction(
        lambda p, k: vpow(f.pp(p, k), m),
        completely_multiplicative=f.completely_multiplicative,
        prime_vec=vec,
        certificate=cert,
        label=label or f"({f.label})^{m}",
        spec=None if f.spec is None else {"kind": "power", "base": f.spec, "exponent": m},
        bounded=f.bounded,
    )


def _pow_array(a: PrimeArray, m: int) -> PrimeArray:
    if a.num is not None:
        return _exact_array(np.where(a.num < 0, -1, (a.num * m) % a.den), a.den)
    return PrimeArray(a.values**m)


def _conj_array(a: PrimeArray) -> PrimeArray:
    if a.num is not None:
        return _exact_array(np.where(a.num < 0, -1, (-a.num) % a.den), a.den)
    return PrimeArray(np.conj(a.values))


def conjugate(f: MultFunction) -> MultFunction:
    cert = None
    if f.certificate is not None:
        c = f.certificate
        kap = {p: Kappa(lambda k, p=p: conj(f.pp(p, k))) for p in c.F}
        cert = ToeplitzCertificate(c.chi.conjugate(), c.F, kap)
    return MultFunction(
        lambda p, k: conj(f.pp(p, k)),
        completely_multiplicative=f.completely_multiplicative,
        prime_vec=lambda ps: _conj_array(prime_array(f, ps)),
        certificate=cert,
        label=f"conj({f.label})",
        spec=None if f.spec is None else {"kind": "conjugate", "base": f.spec},
        bounded=f.bounded,
    )


def loglog_phase() -> MultFunction:
    """Completely multiplicative with ``f(p) = exp(2*pi*i/log log p)``.

    Primes below 16 (where ``log log p <= 1``) get ``f(p) = 1``.
    """

    def rule(p, k):
        if p < 16:
            return ONE
        return cmath.exp(2j * math.pi * k / math.log(math.log(p)))

    def vec(ps):
        vals = np.ones(len(ps), dtype=complex)
        big = ps >= 16
        vals[big] = np.exp(2j * np.pi / np.log(np.log(ps[big].astype(float))))
        return PrimeArray(vals)

    return MultFunction(rule, completely_multiplicative=True, label="loglog_phase", spec={"kind": "loglog_phase"}, prime_vec=vec)


def prime_constant(c) -> MultFunction:
    """Completely multiplicative with ``f(p) = c`` for every prime."""
    if isinstance(c, (Fraction, int)) and not isinstance(c, bool):
        c = exact_value(Fraction(c))
    def vec(ps):
        if isinstance(c, RootOfUnity):
            return _exact_array(np.full(len(ps), -1 if c.is_zero else c.numerator, dtype=np.int64), c.denominator)
        return PrimeArray(np.full(len(ps), complex(c)))

    return MultFunction(
        lambda p, k: vpow(c, k),
        completely_multiplicative=True,
        prime_vec=vec,
        label=f"prime_constant({c!r})",
        spec={"kind": "prime_constant", "value": value_to_json(c)},
        bounded=abs(complex(c)) <= 1 + 1e-12,
    )


def mrt_modified(stages) -> MultFunction:
    """Completely multiplicative function alternating Archimedean and -1 regimes.

    ``stages`` lists tuples ``(t_m, s, t_tilde, t_next)`` with
    ``t_m < s < s^2 < t_tilde < t_next``; consecutive stages must chain
    (``t_next`` of one equals ``t_m`` of the next).  On ``[t_m, t_tilde]``
    ``f(p) = p^(is)``, on ``(t_tilde, t_next]`` ``f(p) = -1``.  Below the
    first ``t_m`` the first ``s`` is used; beyond the last stage ``f(p) =
    -1``.
    """
    stages = [tuple(float(x) for x in st) for st in stages]
    if not stages:
        raise ArgumentError("mrt_modified needs at least one stage")
    for i, (tm, s, tt, tn) in enumerate(stages):
        if not (tm < s < s * s < tt < tn):
            raise ArgumentError(f"stage {i}: need t_m < s < s^2 < t~ < t_next, got {(tm, s, tt, tn)}")
        if i and stages[i - 1][3] != tm:
            raise ArgumentError(f"stage {i}: t_m must equal the previous t_next")
        if math.log(math.log(tn)) <= tt:
            log.warning("stage %d: t_next <= exp(exp(t~)); double-exponential growth not met", i)
    bounds = [st[0] for st in stages]

    def prime_value(p):
        if p < stages[0][0]:
            return cmath.exp(1j * stages[0][1] * math.log(p))
        import bisect

        i = bisect.bisect_right(bounds, p) - 1
        tm, s, tt, tn = stages[i]
        if p <= tt:
            return cmath.exp(1j * s * math.log(p))
        return -1 + 0j

    return MultFunction(
        lambda p, k: prime_value(p) ** k,
        completely_multiplicative=True,
        label="mrt_modified",
        spec={"kind": "mrt_modified", "stages": [list(st) for st in stages]},
    )


# -- spec files ----------------------------------------------------------------
def character_from_spec(obj, where="character") -> DirichletCharacter:
    if not isinstance(obj, dict) or "modulus" not in obj:
        raise ArgumentError(f"{where}: expected an object with 'modulus'")
    try:
        m = int(obj["modulus"])
    except (TypeError, ValueError) as exc:
        raise ArgumentError(f"{where}.modulus: not an integer") from exc
    if m < 1:
        raise ArgumentError(f"{where}.modulus: must be positive")
    if "values" in obj:
        try:
            return DirichletCharacter.from_json(obj)
        except ArgumentError as exc:
            raise ArgumentError(f"{where}.values: {exc}") from exc
    if obj.get("principal"):
        return principal(m)
    if "index" in obj:
        chars = enumerate_characters(m)
        i = int(obj["index"])
        if not 0 <= i < len(chars):
            raise ArgumentError(f"{where}.index: out of range 0..{len(chars) - 1}")
        return chars[i]
    raise ArgumentError(f"{where}: needs 'values', 'index' or 'principal'")


def from_spec(obj, where: str = "spec") -> MultFunction:
    """Build a function from its JSON description (see README for kinds)."""
    if not isinstance(obj, dict):
        raise ArgumentError(f"{where}: expected an object")
    kind = obj.get("kind")
    label = obj.get("label", "")
    if kind == "character":
        f = from_character(character_from_spec(obj.get("character", obj), where + ".character"))
    elif kind == "modified_character":
        chi = character_from_spec(obj.get("character"), where + ".character")
        f = modify_at_primes(from_character(chi), _kappa_map(obj.get("kappa", {}), where))
    elif kind == "modified":
        base = from_spec(obj.get("base"), where + ".base")
        f = modify_at_primes(base, _kappa_map(obj.get("kappa", {}), where))
    elif kind == "liouville":
        f = liouville()
    elif kind == "liouville_like":
        f = liouville_like(PrimeSet.from_json(obj.get("primes"), where + ".primes"))
    elif kind == "archimedean":
        f = archimedean(_num(obj, "t", where))
    elif kind == "twist":
        f = twist(from_spec(obj.get("base"), where + ".base"), _num(obj, "t", where))
    elif kind == "product":
        fs = obj.get("factors")
        if not isinstance(fs, list) or not fs:
            raise ArgumentError(f"{where}.factors: expected a non-empty list")
        f = from_spec(fs[0], where + ".factors[0]")
        for i, sub in enumerate(fs[1:], 1):
            f = product(f, from_spec(sub, f"{where}.factors[{i}]"))
    elif kind == "power":
        f = power(from_spec(obj.get("base"), where + ".base"), int(_num(obj, "exponent", where)))
    elif kind == "conjugate":
        f = conjugate(from_spec(obj.get("base"), where + ".base"))
    elif kind == "loglog_phase":
        f = loglog_phase()
    elif kind == "prime_constant":
        f = prime_constant(value_from_json(obj.get("value"), where + ".value"))
    elif kind == "mrt_modified":
        st = obj.get("stages")
        if not isinstance(st, list):
            raise ArgumentError(f"{where}.stages: expected a list of 4-tuples")
        f = mrt_modified(st)
    else:
        raise ArgumentError(f"{where}.kind: unknown kind {kind!r}")
    spec = dict(obj)
    f.spec = spec
    if label:
        f.label = label
    return f


def _kappa_map(kap_obj, where) -> dict:
    if not isinstance(kap_obj, dict):
        raise ArgumentError(f"{where}.kappa: expected an object")
    kap = {}
    for key, v in kap_obj.items():
        try:
            p = int(key)
        except ValueError as exc:
            raise ArgumentError(f"{where}.kappa: key {key!r} is not an integer") from exc
        kap[p] = kappa_from_json(v, f"{where}.kappa.{key}")
    return kap


def _num(obj, key, where):
    if key not in obj:
        raise ArgumentError(f"{where}.{key}: missing")
    try:
        return float(obj[key])
    except (TypeError, ValueError) as exc:
        raise ArgumentError(f"{where}.{key}: not a number") from exc


def load_spec_file(path) -> MultFunction:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return from_spec(obj)


def example_mod3() -> MultFunction:
    """``f(n) = chi(n / 2^nu_2(n))`` with chi the non-principal character mod 3."""
    chi = enumerate_characters(3)[1]
    return modify_at_primes(from_character(chi), {2: geometric(ONE)}, label="ex_mod3")


def nu_parity(*primes: int) -> MultFunction:
    """``(-1)^(sum of nu_p(n))`` over the given primes."""
    return liouville_like(PrimeSet.of(primes), label="(-1)^nu_" + "+".join(map(str, primes)))


def spec_primes(cert: ToeplitzCertificate) -> frozenset:
    return frozenset(cert.F) | spec_of(cert.chi.modulus)
