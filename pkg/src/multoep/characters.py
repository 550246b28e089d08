"""Exact Dirichlet characters.

A character mod ``m`` is stored as a full value table: entry ``r`` holds the
exponent ``e`` of ``chi(r) = exp(2*pi*i*e/den)``, or ``-1`` where
``gcd(r, m) > 1``.  ``den`` is the order of the character, so two equal
characters always have identical tables.  All checks are integer
comparisons.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from .arith import divisors, euler_phi, factor_small
from .errors import ArgumentError, ResourceError

#: Default bound on moduli handled by enumeration and products.
MAX_MODULUS = 10**4


@dataclass(frozen=True)
class RootOfUnity:
    """``exp(2*pi*i*numerator/denominator)`` in lowest terms, or zero.

    ``RootOfUnity.ZERO`` is the absorbing zero element.
    """

    numerator: int = 0
    denominator: int = 1
    is_zero: bool = False

    def __post_init__(self):
        if self.is_zero:
            object.__setattr__(self, "numerator", 0)
            object.__setattr__(self, "denominator", 1)
            return
        if self.denominator < 1:
            raise ArgumentError("denominator must be positive")
        g = math.gcd(self.numerator, self.denominator)
        den = self.denominator // g
        object.__setattr__(self, "numerator", (self.numerator // g) % den)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def from_fraction(cls, q: Fraction) -> "RootOfUnity":
        return cls(q.numerator, q.denominator)

    @property
    def phase(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def order(self) -> int:
        return self.denominator

    def __mul__(self, other):
        if isinstance(other, RootOfUnity):
            if self.is_zero or other.is_zero:
                return ZERO
            return RootOfUnity.from_fraction(self.phase + other.phase)
        if isinstance(other, (complex, float, int)) and not isinstance(other, bool):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if self.is_zero:
            if k == 0:
                return ONE
            if k < 0:
                raise ZeroDivisionError("zero has no negative powers")
            return ZERO
        return RootOfUnity(self.numerator * k, self.denominator)

    def conjugate(self) -> "RootOfUnity":
        if self.is_zero:
            return ZERO
        return RootOfUnity(-self.numerator, self.denominator)

    def __complex__(self):
        if self.is_zero:
            return 0j
        if self.numerator == 0:
            return 1 + 0j
        if 2 * self.numerator == self.denominator:
            return -1 + 0j
        if self.denominator == 4:
            return 1j if self.numerator == 1 else -1j
        return cmath.exp(2j * math.pi * self.numerator / self.denominator)

    def __abs__(self):
        return 0 if self.is_zero else 1

    def to_json(self):
        return None if self.is_zero else [self.numerator, self.denominator]

    @classmethod
    def from_json(cls, obj) -> "RootOfUnity":
        if obj is None:
            return ZERO
        num, den = obj
        return cls(int(num), int(den))

    def __repr__(self):
        if self.is_zero:
            return "ZERO"
        return f"e({self.numerator}/{self.denominator})"


ZERO = RootOfUnity(is_zero=True)
ONE = RootOfUnity(0, 1)


def _reduce_table(exps: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    """Rescale exponents to the smallest common denominator."""
    nz = exps[exps >= 0]
    g = den
    for e in np.unique(nz):
        g = math.gcd(g, int(e))
        if g == 1:
            break
    g = math.gcd(g, den)
    out = exps.copy()
    out[out >= 0] //= g
    return out, den // g


class DirichletCharacter:
    """A Dirichlet character given by its exact value table mod ``modulus``."""

    def __init__(self, modulus: int, exps: Iterable[int], den: int, *, validate: bool = False):
        exps = np.asarray(list(exps) if not isinstance(exps, np.ndarray) else exps, dtype=np.int64)
        if modulus < 1 or exps.shape != (modulus,):
            raise ArgumentError("value table length must equal the modulus")
        if den < 1:
            raise ArgumentError("den must be positive")
        exps = np.where(exps >= 0, exps % den, -1)
        exps, den = _reduce_table(exps, den)
        exps.setflags(write=False)
        self.modulus = int(modulus)
        self.exps = exps
        self.den = int(den)
        if validate:
            self.validate()

    # -- basic access -----------------------------------------------------
    def __call__(self, n: int) -> RootOfUnity:
        e = int(self.exps[n % self.modulus])
        return ZERO if e < 0 else RootOfUnity(e, self.den)

    def exponent(self, n: int) -> int:
        """Exponent of ``chi(n)`` over ``den`` (``-1`` for zero)."""
        return int(self.exps[n % self.modulus])

    @property
    def order(self) -> int:
        return self.den

    @property
    def values(self) -> list[RootOfUnity]:
        return [self(r) for r in range(self.modulus)]

    @cached_property
    def complex_table(self) -> np.ndarray:
        out = np.zeros(self.modulus, dtype=complex)
        nz = self.exps >= 0
        out[nz] = np.exp(2j * np.pi * self.exps[nz] / self.den)
        # exact values for the real cases
        out[nz & (self.exps == 0)] = 1
        if self.den % 2 == 0:
            out[nz & (2 * self.exps == self.den)] = -1
        return out

    def is_principal(self) -> bool:
        return self.den == 1

    def is_real(self) -> bool:
        return self.den <= 2

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and self.den == other.den
            and np.array_equal(self.exps, other.exps)
        )

    def __hash__(self):
        return hash((self.modulus, self.den, self.exps.tobytes()))

    def __repr__(self):
        return f"DirichletCharacter(modulus={self.modulus}, order={self.den})"

    @property
    def label(self) -> str:
        return f"chi[{self.modulus}:{self.index_key()}]"

    def index_key(self) -> str:
        import hashlib

        return hashlib.sha256(self.exps.tobytes() + bytes([self.den % 256])).hexdigest()[:8]

    # -- checks -----------------------------------------------------------
    def validate(self):
        """Raise ArgumentError unless the table is a genuine character."""
        m = self.modulus
        r = np.arange(m)
        coprime = np.gcd(r, m) == 1
        if not np.array_equal(self.exps >= 0, coprime):
            raise ArgumentError("character must vanish exactly off the units")
        if self.exps[1 % m] != 0:
            raise ArgumentError("chi(1) must be 1")
        units = r[coprime]
        ea = self.exps[units]
        prod_idx = np.outer(units, units) % m
        lhs = self.exps[prod_idx]
        rhs = (ea[:, None] + ea[None, :]) % self.den
        if not np.array_equal(lhs, rhs):
            raise ArgumentError("table is not multiplicative on the units")
        phi = len(units)
        if phi % self.den:
            raise ArgumentError("values must be phi(m)-th roots of unity")

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"modulus": self.modulus, "values": [v.to_json() for v in self.values]}

    @classmethod
    def from_json(cls, obj) -> "DirichletCharacter":
        m = int(obj["modulus"])
        vals = [RootOfUnity.from_json(v) for v in obj["values"]]
        if len(vals) != m:
            raise ArgumentError("values must list one entry per residue")
        den = 1
        for v in vals:
            if not v.is_zero:
                den = den * v.denominator // math.gcd(den, v.denominator)
        exps = [-1 if v.is_zero else v.numerator * (den // v.denominator) for v in vals]
        return cls(m, exps, den, validate=True)

    # -- algebra ----------------------------------------------------------
    def conjugate(self) -> "DirichletCharacter":
        e = np.where(self.exps >= 0, (-self.exps) % self.den, -1)
        return DirichletCharacter(self.modulus, e, self.den)

    def __pow__(self, k: int) -> "DirichletCharacter":
        e = np.where(self.exps >= 0, (self.exps * k) % self.den, -1)
        return DirichletCharacter(self.modulus, e, self.den)

    def __mul__(self, other):
        if isinstance(other, DirichletCharacter):
            return char_product(self, other)
        return NotImplemented


def principal(m: int) -> DirichletCharacter:
    r = np.arange(m)
    return DirichletCharacter(m, np.where(np.gcd(r, m) == 1, 0, -1), 1)


# -- enumeration ----------------------------------------------------------
def _multiplicative_order(g: int, n: int, group_order: int) -> int:
    order = group_order
    for p, _ in factor_small(group_order):
        while order % p == 0 and pow(g, order // p, n) == 1:
            order //= p
    return order


def _cyclic_generators(p: int, e: int) -> list[tuple[int, int]]:
    """Generators ``(g, ord)`` of (Z/p^e)* as a product of cyclic groups."""
    q = p**e
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            return [(3, 2)]
        return [(q - 1, 2), (5, 2 ** (e - 2))]
    phi = q // p * (p - 1)
    for g in range(2, q):
        if g % p and _multiplicative_order(g, q, phi) == phi:
            return [(g, phi)]
    raise AssertionError("no primitive root found")  # unreachable for odd prime powers


def unit_group(m: int) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Discrete-log table of (Z/m)*.

    Returns ``(units, logs, orders)``: ``units`` sorted, ``logs[i]`` the
    exponent vector of ``units[i]`` over the CRT-lifted generators whose
    cyclic orders are ``orders``.
    """
    gens: list[tuple[int, int]] = []
    for p, e in factor_small(m):
        q = p**e
        rest = m // q
        for g, o in _cyclic_generators(p, e):
            # lift: G = g mod q, G = 1 mod rest
            if rest == 1:
                G = g % m
            else:
                t = ((g - 1) * pow(rest, -1, q)) % q
                G = (1 + rest * t) % m
            gens.append((G, o))
    orders = [o for _, o in gens]
    elems = {1 % m: ()}
    for G, o in gens:
        new = {}
        for u, vec in elems.items():
            x = u
            for a in range(o):
                new[x] = vec + (a,)
                x = x * G % m
        elems = new
    units = np.array(sorted(elems), dtype=np.int64)
    logs = np.array([elems[int(u)] for u in units], dtype=np.int64).reshape(len(units), len(gens))
    return units, logs, orders


def enumerate_characters(m: int, bound: int = MAX_MODULUS) -> list[DirichletCharacter]:
    """All ``phi(m)`` characters mod ``m``; the principal character first."""
    if m < 1:
        raise ArgumentError("modulus must be positive")
    if m > bound:
        raise ResourceError(f"modulus {m} exceeds the enumeration bound {bound}")
    units, logs, orders = unit_group(m)
    lam = 1
    for o in orders:
        lam = lam * o // math.gcd(lam, o)
    scale = np.array([lam // o for o in orders], dtype=np.int64)
    out = []
    for choice in itertools.product(*[range(o) for o in orders]):
        c = np.array(choice, dtype=np.int64) * scale
        exps = np.full(m, -1, dtype=np.int64)
        exps[units] = (logs @ c) % lam if orders else 0
        out.append(DirichletCharacter(m, exps, lam))
    if len(out) != euler_phi(m):
        raise AssertionError("character count differs from phi(m)")
    return out


def characters_up_to(Q: int) -> list[DirichletCharacter]:
    """Every character of every modulus ``q <= Q``."""
    return [chi for q in range(1, Q + 1) for chi in enumerate_characters(q)]


def brute_force_characters(m: int) -> set[tuple]:
    """Oracle: all homomorphisms (Z/m)* -> roots of unity by exhaustive search.

    Each unit gets a phi(m)-th root of unity; assignments are pruned by
    multiplicativity.  Only practical for tiny ``m``.
    """
    units = [u for u in range(m) if math.gcd(u, m) == 1]
    phi = len(units)
    found = set()
    for assign in itertools.product(range(phi), repeat=phi):
        val = dict(zip(units, assign))
        if val[1 % m] != 0:
            continue
        if all((val[a] + val[b]) % phi == val[a * b % m] for a in units for b in units):
            found.add(tuple(Fraction(val.get(r, -1), phi) if r in val else None for r in range(m)))
    return found


# -- induction, conductor, products ---------------------------------------
def induce(theta: DirichletCharacter, m: int) -> DirichletCharacter:
    """The character mod ``m`` induced by ``theta`` (``theta.modulus | m``)."""
    t = theta.modulus
    if m % t:
        raise ArgumentError(f"modulus {t} does not divide {m}")
    r = np.arange(m)
    exps = np.where(np.gcd(r, m) == 1, theta.exps[r % t], -1)
    return DirichletCharacter(m, exps, theta.den)


def _restrict_candidate(chi: DirichletCharacter, t: int) -> Optional[DirichletCharacter]:
    """The character mod ``t`` inducing ``chi``, if one exists."""
    m = chi.modulus
    units = np.flatnonzero(chi.exps >= 0)
    cls = units % t
    e = chi.exps[units]
    uniq, first = np.unique(cls, return_index=True)
    cand = np.full(t, -1, dtype=np.int64)
    cand[uniq] = e[first]
    if not np.array_equal(cand[cls], e):
        return None
    r = np.arange(t)
    if not np.array_equal(cand >= 0, np.gcd(r, t) == 1):
        return None  # unreachable: units mod m cover units mod t
    return DirichletCharacter(t, cand, chi.den)


def conductor(chi: DirichletCharacter) -> tuple[int, DirichletCharacter]:
    """Smallest ``t | m`` with a character mod ``t`` inducing ``chi``.

    Returns ``(t, theta)`` with ``theta`` primitive.
    """
    for t in divisors(chi.modulus):
        theta = _restrict_candidate(chi, t)
        if theta is not None:
            return t, theta
    raise AssertionError("the modulus itself always works")


def inducing_moduli(chi: DirichletCharacter) -> list[int]:
    """All divisors ``t`` of the modulus from which ``chi`` is induced."""
    return [t for t in divisors(chi.modulus) if _restrict_candidate(chi, t) is not None]


def inducing_character(chi: DirichletCharacter, t: int) -> DirichletCharacter:
    """The character mod ``t`` inducing ``chi``; ``t`` must be an inducing modulus."""
    if t < 1 or chi.modulus % t:
        raise ArgumentError(f"{t} does not divide the modulus {chi.modulus}")
    theta = _restrict_candidate(chi, t)
    if theta is None:
        raise ArgumentError(f"{chi.label} is not induced from modulus {t}")
    return theta


def is_primitive(chi: DirichletCharacter) -> bool:
    return conductor(chi)[0] == chi.modulus


def primitive_characters(t: int) -> list[DirichletCharacter]:
    return [chi for chi in enumerate_characters(t) if is_primitive(chi)]


def char_product(
    chi1: DirichletCharacter, chi2: DirichletCharacter, bound: int = MAX_MODULUS
) -> DirichletCharacter:
    """Pointwise product, a character mod ``lcm`` of the moduli."""
    m1, m2 = chi1.modulus, chi2.modulus
    L = m1 * m2 // math.gcd(m1, m2)
    if L > bound:
        raise ResourceError(f"lcm modulus {L} exceeds the bound {bound}")
    den = chi1.den * chi2.den // math.gcd(chi1.den, chi2.den)
    r = np.arange(L)
    e1 = chi1.exps[r % m1]
    e2 = chi2.exps[r % m2]
    exps = np.where((e1 >= 0) & (e2 >= 0), e1 * (den // chi1.den) + e2 * (den // chi2.den), -1)
    return DirichletCharacter(L, exps, den)


def character_from_values(m: int, values: dict[int, RootOfUnity]) -> DirichletCharacter:
    """Build and validate a character mod ``m`` from values on the units."""
    den = 1
    for v in values.values():
        if not v.is_zero:
            den = den * v.denominator // math.gcd(den, v.denominator)
    exps = np.full(m, -1, dtype=np.int64)
    for r, v in values.items():
        if not v.is_zero:
            exps[r % m] = v.numerator * (den // v.denominator)
    return DirichletCharacter(m, exps, den, validate=True)
