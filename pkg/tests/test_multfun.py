import cmath
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multoep.characters import ONE, ZERO, RootOfUnity, enumerate_characters, principal
from multoep.errors import ArgumentError, UnsupportedError
from multoep.multfun import (
    MINUS_ONE,
    PrimeSet,
    ScaledRoot,
    archimedean,
    conjugate,
    evaluate,
    evaluate_range,
    example_mod3,
    exact_value,
    from_character,
    from_spec,
    geometric,
    kappa_table,
    liouville,
    liouville_like,
    load_spec_file,
    loglog_phase,
    modify_at_primes,
    mrt_modified,
    nu_parity,
    periodic_multiplicative,
    perturbed_archimedean,
    power,
    prime_constant,
    product,
    twist,
    value_from_json,
    value_to_json,
    values_equal,
)
from multoep.verify import random_builder, random_certified

CHI3 = enumerate_characters(3)[1]


def omega_big(n):
    out, d = 0, 2
    while d * d <= n:
        while n % d == 0:
            n //= d
            out += 1
        d += 1
    return out + (n > 1)


def test_example_mod3(table):
    f = example_mod3()
    assert evaluate(f, 10, table) == MINUS_ONE
    assert all(evaluate(f, 2**k, table) == ONE for k in range(1, 20))
    assert evaluate(f, 1, table) == ONE
    for n in range(1, 500):
        m = n
        while m % 2 == 0:
            m //= 2
        assert evaluate(f, n, table) == CHI3(m)


def test_modify_with_table_matches_geometric(table):
    f = modify_at_primes(from_character(CHI3), {2: kappa_table([ONE])})
    g = example_mod3()
    assert np.array_equal(evaluate_range(f, 5000, table).phase, evaluate_range(g, 5000, table).phase)


def test_empty_kappa_is_character(table):
    f = modify_at_primes(from_character(CHI3), {})
    seq = evaluate_range(f, 1000, table)
    assert all(seq.values[n] == complex(CHI3(n)) for n in range(1, 1001))


def test_nu_parity(table):
    f = modify_at_primes(from_character(principal(1)), {5: geometric(MINUS_ONE)})
    g = nu_parity(5)
    for n in range(1, 2000):
        v = 0
        m = n
        while m % 5 == 0:
            m //= 5
            v += 1
        assert evaluate(f, n, table) == evaluate(g, n, table) == MINUS_ONE**v


def test_liouville(table):
    seq = evaluate_range(liouville(), 3000, table)
    for n in range(1, 3001):
        assert seq.values[n] == (-1) ** omega_big(n)


def test_liouville_like(table):
    assert np.all(evaluate_range(liouville_like(PrimeSet.of([])), 1000, table).values[1:] == 1)
    f = liouville_like(PrimeSet.residues(4, [3]))
    for n in range(1, 1000):
        c, m, d = 0, n, 2
        while m > 1:
            while m % d == 0:
                m //= d
                c += d % 4 == 3
            d += 1
        assert evaluate(f, n, table) == MINUS_ONE**c
    assert liouville_like(PrimeSet.of([2, 3])).certificate.F == frozenset({2, 3})


def test_log_windows_set():
    P = PrimeSet.log_windows()
    ps = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 53, 59, 409, 8111, 8117, 160001], dtype=np.int64)
    assert list(P.vec(ps)) == [P(int(p)) for p in ps]
    # k = 1 window is [e, e^2]; k = 2 window is [e^4, e^6]
    assert not P(2) and P(3) and P(7) and not P(11) and P(59) and P(401)


def test_archimedean_and_twist(table):
    assert np.all(evaluate_range(archimedean(0), 100, table).values[1:] == 1)
    f = archimedean(1.5)
    seq = evaluate_range(f, 2000, table)
    n = np.arange(1, 2001)
    assert np.allclose(seq.values[1:], np.exp(1.5j * np.log(n)), atol=1e-12)
    g = twist(from_character(CHI3), 2.0)
    sg = evaluate_range(g, 2000, table)
    chi = np.array([complex(CHI3(int(k))) for k in n])
    assert np.allclose(sg.values[1:], chi * np.exp(2j * np.log(n)), atol=1e-12)


def test_perturbed_archimedean(table):
    f = perturbed_archimedean(1.0)
    seq = evaluate_range(f, 4097, table)
    n = np.arange(1, 4098)
    sign = np.where(n % 2 == 1, 1, -1)
    assert np.allclose(seq.values[1:], sign * np.exp(1j * np.log(n)), atol=1e-12)


def test_product_power_conjugate(table):
    f = example_mod3()
    g = liouville()
    fg = evaluate_range(product(f, g), 3000, table).values
    assert np.allclose(fg, evaluate_range(f, 3000, table).values * evaluate_range(g, 3000, table).values)
    assert np.allclose(evaluate_range(power(archimedean(0.5), 3), 2000, table).values, evaluate_range(archimedean(1.5), 2000, table).values)
    h = from_character(enumerate_characters(7)[1])
    hh = product(h, conjugate(h))
    for n in range(1, 500):
        assert evaluate(hh, n, table) == (ZERO if n % 7 == 0 else ONE)
    assert np.all(evaluate_range(power(h, 0), 100, table).values[1:] == 1)


def test_loglog_phase(table):
    f = loglog_phase()
    v = complex(f.pp(999983, 1))
    assert abs(v - cmath.exp(2j * math.pi / math.log(math.log(999983)))) < 1e-12
    assert abs(2 * math.pi / math.log(math.log(10**6)) - 2 * math.pi / 2.626) < 1e-3
    assert f.pp(13, 1) == ONE
    seq = evaluate_range(f, 10**4, table)
    assert abs(seq.values[17] - cmath.exp(2j * math.pi / math.log(math.log(17)))) < 1e-12


def test_prime_constant(table):
    f = prime_constant(Fraction(1, 2))
    assert evaluate(f, 12, table) == exact_value(Fraction(1, 8))
    assert isinstance(evaluate(f, 12, table), ScaledRoot)
    g = prime_constant(Fraction(-1))
    assert np.array_equal(evaluate_range(g, 1000, table).values, evaluate_range(liouville(), 1000, table).values)
    assert f.bounded and not prime_constant(Fraction(3, 2)).bounded


def test_mrt_modified():
    f = mrt_modified([(10, 20, 500, 10**6), (10**6, 2e6, 5e12, 1e13)])
    assert values_equal(f.pp(13, 1), cmath.exp(20j * math.log(13)))
    assert values_equal(f.pp(503, 1), -1)
    assert values_equal(f.pp(1000003, 1), cmath.exp(2e6j * math.log(1000003)))
    assert values_equal(f.pp(7, 1), cmath.exp(20j * math.log(7)))
    with pytest.raises(ArgumentError):
        mrt_modified([(10, 20, 300, 1000)])
    with pytest.raises(ArgumentError):
        mrt_modified([(10, 20, 500, 1000), (999, 2e3, 5e6, 1e7)])
    with pytest.raises(ArgumentError):
        mrt_modified([])


def test_periodic_multiplicative(table):
    theta = enumerate_characters(5)[1]
    f = periodic_multiplicative(theta, {2: [RootOfUnity(1, 3), ZERO], 3: [MINUS_ONE]})
    P = 4 * 3 * 5
    seq = evaluate_range(f, 20000, table)
    assert np.array_equal(seq.phase[1 : 20001 - P], seq.phase[1 + P : 20001])


def test_kappa_table():
    k = kappa_table([ONE, MINUS_ONE, RootOfUnity(1, 4)], 2)
    assert [k(j) for j in range(1, 8)] == [ONE, MINUS_ONE, RootOfUnity(1, 4), MINUS_ONE, RootOfUnity(1, 4), MINUS_ONE, RootOfUnity(1, 4)]
    with pytest.raises(ArgumentError):
        kappa_table([], 1)
    with pytest.raises(ArgumentError):
        kappa_table([ONE], 2)


def test_modify_rejects_composite():
    with pytest.raises(ArgumentError):
        modify_at_primes(liouville(), {4: geometric(ONE)})


def test_values_json():
    for v in (ONE, ZERO, RootOfUnity(5, 12), exact_value(Fraction(3, 4), RootOfUnity(1, 3)), 0.25 - 1j):
        assert values_equal(value_from_json(json.loads(json.dumps(value_to_json(v)))), v)
    with pytest.raises(ArgumentError):
        value_from_json("x")


SPECS = [
    {"kind": "character", "character": {"modulus": 3, "index": 1}},
    {"kind": "character", "character": {"modulus": 12, "principal": True}},
    {"kind": "modified_character", "character": {"modulus": 3, "index": 1}, "kappa": {"2": {"geometric": [0, 1]}}},
    {"kind": "modified_character", "character": {"modulus": 5, "index": 2}, "kappa": {"3": {"values": [[1, 4], None], "period": 1}}},
    {"kind": "liouville"},
    {"kind": "liouville_like", "primes": {"type": "residues", "modulus": 4, "residues": [3]}},
    {"kind": "liouville_like", "primes": {"type": "set", "primes": [2, 3]}},
    {"kind": "archimedean", "t": 1.25},
    {"kind": "twist", "base": {"kind": "liouville"}, "t": 0.5},
    {"kind": "product", "factors": [{"kind": "liouville"}, {"kind": "character", "character": {"modulus": 4, "index": 1}}]},
    {"kind": "power", "base": {"kind": "archimedean", "t": 0.5}, "exponent": 2},
    {"kind": "conjugate", "base": {"kind": "character", "character": {"modulus": 7, "index": 1}}},
    {"kind": "loglog_phase"},
    {"kind": "prime_constant", "value": {"mag": [1, 2], "root": [0, 1]}},
    {"kind": "modified", "base": {"kind": "liouville"}, "kappa": {"2": {"geometric": [0, 1]}}},
    {"kind": "mrt_modified", "stages": [[10, 20, 500, 100000]]},
]


@pytest.mark.parametrize("spec", SPECS, ids=[s["kind"] + str(i) for i, s in enumerate(SPECS)])
def test_spec_roundtrip(spec, table):
    f = from_spec(spec)
    g = from_spec(json.loads(json.dumps(f.to_spec())))
    assert f.spec_hash() == g.spec_hash()
    a, b = evaluate_range(f, 3000, table), evaluate_range(g, 3000, table)
    assert np.allclose(a.values, b.values, atol=1e-12)


@pytest.mark.parametrize(
    "spec, field",
    [
        ({"kind": "nope"}, "spec.kind"),
        ({"kind": "character", "character": {"modulus": 3, "index": 9}}, "spec.character.index"),
        ({"kind": "modified_character", "character": {"modulus": 3, "index": 1}, "kappa": {"x": {"geometric": [0, 1]}}}, "spec.kappa"),
        ({"kind": "modified_character", "character": {"modulus": 3, "index": 1}, "kappa": {"2": {}}}, "spec.kappa.2"),
        ({"kind": "archimedean"}, "spec.t"),
        ({"kind": "product", "factors": []}, "spec.factors"),
        ({"kind": "liouville_like", "primes": {"type": "odd"}}, "spec.primes"),
        ([], "spec"),
    ],
)
def test_spec_errors_name_field(spec, field):
    with pytest.raises(ArgumentError) as exc:
        from_spec(spec)
    assert str(exc.value).startswith(field)


def test_load_spec_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"kind":\n')
    with pytest.raises(ArgumentError, match="line 2"):
        load_spec_file(p)
    p.write_text(json.dumps(SPECS[2]))
    assert load_spec_file(p).certificate.F == frozenset({2})


def test_unserializable():
    f = modify_at_primes(liouville(), {2: lambda k: ONE})
    with pytest.raises(UnsupportedError):
        f.to_spec()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_builders_are_multiplicative(seed):
    rng = np.random.default_rng(seed)
    f = random_builder(rng)
    seq = evaluate_range(f, 4000, _T)
    for _ in range(50):
        a, b = (int(x) for x in rng.integers(1, 64, size=2))
        if math.gcd(a, b) == 1 or f.completely_multiplicative:
            assert abs(seq.values[a * b] - seq.values[a] * seq.values[b]) < 1e-9
    assert seq.values[1] == 1
    assert np.all(np.abs(seq.values[1:]) <= 1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pointwise_matches_range(seed):
    rng = np.random.default_rng(seed)
    f = random_certified(rng) if seed % 2 else random_builder(rng)
    seq = evaluate_range(f, 3000, _T)
    for n in rng.integers(1, 3001, size=40):
        assert abs(complex(evaluate(f, int(n), _T)) - seq.values[n]) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_certified_values_follow_certificate(seed):
    rng = np.random.default_rng(seed)
    f = random_certified(rng)
    cert = f.certificate
    for p in (2, 3, 5, 7, 11, 13, 29, 31, 37):
        for k in (1, 2, 5):
            assert f.pp(p, k) == cert.value(p, k)


from multoep.arith import sieve  # noqa: E402

_T = sieve(10**4)
