import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multoep import toeplitz as Tz
from multoep.characters import ONE, ZERO, RootOfUnity, enumerate_characters, induce, principal
from multoep.errors import ArgumentError, ClassificationError, InconclusiveError, UnsupportedError
from multoep.multfun import (
    MINUS_ONE,
    evaluate,
    evaluate_range,
    example_mod3,
    from_character,
    liouville,
    modify_at_primes,
    nu_parity,
    periodic_multiplicative,
    product,
    kappa_table,
)
from multoep.verify import certificate_soundness, random_certified, random_periodic_construction

CHI3 = enumerate_characters(3)[1]
N5 = 10**5


@pytest.fixture(scope="module")
def mod3():
    return example_mod3()


@pytest.fixture(scope="module")
def h():
    return product(nu_parity(2), nu_parity(3), label="h")


def test_is_period_at_mod3(mod3, table):
    for b in range(9):
        n = 2**b
        chk = Tz.is_period_at(mod3, n, 3 * n, 10**6, table)
        assert not chk.verified and chk.witness == 3
        assert evaluate(mod3, n + 3 * 3 * n, table) == MINUS_ONE
        assert Tz.is_period_at(mod3, n, 6 * n, 10**6, table).verified


def test_is_period_at_basic(table):
    one = from_character(principal(1))
    assert Tz.is_period_at(one, 5, 1, 1000, table).verified
    with pytest.raises(ArgumentError):
        Tz.is_period_at(one, 0, 1, 1000, table)
    with pytest.raises(ArgumentError):
        Tz.is_period_at(one, 1, 0, 1000, table)
    assert Tz.is_period_at(one, 900, 950, 1000, table).vacuous


def test_certified_period(mod3, table):
    assert Tz.certified_period(mod3, 4) == 24
    seq = evaluate_range(mod3, 4 + 24 * 100, table)
    assert all(seq.phase[4 + 24 * s] == seq.phase[4] for s in range(101))
    assert Tz.certified_period(mod3, 5) == 6
    f = modify_at_primes(from_character(enumerate_characters(7)[2]), {2: kappa_table([MINUS_ONE]), 5: kappa_table([ONE])})
    assert Tz.certified_period(f, 3) == 7 * 2 * 5
    assert Tz.certified_period(f, 2**3 * 5**2 * 11) == 7 * 2**4 * 5**3
    with pytest.raises(UnsupportedError):
        Tz.certified_period(liouville(), 3)
    T = Tz.certified_periods(f, 500)
    assert all(int(T[n]) == Tz.certified_period(f, n) for n in range(1, 501))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_certificate_sound_small(seed):
    f = random_certified(np.random.default_rng(seed))
    checked, bad = certificate_soundness(f, _T, 500, 100, 5 * 10**4)
    assert not bad


def test_skeleton_character(table):
    chi = from_character(CHI3)
    sk = Tz.skeleton(chi, 3, 1000, table)
    assert sk.filled.all()
    assert sk.classes() == [1 + 0j, -1 + 0j, 0j]
    assert Tz.essential_period_test(chi, 3, 1000, table)
    assert not Tz.essential_period_test(chi, 6, 1000, table)
    assert not Tz.essential_period_test(chi, 1, 1000, table)


def test_skeleton_nu2(table):
    f = nu_parity(2)
    sk = Tz.skeleton(f, 2, 4096, table)
    assert sk.classes() == [1 + 0j, None]
    ess = [m for m in range(1, 1025) if Tz.essential_period_test(f, m, 4096, table)]
    assert ess == [2**k for k in range(1, 11)]
    with pytest.raises(ArgumentError):
        Tz.essential_period_test(f, 2000, 4096, table)


def test_skeleton_constant(table):
    one = from_character(principal(1))
    ess = [m for m in range(1, 200) if Tz.essential_period_test(one, m, 1000, table)]
    assert ess == [1]


def test_period_structures(mod3, h, table):
    st_chi = Tz.period_structure(from_character(CHI3), N5, table)
    assert st_chi.essential == [3] and st_chi.chain == [3]
    assert st_chi.spectrum == [3] and st_chi.valuations[3].to_json() == 1
    st = Tz.period_structure(mod3, 10**6, table)
    assert st.spectrum == [2, 3]
    assert st.valuations[2].to_json() == "inf@12" and st.valuations[3].to_json() == 1
    assert st.lcm_closed
    # multiples of 3 vanish, so 3 is essential
    assert st.chain[:4] == [3, 6, 12, 24]
    sh = Tz.period_structure(h, 10**6, table)
    assert sh.spectrum == [2, 3] and all(sh.valuations[p].infinite for p in (2, 3))
    assert sh.chain[:3] == [6, 12, 36]
    assert all(b % a == 0 for a, b in zip(sh.chain, sh.chain[1:]))
    assert all(6**k in sh.essential for k in range(1, 5))


def test_uncertified_structure(table):
    seq = evaluate_range(nu_parity(2), N5, table)
    st = Tz.period_structure(seq, N5, table)
    assert st.spectrum == [2] and st.valuations[2].infinite and not st.certified


def test_non_toeplitz_rejected(table):
    with pytest.raises(ClassificationError) as exc:
        Tz.period_structure(liouville(), N5, table)
    assert exc.value.witness is not None


def test_regularity(mod3, table):
    emp, bound = Tz.regularity_density(mod3, {2: 3}, N5, table)
    assert bound == 2**-4
    assert emp <= bound + 1e-4
    f = product(nu_parity(2), nu_parity(3))
    for k in (1, 2, 4):
        emp, bound = Tz.regularity_density(f, {2: k, 3: k}, N5, table)
        assert bound == 2 ** -(k + 1) + 3 ** -(k + 1)
        assert emp <= bound + 1e-4


def test_minimal_period_of_one(mod3, table):
    assert Tz.minimal_period_of_one(from_character(CHI3), N5, table) == 3
    assert Tz.minimal_period_of_one(mod3, N5, table) == 6
    assert Tz.minimal_period_of_one(from_character(principal(1)), N5, table) == 1
    seq = evaluate_range(mod3, N5, table)
    assert Tz.minimal_period_of_one(seq, N5, table, bound=1000) == 6
    with pytest.raises(ClassificationError):
        Tz.minimal_period_of_one(evaluate_range(liouville(), N5, table), N5, table, bound=1000)


def test_extract_character(mod3, h, table):
    chi6 = Tz.extract_character(mod3, N5, table, m=6)
    assert chi6 == induce(CHI3, 6)
    from multoep.characters import conductor

    assert conductor(chi6) == (3, CHI3)
    assert Tz.extract_character(h, N5, table, m=6) == principal(6)
    assert Tz.extract_character(from_character(CHI3), N5, table) == CHI3


def test_classify_periodic(mod3, table):
    theta = enumerate_characters(5)[1]
    f = periodic_multiplicative(theta, {2: [RootOfUnity(1, 3), MINUS_ONE], 3: [ZERO]})
    res = Tz.classify_periodic(f, N5, table)
    assert res.periodic and res.M == 4 * 3 * 5 and res.t == 5 and res.theta == theta
    assert res.newformula_failures == []
    r3 = Tz.classify_periodic(from_character(CHI3), N5, table)
    assert (r3.M, r3.t, r3.theta) == (3, 3, CHI3)
    rm = Tz.classify_periodic(mod3, N5, table)
    assert not rm.periodic and rm.witness is not None
    bad, bad_m, m = rm.witness
    seq = evaluate_range(mod3, N5, table)
    assert seq.phase[bad] != seq.phase[bad_m] and bad_m - bad == m


def test_newformula_detects_violation():
    theta = enumerate_characters(5)[1]
    f = periodic_multiplicative(theta, {2: [MINUS_ONE]})
    assert Tz.newformula_failures(f, 10, theta) == []
    g = modify_at_primes(f, {3: kappa_table([theta(3), ONE])})
    assert Tz.newformula_failures(g, 10, theta)[0] == (3, 2)


def test_classify_automatic(mod3, h, table):
    f = nu_parity(2)
    res = Tz.classify_automatic(f, 10**6, table)
    assert res.automatic_nonsingular and res.p == 2
    assert (res.f1.preperiod, res.f1.period) == (0, 2)
    assert [res.f1(k) for k in range(4)] == [ONE, MINUS_ONE, ONE, MINUS_ONE]
    for n in range(1, 3000):
        assert Tz.form1_value(res, n, table) == evaluate(f, n, table)
    assert not Tz.classify_automatic(h, 10**6, table).automatic_nonsingular
    r = Tz.classify_automatic(from_character(CHI3), N5, table)
    assert r.automatic_nonsingular and r.reason == "periodic"
    rm = Tz.classify_automatic(mod3, 10**6, table)
    assert rm.automatic_nonsingular and rm.p == 2


def test_lemma_general_check(h, table):
    chi = from_character(CHI3)
    assert Tz.lemma_general_check(chi, 2, 0, 1, 6, N5, table)
    assert Tz.lemma_general_check(chi, 3, 1, 1, 3, N5, table)
    assert Tz.lemma_general_check(h, 5, 0, 1, 6 * 25, N5, table)
    with pytest.raises(InconclusiveError):
        Tz.lemma_general_check(chi, 2, 0, 1, 4, N5, table)


def test_period_report(mod3, table):
    rep = Tz.period_report(mod3, [1, 2, 4, 5], N5, table)
    assert rep.positions == {1: 6, 2: 12, 4: 24, 5: 6}
    assert rep.certified == {1: 6, 2: 12, 4: 24, 5: 6}


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_periodic_roundtrip_property(seed):
    rng = np.random.default_rng(seed)
    f, theta, heads, period = random_periodic_construction(rng, max_period=2000)
    res = Tz.classify_periodic(f, 2 * 10**4, _T)
    assert res.periodic and period % res.M == 0
    assert res.t == theta.modulus and res.theta == theta
    assert not res.newformula_failures


def test_eventual_period():
    ep = Tz.eventual_period([ONE, MINUS_ONE, ONE, ONE, ONE, ONE, ONE])
    assert (ep.preperiod, ep.period) == (2, 1)
    assert Tz.eventual_period([RootOfUnity(k * k, 97) for k in range(200)], P=8) is None


from multoep.arith import sieve  # noqa: E402

_T = sieve(10**5)
