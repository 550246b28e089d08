import pytest

from multoep.arith import sieve


@pytest.fixture(scope="session")
def table():
    # covers mean_progression(a <= 7) at N = 10^5 and all 10^6-scale checks
    return sieve(10**6 + 10**4)


@pytest.fixture(scope="session")
def table7():
    return sieve(10**7 + 10**4)
