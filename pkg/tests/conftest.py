import numpy as np
import pytest

from lphase import arith


@pytest.fixture(scope="session")
def primes_1e5_q3():
    return arith.sieve_primes(10 ** 5, 3)


@pytest.fixture(scope="session")
def primes_1e6_q3():
    return arith.sieve_primes(10 ** 6, 3)


@pytest.fixture(scope="session")
def primes_1e5_q5():
    return arith.sieve_primes(10 ** 5, 5)


@pytest.fixture(scope="session")
def chi3():
    return arith.enumerate_characters(3)[1]


@pytest.fixture(scope="session")
def chi4():
    return arith.enumerate_characters(4)[1]


@pytest.fixture(scope="session")
def chi5_real():
    return arith.enumerate_characters(5)[2]


@pytest.fixture(scope="session")
def chi5_odd():
    return arith.enumerate_characters(5)[1]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(173205080)
