import pytest
from hypothesis import settings

from mertens_audit import sieve
from mertens_audit.engine import MertensOracle

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def mobius_1e6():
    return sieve.build_mobius(10**6)


@pytest.fixture(scope="session")
def mertens_1e6(mobius_1e6):
    return sieve.build_mertens(mobius_1e6)


@pytest.fixture(scope="session")
def totients_1e5():
    return sieve.build_totient(10**5)


@pytest.fixture(scope="session")
def oracle():
    """Dense table to 1e5; shared read-only across tests."""
    return MertensOracle(10**5)
