"""
Szego Lab - Pytest Configuration and Fixtures
"""

import os
import sys

import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(__file__))

from backend.config import reload_config  # noqa: E402
from services.fixtures import make_fixture  # noqa: E402
from services.symbols import identity_symbol  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_config():
    """CLI runs and env overrides must not leak between tests"""
    yield
    reload_config()


@pytest.fixture
def identity():
    return identity_symbol(1)


@pytest.fixture(scope="session")
def example1_small():
    """example1 with u = 0.5: trivial phase, no zero modes"""
    return make_fixture("example1", {"u": 0.5})


@pytest.fixture(scope="session")
def example1_large():
    """example1 with u = 2: one zero-mode pair"""
    return make_fixture("example1", {"u": 2.0})


@pytest.fixture(scope="session")
def example1b():
    return make_fixture("example1b", {"u": 2.0})


@pytest.fixture(scope="session")
def example2():
    """example2 with u = 0.3, v = 0.6: class D, one pair decaying as (u/v)^n"""
    return make_fixture("example2", {"u": 0.3, "v": 0.6})


@pytest.fixture(scope="session")
def example2_trivial():
    return make_fixture("example2", {"u": 0.6, "v": 0.3})


@pytest.fixture(scope="session")
def example3():
    return make_fixture("example3", {"zeta": 2.0})


@pytest.fixture(scope="session")
def example3_complex():
    return make_fixture("example3", {"zeta": 1 + 1j})
