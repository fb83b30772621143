import pytest

from additive_lab import builtin


@pytest.fixture(scope="session")
def big_omega():
    return builtin("big_omega")


@pytest.fixture(scope="session")
def omega():
    return builtin("omega")
