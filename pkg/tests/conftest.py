import os

import pytest

from linniksieve.core_arith import sieve_primes


@pytest.fixture(autouse=True)
def disable_color_env():
    """
    Ensure colored output is disabled for all tests so rendered tables
    (and other exact string checks) are deterministic regardless of environment.
    """
    os.environ.setdefault("NO_COLOR", "1")
    yield


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    """Log files land under a temporary home, and no budget override leaks in."""
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.delenv("LINNIK_SIEVE_BUDGET", raising=False)
    yield tmp_path


@pytest.fixture(scope="session")
def primes_10k():
    return sieve_primes(10_000)
