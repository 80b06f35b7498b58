"""
Shared pytest fixtures for the gcrm test scripts.
"""

import os
import sys

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

Z_GATE = 5.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    """Every test sees the packaged config.yaml without GCRM_* overrides."""
    for key in list(os.environ):
        if key.startswith("GCRM_"):
            monkeypatch.delenv(key, raising=False)
    from gcrm.config import reload_config
    reload_config()
    yield
    reload_config()


def assert_within(estimate, exact, std_error, gate=Z_GATE):
    """|estimate - exact| <= gate * std_error."""
    assert std_error > 0, "standard error must be positive"
    z = (estimate - exact) / std_error
    assert abs(z) <= gate, f"estimate {estimate:.6g} vs exact {exact:.6g}: z = {z:.2f}"
