import numpy as np
import pytest

import risthz as rt


def complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def desk_cfg():
    return rt.SystemConfig()


def tiny_cfg(**overrides):
    """Small THz setup for exhaustive-search oracles."""
    defaults = dict(n_bs=6, n_ris=4, n_ms=5, m_bs=4, m_ms=4, n_s=1, l_paths=2)
    defaults.update(overrides)
    return rt.SystemConfig(**defaults)
