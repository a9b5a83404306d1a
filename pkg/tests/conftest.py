import numpy as np
import pytest

from indexbeat import MarketSpec


@pytest.fixture
def running_example() -> MarketSpec:
    return MarketSpec(r=0.02, mu=np.array([0.08, 0.05]),
                      sigma=np.array([[0.2, 0.0], [0.1, 0.3]]))


@pytest.fixture
def scapm_spec() -> MarketSpec:
    # mu = r*1 + sigma . sigma0, so the discrepancy vanishes by construction.
    sigma = np.array([[0.2, 0.0], [0.1, 0.3]])
    return MarketSpec(r=0.02, mu=0.02 + sigma @ sigma[0], sigma=sigma)
