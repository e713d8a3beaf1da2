import numpy as np
import pytest

from cyclemodes import synthetic, to_growth
from cyclemodes.rmt import correlation_matrix


@pytest.fixture(scope="session")
def white_growth():
    """Seeded iid growth panel at the reference dimensions (239 x 63)."""
    rng = np.random.default_rng(20240101)
    return synthetic.white_noise_growth(rng, n_prime=239, n_goods=21)


@pytest.fixture(scope="session")
def white_model(white_growth):
    return correlation_matrix(white_growth)


@pytest.fixture(scope="session")
def lag_panel():
    """Planted two-factor panel with a 4-month shipment->production delay at T=60."""
    rng = np.random.default_rng(77)
    return synthetic.planted_lag_panel(rng)


@pytest.fixture(scope="session")
def lag_growth(lag_panel):
    return to_growth(lag_panel)


@pytest.fixture(scope="session")
def lag_model(lag_growth):
    return correlation_matrix(lag_growth)
