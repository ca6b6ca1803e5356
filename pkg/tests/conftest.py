import warnings

import pytest

from mats.mcmc import McmcSettings
from mats.model import default_config


def make_settings(**kwargs) -> McmcSettings:
    """Settings builder that silences the short-chain warning for smoke runs."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return McmcSettings(**kwargs)


@pytest.fixture
def config():
    return default_config()


@pytest.fixture
def fast_settings():
    # short chains: fine for structural tests, not for posterior accuracy
    return make_settings(n_iterations=600, burn_in=300, seed=1)
