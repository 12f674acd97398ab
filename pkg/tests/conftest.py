"""Shared fixtures: one default environment, one set of fitted models, one cache.

Fitting and channel profiling dominate test runtime, so both are session
scoped. Tests that need a modified model use dataclasses.replace and never
mutate the shared instances (all model types are frozen).
"""
import pytest

import uanrelay as ur

FIT_SNRS = (5.0, 10.0, 15.0, 20.0, 25.0)


@pytest.fixture(scope="session")
def env():
    return ur.Environment()


@pytest.fixture(scope="session")
def models(env):
    fitted = ur.fit_channel_models(FIT_SNRS, env)
    return {m.snr0_db: m for m in fitted}


@pytest.fixture(scope="session")
def m15(models):
    return models[15.0]


@pytest.fixture(scope="session")
def cache(env):
    return ur.ChannelCache(env)
