"""Shared fixtures: the default scenario and a fast reduced variant."""

import dataclasses

import pytest

from jrcsim.context import build_context
from jrcsim.scenario import ScenarioConfig


@pytest.fixture(scope="session")
def default_scenario():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def default_context(default_scenario):
    return build_context(default_scenario)


@pytest.fixture(scope="session")
def fast_scenario(default_scenario):
    """Same physics, desk-scale Monte Carlo and coarse grids."""
    sc = default_scenario
    return dataclasses.replace(
        sc,
        detection=dataclasses.replace(sc.detection, trials=5000, kappa_points=9),
        sweep=dataclasses.replace(sc.sweep, realizations=5),
        power=dataclasses.replace(sc.power, points=7),
        optimizer=dataclasses.replace(
            sc.optimizer, power_points=24, rho_points=11, kappa_points=51
        ),
    )
