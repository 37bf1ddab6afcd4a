import dataclasses

import pytest

from oamsm import SystemConfig, build_channel_tensor


@pytest.fixture(scope="session")
def default_config():
    return SystemConfig()


@pytest.fixture(scope="session")
def default_tensor(default_config):
    return build_channel_tensor(default_config)


@pytest.fixture(scope="session")
def short_range_config():
    """Geometry where adjacent pairs are resolvable in received power:
    2 m range keeps the beam width below the element spacing."""
    return dataclasses.replace(SystemConfig(), distance_m=2.0, waist_m=0.018)


@pytest.fixture(scope="session")
def short_range_tensor(short_range_config):
    return build_channel_tensor(short_range_config)


@pytest.fixture(scope="session")
def tiny_config():
    """Smallest nontrivial system: 2 antennas, 2 states, BPSK."""
    return dataclasses.replace(
        SystemConfig(), tx_antennas=2, oam_states=(-1, 1), constellation_order=2
    )
