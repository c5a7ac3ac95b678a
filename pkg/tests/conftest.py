import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ccshare.geometry import Position, PropagationParams, four_room_layout
from ccshare.ran import BaseStation, CarrierPlan, Operator, make_snapshot


@pytest.fixture
def layout():
    return four_room_layout(50.0, 10.0)


@pytest.fixture
def params():
    return PropagationParams()


@pytest.fixture
def plan():
    return CarrierPlan()


@pytest.fixture
def default_bss():
    return (
        BaseStation(Operator.A, Position(12.5, 12.5)),
        BaseStation(Operator.A, Position(37.5, 37.5)),
        BaseStation(Operator.B, Position(37.5, 12.5)),
        BaseStation(Operator.B, Position(12.5, 37.5)),
    )


def random_snapshot(layout, params, bss, rng, lam=5.0, noise_dbm=-80.0):
    """Snapshot with Poisson loads and uniform whole-building UEs."""
    side = layout.width_m
    ues = {}
    for op in (Operator.A, Operator.B):
        n = rng.poisson(lam)
        ues[op] = [
            Position(rng.uniform(0, side), rng.uniform(0, side)) for _ in range(n)
        ]
    return make_snapshot(layout, params, bss, ues, noise_dbm)


@pytest.fixture
def snapshot_factory(layout, params, default_bss):
    def make(seed=0, lam=5.0):
        return random_snapshot(layout, params, default_bss, np.random.default_rng(seed), lam)

    return make
