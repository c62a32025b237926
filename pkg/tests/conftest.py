import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gnar.model import GnarCoefficients, GnarOrder, read_model
from gnar.network import bfs_distances, default_weights, read_edge_list
from gnar.partition import read_partition

DATA_DIR = Path(__file__).parent / "data"

#: Location of the real MIT Election Lab file, when available.
ELECTIONS_ENV = "GNAR_ELECTIONS_CSV"
ELECTIONS_DEFAULT = Path(__file__).parent.parent / "data" / "1976-2020-president.csv"


def real_returns_path() -> Path | None:
    env = os.environ.get(ELECTIONS_ENV)
    if env:
        p = Path(env)
        return p if p.exists() else None
    return ELECTIONS_DEFAULT if ELECTIONS_DEFAULT.exists() else None


@pytest.fixture(scope="session")
def fivenet():
    """The five-node fixture network, transcribed from the public object."""
    return read_edge_list(DATA_DIR / "fivenet_edges.csv")


@pytest.fixture(scope="session")
def fivenet_weights(fivenet):
    return default_weights(bfs_distances(fivenet))


@pytest.fixture(scope="session")
def fivenet_partition():
    return read_partition(DATA_DIR / "fivenet_partition.csv")


@pytest.fixture(scope="session")
def table1_model():
    """(coefficients, order) of the two-community simulation study model."""
    return read_model(DATA_DIR / "table1_model.txt")


@pytest.fixture(scope="session")
def table1_truth():
    return np.array([0.27, 0.18, 0.25, 0.30, 0.12, 0.20])


@pytest.fixture(scope="session")
def table1_sim_sd():
    return np.array([0.062, 0.109, 0.061, 0.098, 0.083, 0.127])


@pytest.fixture
def synthetic_returns_path():
    return DATA_DIR / "synthetic_returns.csv"
