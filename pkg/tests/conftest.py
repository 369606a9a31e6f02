import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hcflow.catalog import sample_metric, sample_params
from hcflow.geometry import Geometry


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def metrics(seed: int, n: int, **kwargs):
    gen = np.random.default_rng(seed)
    return [sample_metric(gen, **kwargs) for _ in range(n)]


def params_for(geometry: Geometry, seed: int = 0):
    return sample_params(geometry, np.random.default_rng(seed))


ALL_GEOMETRIES = list(Geometry)
