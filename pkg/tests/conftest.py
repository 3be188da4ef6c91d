import numpy as np
import pytest

from hrglab.build import build_bucketed
from hrglab.geometry import ModelParams
from hrglab.points import PointSet, Provenance, sample_binomial


def make_point_set(params: ModelParams, coords) -> PointSet:
    """PointSet from hand-placed (r, theta) pairs given in increasing angle."""
    r = np.array([c[0] for c in coords], dtype=float)
    theta = np.array([c[1] for c in coords], dtype=float)
    assert np.all(np.diff(theta) >= 0), "hand-placed points must be angle-sorted"
    return PointSet(
        params=params,
        r=r,
        theta=theta,
        original_index=np.arange(len(coords), dtype=np.int64),
        provenance=Provenance("binomial", len(coords)),
        seed=(0, 0),
    )


@pytest.fixture(scope="session")
def params75() -> ModelParams:
    return ModelParams.from_n(2000, 0.75, 1.0)


@pytest.fixture(scope="session")
def graph75(params75):
    return build_bucketed(sample_binomial(params75, 2000, seed=1))


@pytest.fixture(scope="session")
def params15() -> ModelParams:
    return ModelParams.from_n(4000, 1.5, 1.0)


@pytest.fixture(scope="session")
def graph15(params15):
    return build_bucketed(sample_binomial(params15, 4000, seed=3))
