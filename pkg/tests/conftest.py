import numpy as np
import pytest

import magheat as mh


@pytest.fixture(scope="session")
def zero_field():
    return mh.make_field("radial-step", {"b0": 0.0, "r": 1.0})


@pytest.fixture(scope="session")
def step_half():
    """Unit-disc step field with total flux 1/2."""
    return mh.make_field("radial-step", {"b0": 1.0, "r": 1.0})


@pytest.fixture(scope="session")
def bump_field():
    return mh.make_field("radial-bump", {"b0": 1.0, "r": 1.0})


@pytest.fixture(scope="session")
def offset_bump():
    return mh.make_field("offset-bump", {"b0": 1.0, "r": 1.0, "center": [0.7, 0.3]})


@pytest.fixture(scope="session")
def dipole():
    return mh.make_field("dipole-pair", {"b0": 1.0, "r": 0.5, "center": [1.5, 0.0]})


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
