"""Shared fixtures: small deterministic regression datasets."""
import numpy as np
import pytest

from projpost.data import Dataset
from projpost.simgen import gen_toy


def random_dataset(seed: int, n: int = 60, p: int = 4) -> Dataset:
    """A mildly correlated design with an exposure that loads on the
    controls, so dropping a control actually moves the projection."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    gamma = rng.standard_normal(p) * 0.4
    z = x @ gamma + rng.standard_normal(n)
    beta = rng.standard_normal(p) * 0.5
    y = 0.4 * z + x @ beta + rng.standard_normal(n)
    names = tuple(f"X{j + 1}" for j in range(p))
    return Dataset(y=y, z=z, x=x, control_names=names)


@pytest.fixture
def make_ds():
    return random_dataset


@pytest.fixture(scope="session")
def toy():
    """One toy realization shared across read-only tests."""
    ds, spec = gen_toy(0, n=400)
    return ds, spec
