from functools import lru_cache

import numpy as np
import pytest

from kahlerprod import gallery


@lru_cache(maxsize=None)
def instance(name: str) -> gallery.GalleryInstance:
    """Gallery instances are immutable, so one per name is shared across tests."""
    return gallery.parse_instance(name)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def cgauss(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
