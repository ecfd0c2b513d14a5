import numpy as np
import pytest

from helpers import corpus_slice


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def identical_context_slice():
    """sunA and sunB share a context distribution; moonX does not."""
    rng = np.random.default_rng(7)
    sky = [f"sky{i}" for i in range(8)]
    ground = [f"ground{i}" for i in range(8)]
    docs = []
    for _ in range(2000):
        sun = "sunA" if rng.random() < 0.5 else "sunB"
        docs.append([sky[rng.integers(8)], sun, sky[rng.integers(8)]])
        docs.append([ground[rng.integers(8)], "moonX", ground[rng.integers(8)]])
    return corpus_slice(2020, docs)
