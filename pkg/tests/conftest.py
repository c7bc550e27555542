import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "spanhop",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("spanhop")


def random_graph(n, p, seed, weights=None):
    from spanhop.generators import GenSpec, generate

    return generate(GenSpec("gnp", {"n": n, "p": p}, weights=weights or "unit", seed=seed))


@pytest.fixture(scope="session")
def small_weighted_graph():
    return random_graph(48, 0.15, seed=11, weights="uniform(1,4)")


@pytest.fixture(scope="session")
def small_unweighted_graph():
    return random_graph(48, 0.15, seed=12)
