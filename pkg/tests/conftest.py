import numpy as np
import pytest
from hypothesis import settings

import summlab as sl

settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")

MASTER_SEED = 20260810


@pytest.fixture
def rng():
    return np.random.default_rng(MASTER_SEED)


@pytest.fixture
def small_budget():
    """Cheap search budget for tests that call many searches."""
    return sl.SearchBudget(restarts=24, max_iter=200, seed=MASTER_SEED)


def random_space(rng, allow_sup=True, max_dim=5):
    """A random small space, mixing the norm families."""
    dim = int(rng.integers(1, max_dim + 1))
    roll = rng.integers(0, 5 if allow_sup else 4)
    if roll == 4:
        return sl.sup_slice(dim)
    p = [1.0, 1.5, 2.0, 3.0][roll]
    return sl.lp(p, dim)


def random_family(rng, space, n):
    return sl.VectorFamily(space, rng.standard_normal((n, space.dimension)))
