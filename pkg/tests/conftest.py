import warnings

import numpy as np
import pytest
from hypothesis import settings

from subbandit.constraints import build_constraints
from subbandit.submod_core import CoverageProfile, LinearSubmodularModel

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_model(rng, n, d, w_scale=1.0):
    p = rng.uniform(0, 1, size=(n, d))
    w = rng.uniform(0, w_scale, size=d)
    return LinearSubmodularModel(CoverageProfile(p), w)


def random_constraints(rng, model, l=1, n_partitions=1, cardinality=None, cap_range=(1, 3)):
    """Knapsacks with budgets that admit every singleton, plus genre caps and a cardinality cap."""
    n, d = model.n_items, model.profile.n_genres
    costs = rng.uniform(0.05, 1.0, size=(l, n))
    budgets = [float(rng.uniform(row.max(), row.sum())) for row in costs]
    matroid_genres = rng.choice(d, size=min(n_partitions, d), replace=False)
    mask = model.profile.p[:, matroid_genres] >= 0.5
    cap = int(rng.integers(*cap_range, endpoint=True))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_constraints(
            n, costs, budgets,
            genre_mask=mask if n_partitions else None,
            genre_cap=cap if n_partitions else None,
            cardinality=cardinality,
        )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
