import numpy as np
import pytest

from chomet.radio import ScenarioConfig, generate_timeline


def small_timeline(ue_count=1, cell_count=2, slots=3, seed=7, **overrides):
    """Tiny volatile timeline; fits under the exact-DP dimension cap."""
    kwargs = dict(
        mode="volatile",
        ue_count=ue_count,
        cell_count=cell_count,
        slots=slots,
        change_period=1,
        beta=0.5,
        gamma=1.0,
        delta=0.5,
    )
    kwargs.update(overrides)
    return generate_timeline(ScenarioConfig(**kwargs), np.random.SeedSequence([seed, 0]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
