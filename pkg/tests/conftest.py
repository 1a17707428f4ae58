import numpy as np
import pytest

from banditabc import make_simulator
from banditabc.simulation import builtin_model


@pytest.fixture(scope="session", autouse=True)
def _warm_compiled_kernel():
    # first SSA call pays JIT compilation; keep that out of timed assertions
    sim = make_simulator(builtin_model("birth_death"), t_end=1.0, n_grid_points=4)
    sim(np.array([5.0, 1.0]), 1)


def gaussian_mean_simulator(n_points=50):
    """Toy data generator: n_points draws from N(theta[0], 1)."""

    def simulate_fn(theta, seed):
        rng = np.random.default_rng(int(seed))
        return rng.normal(theta[0], 1.0, size=n_points)

    return simulate_fn
