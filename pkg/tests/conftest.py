import numpy as np
import pytest

from field_ops import make_initial_field
from grid_cutoff import make_grid
from integrator import LLBIntegrator, SimConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid_1d():
    return make_grid(1, 2.0, 0.25)


@pytest.fixture
def grid_2d():
    return make_grid(2, 1.0, 0.25)


@pytest.fixture
def small_config():
    """Cheap 1-D configuration: 17 nodes, 20 steps, 5 samples."""
    return SimConfig(
        radius=2.0,
        spacing=0.25,
        dt=1e-3,
        horizon=0.02,
        sample_stride=5,
        modes=4,
        tail_ladder=(0.5, 1.0, 1.5),
        block_size=4,
    )


@pytest.fixture
def small_integrator(small_config):
    return LLBIntegrator(small_config)


@pytest.fixture
def bump(small_integrator):
    return make_initial_field(small_integrator.grid, "bump", amplitude=0.8, width=1.0)


@pytest.fixture
def write_config(tmp_path):
    def write(text, name="experiment.toml"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
