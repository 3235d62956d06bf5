import numpy as np
import pytest

from atomloc import PRESETS


@pytest.fixture(scope="session")
def preset_grids():
    """Grids for every preset, computed once per session."""
    return {name: sc.compute() for name, sc in PRESETS.items()}


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
