import os

import hypothesis
import numpy as np
import pytest

from src.core.types import IndexProfile
from src.fiber.cache import ModeCache
from src.fiber.modes import FiberSpec
from src.optics.field import Grid

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))

WAVELENGTH = 810e-9


@pytest.fixture(scope="session")
def small_grid():
    return Grid(96, 0.25e-6)


@pytest.fixture(scope="session")
def step_fiber():
    # V = 6.2: LP01, LP11, LP21, LP02, LP31, LP12 -> 10 modes with parities
    return FiberSpec(4e-6, 0.2, 0.1, IndexProfile.STEP)


@pytest.fixture(scope="session")
def graded_fiber():
    return FiberSpec(4e-6, 0.2, 0.1, IndexProfile.GRADED)


@pytest.fixture(scope="session")
def mode_cache():
    return ModeCache()


@pytest.fixture(scope="session")
def step_basis(step_fiber, small_grid, mode_cache):
    return mode_cache(step_fiber, WAVELENGTH, small_grid)


@pytest.fixture(scope="session")
def graded_basis(graded_fiber, small_grid, mode_cache):
    return mode_cache(graded_fiber, WAVELENGTH, small_grid)
