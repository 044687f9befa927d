# conftest.py - Point output and the job database at a scratch directory before backend imports

import os
import tempfile

import numpy as np
import pytest

_SCRATCH = tempfile.mkdtemp(prefix="threej-tests-")
os.environ.setdefault("THREEJ_OUTPUT_DIR", os.path.join(_SCRATCH, "out"))
os.environ.setdefault("THREEJ_DATABASE_URL", f"sqlite:///{os.path.join(_SCRATCH, 'jobs.db')}")

from backend.symmetry import ScreenSpec  # noqa: E402


@pytest.fixture
def small_spec() -> ScreenSpec:
    """a = b = 1, sigma = 0: the 3 x 3 screen worked out by hand"""
    return ScreenSpec.of(1, 1, 0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
