import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from corescale import GrayImage


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def rand_image(rng, h, w, lo=0.0, hi=1.0):
    return GrayImage(lo + (hi - lo) * rng.random((h, w)))
