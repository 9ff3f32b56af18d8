"""
.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).parent / "helpers"))


@pytest.fixture
def rng():
    """Random number generator with a fixed seed for each test."""
    return np.random.default_rng(0)
