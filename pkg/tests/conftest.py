import sys
from pathlib import Path

import numpy as np
import pytest

# Make the sibling oracle helper importable regardless of how pytest is run.
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)
