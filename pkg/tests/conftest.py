"""
Shared fixtures.
"""

import numpy as np
import pytest

from models.report_models import TolerancePolicy


@pytest.fixture
def policy():
    """Default tolerances, independent of the environment."""
    return TolerancePolicy()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
