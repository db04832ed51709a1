import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.corrections import SchemeParams, iota_of_sd  # noqa: E402


@pytest.fixture
def dg4():
    return SchemeParams(4, 0.0, 0.0, 0.0)


@pytest.fixture
def sd4():
    return SchemeParams(4, 0.0, 0.0, iota_of_sd(4, 0.0, 0.0))
