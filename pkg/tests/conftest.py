import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import classifier_graph, two_butterfly_graph, two_square_graph


@pytest.fixture
def two_butterfly():
    return two_butterfly_graph()


@pytest.fixture
def two_square():
    return two_square_graph()


@pytest.fixture
def crafted():
    return classifier_graph()
