import pytest

from orchmach import catalog
from orchmach.analysis import EnumerationBounds


@pytest.fixture
def breeds():
    return catalog.breeds()


@pytest.fixture
def small_bounds():
    return EnumerationBounds(depth_cap=16, node_cap=20_000, word_length_cap=4)
