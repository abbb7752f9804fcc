import pytest

from htnfpt.fixtures import diamond
from htnfpt.model import Exists


@pytest.fixture
def dia():
    return diamond(Exists())
