import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from treeharm import build_tree


@pytest.fixture(scope="session")
def tree26():
    return build_tree(2, 6)


@pytest.fixture(scope="session")
def tree24():
    return build_tree(2, 4)


@pytest.fixture(scope="session")
def tree28():
    return build_tree(2, 8)


@pytest.fixture(scope="session")
def tree34():
    return build_tree(3, 4)
