import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))
DATA = HERE / "data"


def read(name: str) -> str:
    return (DATA / name).read_text()


@pytest.fixture
def three_role_ctx():
    from mpst.syntax import parse_context

    return parse_context(read("three_role.ctx"))


@pytest.fixture
def three_role_global():
    from mpst.syntax import parse_global

    return parse_global(read("three_role.global"))
