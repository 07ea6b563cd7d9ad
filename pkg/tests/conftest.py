import pytest

from sortaid.cli import resolve_scenario
from sortaid.scenario import TaskState, load_scenario


@pytest.fixture
def golden_state() -> TaskState:
    return load_scenario(str(resolve_scenario("state8")))
