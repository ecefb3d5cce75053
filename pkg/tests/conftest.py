from pathlib import Path

import pytest

from diagramkit.dsl import parse_plan

FIXTURES = Path(__file__).parent / "fixtures"

BUTTERFLY_CAPTION = (
    "A diagram showing the life cycle of a butterfly, going from an egg to "
    "larva to pupa to an adult butterfly and repeating."
)


@pytest.fixture(scope="session")
def butterfly_text() -> str:
    return (FIXTURES / "butterfly.plan").read_text("utf-8")


@pytest.fixture()
def butterfly_plan(butterfly_text):
    return parse_plan(butterfly_text, BUTTERFLY_CAPTION)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES
