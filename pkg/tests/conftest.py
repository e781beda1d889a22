from __future__ import annotations

import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def structured_reply() -> str:
    return (FIXTURES / "replies" / "followthrough_structured.txt").read_text()


@pytest.fixture
def prose_reply() -> str:
    return (FIXTURES / "replies" / "followthrough_prose.txt").read_text()
