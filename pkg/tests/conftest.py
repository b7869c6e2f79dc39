from __future__ import annotations

from pathlib import Path

import pytest

HELPERS = Path(__file__).parent / "helpers"


@pytest.fixture
def toy_adapter_path() -> Path:
    return HELPERS / "toy_adapter.py"


@pytest.fixture
def toy_parser_path() -> Path:
    return HELPERS / "toy_parser.py"
