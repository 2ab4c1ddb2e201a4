from __future__ import annotations

from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def isolated_config(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    path = tmp_path / "user-config" / "config.json"
    monkeypatch.setattr("eplkit.config.config_path", lambda: path)
    return path


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
