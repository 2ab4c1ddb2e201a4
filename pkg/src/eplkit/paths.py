from __future__ import annotations

from pathlib import Path

from platformdirs import user_config_path

APP_NAME = "eplkit"


def config_root() -> Path:
    return user_config_path(APP_NAME)


def config_path() -> Path:
    return config_root() / "config.json"
