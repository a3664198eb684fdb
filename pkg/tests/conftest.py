"""Shared fixtures."""

from __future__ import annotations

import typing as t

import numpy as np
import pytest

if t.TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every test draws the same values."""
    return np.random.default_rng(1234)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[..., Path]:
    """Write ``key = value`` lines to a config file under ``tmp_path``."""

    def _write(text: str, name: str = "experiment.cfg") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
