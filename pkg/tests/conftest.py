"""Shared pytest fixtures for ergoswitch tests."""

from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest

from ergoswitch.channels import Hamiltonian
from ergoswitch.config import reset_settings


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> Iterator[None]:
    """Isolate every test from the user's config file and cached settings."""
    monkeypatch.setattr("ergoswitch.config.CONFIG_FILE_PATH", tmp_path / "absent.toml")
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator; every test sees the same draws."""
    return np.random.default_rng(20240607)


@pytest.fixture
def qubit_h() -> Hamiltonian:
    """H = diag(0, 1)."""
    return Hamiltonian.qubit()


@pytest.fixture
def qutrit_h() -> Hamiltonian:
    """H = diag(0, 1, 2)."""
    return Hamiltonian.diagonal([0.0, 1.0, 2.0])
