import math
from pathlib import Path

import pytest

from src.catgen.optics.beam_splitter import BeamSplitterParams

REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIG_DIR = REPO_ROOT / "config"


@pytest.fixture
def splitter_90() -> BeamSplitterParams:
    """|T|^2 = 0.9, the transmissivity of both shipped presets."""
    return BeamSplitterParams.from_transmissivity(0.9)


@pytest.fixture
def splitter_50() -> BeamSplitterParams:
    return BeamSplitterParams.from_transmissivity(0.5)


@pytest.fixture
def phased_splitter() -> BeamSplitterParams:
    return BeamSplitterParams(math.acos(math.sqrt(0.7)), phi_t=0.3, phi_r=-1.1)


@pytest.fixture
def run_env(tmp_path, monkeypatch):
    """Keep CLI logs and default outputs inside the test's temp directory."""
    monkeypatch.setenv("CATGEN_LOG_FILE", str(tmp_path / "catgen.log"))
    monkeypatch.setenv("CATGEN_OUTPUT_DIR", str(tmp_path / "output"))
    monkeypatch.setenv("CATGEN_MAX_WORKERS", "2")
    return tmp_path
