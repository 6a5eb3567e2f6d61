"""Shared test fixtures."""

from __future__ import annotations

import textwrap
from pathlib import Path

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def sample_toml() -> str:
    return textwrap.dedent("""\
        version = 1

        [run]
        log_level = "DEBUG"
        max_workers = 1
        out = "results"

        [channel]
        kind = "bec"
        p = 0.4

        [code]
        n = 5
        rate = 0.5
        scenario = "ac"

        [decoder]
        kind = "sc"

        [sim]
        trials = 200
        seed = 7
        early_stop_errors = 50
        chunk_size = 64

        [bounds]
        p_grid = [0.3, 0.5, 0.7]
        n = 8
        fer_target = 1e-3
    """)


@pytest.fixture
def sample_config_path(tmp_path: Path, sample_toml: str) -> Path:
    config_path = tmp_path / "relaxpolar.toml"
    config_path.write_text(sample_toml)
    return config_path
