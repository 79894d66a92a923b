import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cavityflux.presets import build_preset  # noqa: E402


@pytest.fixture(scope="session")
def fig1a():
    return build_preset("fig1a")


@pytest.fixture(scope="session")
def fig1b():
    return build_preset("fig1b")


@pytest.fixture(scope="session")
def fig2():
    return build_preset("fig2")


@pytest.fixture(scope="session")
def fig3():
    return build_preset("fig3")


def empty_square_config(openings=(), alpha=0.0):
    return {
        "cavities": [{"id": "C1", "origin": [0.0, 0.0], "side": 1.0}],
        "discs": [],
        "openings": list(openings),
        "alpha": alpha,
    }
