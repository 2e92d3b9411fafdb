# tests/conftest.py
import json
import os
import sys
import tempfile
from pathlib import Path

import pytest

# Add the parent directory to the path so we can import our modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from core import builtins
from core.conformal import ConformalMap
from core.representations import AvgRepTriple, adjoint_rep
from utils import config_loader

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch):
    """Every test sees the default toolkit settings unless it writes its own config."""
    monkeypatch.setenv("LCA_CONFIG", os.path.join(tempfile.gettempdir(), "lca-test-missing-config.json"))
    config_loader._loaders.clear()
    yield
    config_loader._loaders.clear()


@pytest.fixture
def corpus_dir():
    return CORPUS_DIR


@pytest.fixture
def vir():
    return builtins.virasoro()


@pytest.fixture
def sl2():
    return builtins.cur_sl2()


@pytest.fixture
def vir_triple(vir):
    """Adjoint module of Virasoro with phi = P = Id."""
    identity = ConformalMap.identity(1)
    return AvgRepTriple(adjoint_rep(vir), identity, identity)


@pytest.fixture
def vir_triple_doubled(vir):
    twice = builtins.scaled_identity(1, 2)
    return AvgRepTriple(adjoint_rep(vir), twice, twice)


@pytest.fixture
def sl2_triple(sl2):
    twice = builtins.scaled_identity(3, 2)
    return AvgRepTriple(adjoint_rep(sl2), twice, twice)


@pytest.fixture
def corpus():
    return builtins.cocycle_corpus()


@pytest.fixture
def temp_bundle_file():
    """Write a bundle dict to a temporary file and return its path."""
    paths = []

    def write(data):
        with tempfile.NamedTemporaryFile(mode="w", suffix=".json", delete=False) as f:
            json.dump(data, f)
            paths.append(f.name)
            return f.name

    yield write
    for path in paths:
        os.unlink(path)


@pytest.fixture
def virasoro_bundle():
    return {
        "format": 1,
        "algebra": {
            "name": "Vir",
            "basis": ["L"],
            "bracket": {"L,L": "(d + 2*l1)*L"},
            "operator": [["1"]],
        },
        "maps": {"Twice": [["2"]], "Deriv": [["d"]]},
    }
