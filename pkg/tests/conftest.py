import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from bubblex.mesh import build_mesh

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_mesh(name):
    doc = json.loads((FIXTURES / name).read_text())
    return build_mesh(doc["vertices"], doc["cells"])


@pytest.fixture(scope="session")
def d2():
    return load_mesh("diamond2d.json")


@pytest.fixture(scope="session")
def d3():
    return load_mesh("twotet3d.json")


@pytest.fixture(scope="session")
def d2r1():
    return load_mesh("diamond2d_r1.json")


@pytest.fixture(scope="session")
def ws_d2(d2):
    from bubblex.weights import build_weight_system

    return build_weight_system(d2)


@pytest.fixture(scope="session")
def ws_d3(d3):
    from bubblex.weights import build_weight_system

    return build_weight_system(d3)
