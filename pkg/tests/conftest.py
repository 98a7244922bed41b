from pathlib import Path

import pytest

from basincycles import load_landscape, make_landscape

DATA = Path(__file__).parent / "data"
FIG1_PATH = DATA / "fig1.json"

# the 11-state chain fixture: energies a..k = 2,5,1,2,2,2,4,3,0,1,5
FIG1_ENERGIES = dict(zip("abcdefghijk", [2, 5, 1, 2, 2, 2, 4, 3, 0, 1, 5]))
FIG1_EDGES = list(zip("abcdefghij", "bcdefghijk"))


@pytest.fixture(scope="session")
def fig1():
    return load_landscape(FIG1_PATH.read_text())


@pytest.fixture(scope="session")
def two_state():
    return make_landscape({"x": 0, "y": 1}, [("x", "y", "0.5")])


def make_fig1_shuffled(rng):
    """Same landscape as fig1, states and edges in a random order."""
    order = list(FIG1_ENERGIES)
    rng.shuffle(order)
    edges = list(FIG1_EDGES)
    rng.shuffle(edges)
    edges = [(y, x) if rng.random() < 0.5 else (x, y) for x, y in edges]
    return make_landscape([(s, FIG1_ENERGIES[s]) for s in order], edges)
