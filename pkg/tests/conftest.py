import itertools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import latspace as ls  # noqa: E402

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def canonical():
    return ls.fixtures()


@pytest.fixture(scope="session")
def m2(canonical):
    return canonical["M2"]


@pytest.fixture(scope="session")
def m3(canonical):
    return canonical["M3"]


@pytest.fixture(scope="session")
def n5(canonical):
    return canonical["N5"]


@pytest.fixture(scope="session")
def m2_scs(m2):
    """The recurring two-agent system: agent 1 swaps p and ¬p, agent 2
    collapses p into the top."""
    swap = ls.SpaceFunction(m2, (0, 2, 1, 3))
    collapse = ls.SpaceFunction(m2, (0, 3, 2, 3))
    return ls.Scs(m2, {"1": swap, "2": collapse})


def brute_force_space_functions(lattice) -> list[tuple[int, ...]]:
    """Filtration oracle: test every total self-map against the axioms."""
    out = []
    for images in itertools.product(range(lattice.n), repeat=lattice.n):
        if ls.validate_space_function(lattice, images) is None:
            out.append(images)
    return out
