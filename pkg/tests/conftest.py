import json
import random

import pytest

from triadeform import (
    DeformedGroup,
    TriMatrixGroup,
    from_group,
    parse_ring,
)

SEED = 20260814


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def ring_z():
    return parse_ring("Z")


@pytest.fixture(scope="session")
def ring_q():
    return parse_ring("Q")


@pytest.fixture(scope="session")
def ring_z3():
    return parse_ring("Z/3")


@pytest.fixture(scope="session")
def ring_z5():
    return parse_ring("Z/5")


@pytest.fixture(scope="session")
def ring_sqrt2():
    return parse_ring("Z[sqrt(2)]")


@pytest.fixture(scope="session")
def t3_z3():
    return DeformedGroup(parse_ring("Z/3"), 3)


@pytest.fixture(scope="session")
def t3_z3_fg(t3_z3):
    return from_group(t3_z3)


@pytest.fixture(scope="session")
def t2_z3():
    return TriMatrixGroup(parse_ring("Z/3"), 2)


@pytest.fixture(scope="session")
def t2_z3_fg(t2_z3):
    return from_group(t2_z3)


@pytest.fixture
def group_file(tmp_path):
    """Write a group description JSON and return its path."""

    def write(data, name="group.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write
