import pytest

from rslearn.graph import Dag

A, B, C, D = 0, 1, 2, 3


@pytest.fixture
def chain3():
    return Dag.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def collider3():
    return Dag.from_edges(3, [(0, 2), (1, 2)])


@pytest.fixture
def triangle3():
    return Dag.from_edges(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def diamond_left():
    return Dag.from_edges(4, [(A, B), (A, C), (A, D), (B, D), (C, D)])


@pytest.fixture
def diamond_middle():
    return Dag.from_edges(4, [(A, B), (C, A), (A, D), (B, D), (C, D)])


@pytest.fixture
def diamond_right():
    return Dag.from_edges(4, [(B, A), (C, A), (A, D), (B, D), (C, D)])

