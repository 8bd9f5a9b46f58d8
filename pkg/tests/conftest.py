"""Shared fixtures: the canonical two-vertex example and small loop graphs."""

import pytest

from orbitcount import build_graph


def two_vertex_spec(probability=None):
    def edge(src, dst, log_of, name):
        item = {"from": src, "to": dst, "length": {"log_of": log_of}, "name": name}
        if probability is not None:
            item["probability"] = probability
        return item

    return {
        "vertices": 2,
        "edges": [
            edge(1, 1, 2, "alpha"),
            edge(1, 2, 2, "beta"),
            edge(2, 1, 1.5, "gamma1"),
            edge(2, 1, 3, "gamma2"),
        ],
    }


@pytest.fixture
def two_vertex():
    """Two vertices, four edges alpha/beta/gamma1/gamma2 with log-lengths."""
    return build_graph(two_vertex_spec())


@pytest.fixture
def two_vertex_stochastic():
    """Same graph with every transition probability 1/2 (right stochastic)."""
    return build_graph(two_vertex_spec(probability=0.5))


@pytest.fixture
def unit_loop():
    """Single vertex, one loop of length 1, probability 1 (walker never leaves)."""
    return build_graph(
        {"vertices": 1, "edges": [{"from": 1, "to": 1, "length": 1.0, "probability": 1.0}]}
    )


@pytest.fixture
def half_loop():
    """Single vertex, one loop of length 1, probability 1/2 (sub-stochastic)."""
    return build_graph(
        {"vertices": 1, "edges": [{"from": 1, "to": 1, "length": 1.0, "probability": 0.5}]}
    )


@pytest.fixture
def two_loops():
    """Single vertex with integer loops of lengths 1 and 2."""
    return build_graph(
        {
            "vertices": 1,
            "edges": [
                {"from": 1, "to": 1, "length": 1.0},
                {"from": 1, "to": 1, "length": 2.0},
            ],
        }
    )
