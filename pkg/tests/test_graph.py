"""Graph model, validation, connectivity, cycles, and ratio diagnostics.

Claims covered:
    - the JSON schema round-trips and the log_of form stores exact logs
    - validation rejects bad lengths, indices, probability sums, mixed
      annotation
    - strong connectivity agrees with a brute-force transitive closure on
      all small random graphs
    - cycle enumeration finds each simple cycle once up to rotation and is
      stable under edge reordering
    - the incommensurability verdict finds a witness for the two-vertex example,
      never flags graphs whose lengths share a common multiple, and reports
      inconclusive without two cycles
"""

import math

import numpy as np
import pytest

from orbitcount import build_graph, cycle_lengths, graph_to_dict, incommensurability_check, strong_connectivity
from orbitcount.errors import (
    IndexOutOfRange,
    MixedProbabilityAnnotation,
    NonPositiveLength,
    ProbabilitySumExceedsOne,
    UnknownEdge,
)
from orbitcount.graph import (
    COMMENSURABLE_WITHIN_TOLERANCE,
    INCOMMENSURABLE_WITNESS,
    INCONCLUSIVE,
)

from conftest import two_vertex_spec


# -- construction and validation ----------------------------------------------


def test_two_vertex_builds_with_exact_log_lengths(two_vertex):
    assert two_vertex.vertex_count == 2
    assert two_vertex.edge_count == 4
    lengths = [e.length for e in two_vertex.edges]
    assert lengths == [math.log(2), math.log(2), math.log(1.5), math.log(3)]
    assert not two_vertex.has_probabilities


def test_single_vertex_loop_is_valid():
    g = build_graph({"vertices": 1, "edges": [{"from": 1, "to": 1, "length": 1.0}]})
    assert g.edge_count == 1


def test_zero_length_rejected():
    with pytest.raises(NonPositiveLength):
        build_graph({"vertices": 1, "edges": [{"from": 1, "to": 1, "length": 0.0}]})


def test_log_of_at_most_one_rejected():
    with pytest.raises(NonPositiveLength):
        build_graph(
            {"vertices": 1, "edges": [{"from": 1, "to": 1, "length": {"log_of": 1.0}}]}
        )


def test_vertex_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        build_graph({"vertices": 2, "edges": [{"from": 1, "to": 3, "length": 1.0}]})


def test_probability_sum_above_one_rejected():
    with pytest.raises(ProbabilitySumExceedsOne):
        build_graph(
            {
                "vertices": 1,
                "edges": [
                    {"from": 1, "to": 1, "length": 1.0, "probability": 0.7},
                    {"from": 1, "to": 1, "length": 2.0, "probability": 0.5},
                ],
            }
        )


def test_mixed_annotation_rejected():
    with pytest.raises(MixedProbabilityAnnotation):
        build_graph(
            {
                "vertices": 1,
                "edges": [
                    {"from": 1, "to": 1, "length": 1.0, "probability": 0.5},
                    {"from": 1, "to": 1, "length": 2.0},
                ],
            }
        )


def test_round_trip_field_for_field(two_vertex_stochastic):
    again = build_graph(graph_to_dict(two_vertex_stochastic))
    assert again == two_vertex_stochastic


def test_edge_lookup_by_name_id_and_pattern(two_vertex):
    assert two_vertex.edge("gamma2").length == math.log(3)
    assert two_vertex.edge(0).name == "alpha"
    assert two_vertex.edge("2-1#2").name == "gamma2"
    assert two_vertex.edge("1-1").name == "alpha"
    with pytest.raises(UnknownEdge):
        two_vertex.edge("2-1")  # two parallel edges, needs #k
    with pytest.raises(UnknownEdge):
        two_vertex.edge("delta")


# -- connectivity ---------------------------------------------------------------


def test_two_vertex_strongly_connected(two_vertex):
    report = strong_connectivity(two_vertex)
    assert report.strongly_connected
    assert report.components == (frozenset({1, 2}),)


def test_one_way_pair_not_strongly_connected():
    g = build_graph({"vertices": 2, "edges": [{"from": 1, "to": 2, "length": 1.0}]})
    report = strong_connectivity(g)
    assert not report.strongly_connected
    assert report.components == (frozenset({1}), frozenset({2}))


def test_single_vertex_with_loop_connected():
    g = build_graph({"vertices": 1, "edges": [{"from": 1, "to": 1, "length": 1.0}]})
    assert strong_connectivity(g).strongly_connected


def _closure_components(n, edges):
    reach = np.eye(n, dtype=bool)
    for src, dst in edges:
        reach[src - 1, dst - 1] = True
    for _ in range(n):
        reach = (reach.astype(int) @ reach.astype(int)) > 0
    comps = {}
    for v in range(n):
        key = frozenset(
            w + 1 for w in range(n) if reach[v, w] and reach[w, v]
        ) | {v + 1}
        comps.setdefault(key, set()).add(v + 1)
    return set(frozenset(c) for c in comps.values())


def test_connectivity_matches_transitive_closure_bruteforce():
    rng = np.random.default_rng(2024)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(0, 13))
        pairs = [
            (int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1))) for _ in range(m)
        ]
        g = build_graph(
            {
                "vertices": n,
                "edges": [{"from": s, "to": t, "length": 1.0} for s, t in pairs],
            }
        )
        report = strong_connectivity(g)
        assert set(report.components) == _closure_components(n, pairs)
        assert report.strongly_connected == (len(report.components) == 1)


# -- cycles ----------------------------------------------------------------------


def test_two_vertex_cycles_up_to_two_edges(two_vertex):
    got = cycle_lengths(two_vertex, max_edges=2)
    assert got == pytest.approx([math.log(2), math.log(3), math.log(6)])


def test_single_loop_cycle():
    g = build_graph({"vertices": 1, "edges": [{"from": 1, "to": 1, "length": 1.0}]})
    assert cycle_lengths(g) == [1.0]


def test_parallel_loops_are_distinct_cycles(two_loops):
    # Loops revisit the vertex, so no simple cycle uses more than one of them.
    assert cycle_lengths(two_loops, max_edges=1) == [1.0, 2.0]
    assert cycle_lengths(two_loops, max_edges=2) == [1.0, 2.0]


def test_acyclic_graph_has_no_cycles():
    g = build_graph({"vertices": 2, "edges": [{"from": 1, "to": 2, "length": 1.0}]})
    assert cycle_lengths(g) == []


def test_cycle_lengths_invariant_under_edge_reordering(two_vertex):
    spec = two_vertex_spec()
    rng = np.random.default_rng(5)
    reference = cycle_lengths(two_vertex)
    for _ in range(5):
        shuffled = dict(spec)
        shuffled["edges"] = [spec["edges"][k] for k in rng.permutation(4)]
        assert cycle_lengths(build_graph(shuffled)) == pytest.approx(reference)


# -- incommensurability ------------------------------------------------------------


def test_two_vertex_incommensurable_witness(two_vertex):
    verdict = incommensurability_check(two_vertex)
    assert verdict.status == INCOMMENSURABLE_WITNESS
    a, b = verdict.witness
    assert (a, b) == pytest.approx((math.log(2), math.log(3)))
    p, q, residual = verdict.rational_approx
    assert q <= 10**6
    assert residual > 1e-12


def test_integer_loops_commensurable(two_loops):
    verdict = incommensurability_check(two_loops)
    assert verdict.status == COMMENSURABLE_WITHIN_TOLERANCE
    p, q, residual = verdict.rational_approx
    assert (p, q) == (1, 2)
    assert residual <= 1e-12


def test_single_cycle_inconclusive():
    g = build_graph(
        {
            "vertices": 2,
            "edges": [
                {"from": 1, "to": 2, "length": 1.0},
                {"from": 2, "to": 1, "length": 0.5},
            ],
        }
    )
    assert incommensurability_check(g).status == INCONCLUSIVE


def test_common_multiple_lengths_never_witness():
    rng = np.random.default_rng(99)
    base = 0.37
    for _ in range(20):
        n = int(rng.integers(1, 4))
        edges = [
            {
                "from": int(rng.integers(1, n + 1)),
                "to": int(rng.integers(1, n + 1)),
                "length": base * int(rng.integers(1, 9)),
            }
            for _ in range(int(rng.integers(2, 7)))
        ]
        g = build_graph({"vertices": n, "edges": edges})
        verdict = incommensurability_check(g)
        assert verdict.status != INCOMMENSURABLE_WITNESS
