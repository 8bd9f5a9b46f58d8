"""Exact brute-force counting and probability masses, the library's ground truth.

Two expansion engines share the same best-first (smallest length first)
discipline:

- :func:`enumerate_paths` streams every individual finite path as a
  :class:`PathAtom`, exactly once, in non-decreasing length order.  Its cost
  is proportional to the number of paths, which grows exponentially in the
  horizon.
- The counting and probability operations below instead expand *length
  classes*: all paths sharing a terminal vertex and (up to float noise) the
  same exact length are carried as one heap entry with an integer path count
  and an aggregated probability mass.  Future extensions of a path depend
  only on its terminal vertex, so the aggregation is lossless, and horizons
  far beyond per-atom reach stay exact (counts are arbitrary-precision
  integers).

Length comparisons against the half-open windows [l(gamma), l(gamma)+l(alpha))
use plain <= and < with no epsilon fudge; callers should choose query points
away from atom boundaries.
"""

from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass
from itertools import count as _counter

from .errors import BudgetOverflow, MissingProbabilities
from .graph import WeightedDigraph

DEFAULT_MAX_PATHS = 50_000_000

# Classes closer than this are merged (same true length, differing by float
# noise from different summation orders).  Kept far below any realistic edge
# length and far above accumulated rounding of desk-scale horizons.
MERGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PathAtom:
    """One finite path: where it ends, its exact length and weight."""

    terminal_vertex: int
    length: float
    probability: float
    edge_count: int


@dataclass
class EnumerationBudget:
    """Horizon and safety cap for one enumeration.

    ``overflow`` is set (and :class:`BudgetOverflow` raised) when the cap is
    reached, so truncated results are flagged rather than silently wrong.
    The cap counts emitted atoms for :func:`enumerate_paths` and emitted
    length classes for the aggregated operations.
    """

    max_length: float
    max_paths: int = DEFAULT_MAX_PATHS
    overflow: bool = False


def enumerate_paths(g: WeightedDigraph, start: int, budget: EnumerationBudget):
    """Yield every path from ``start`` of length <= budget.max_length.

    Includes the empty path (length 0, zero edges) at ``start``; emission is
    best-first, so lengths are non-decreasing and truncation at the horizon
    is exact.  Paths on an unannotated graph carry probability 1.
    """
    g.out_edges(start)  # index check
    seq = _counter()
    heap = []
    if budget.max_length >= 0.0:
        heap.append((0.0, next(seq), start, 1.0, 0))
    emitted = 0
    while heap:
        length, _, vertex, prob, edges = heapq.heappop(heap)
        emitted += 1
        if emitted > budget.max_paths:
            budget.overflow = True
            raise BudgetOverflow(emitted)
        yield PathAtom(
            terminal_vertex=vertex, length=length, probability=prob, edge_count=edges
        )
        for e in g.out_edges(vertex):
            ext = length + e.length
            if ext <= budget.max_length:
                p = prob if e.probability is None else prob * e.probability
                heapq.heappush(heap, (ext, next(seq), e.target, p, edges + 1))


def _expand_classes(g: WeightedDigraph, start: int, budget: EnumerationBudget):
    """Yield (length, vertex, path_count, probability_mass) classes, best-first.

    Heap entries with the same terminal vertex whose lengths differ by less
    than the merge tolerance are coalesced before emission.
    """
    g.out_edges(start)
    tol = min(MERGE_TOLERANCE, g.min_edge_length() / 4.0)
    heap = []
    if budget.max_length >= 0.0:
        heap.append((0.0, start, 1, 1.0))
    emitted = 0
    while heap:
        head = heap[0][0]
        bucket: dict[int, list] = {}
        while heap and heap[0][0] <= head + tol:
            length, vertex, cnt, mass = heapq.heappop(heap)
            slot = bucket.get(vertex)
            if slot is None:
                bucket[vertex] = [length, cnt, mass]
            else:
                slot[1] += cnt
                slot[2] += mass
        for vertex in sorted(bucket):
            length, cnt, mass = bucket[vertex]
            emitted += 1
            if emitted > budget.max_paths:
                budget.overflow = True
                raise BudgetOverflow(emitted)
            yield length, vertex, cnt, mass
            for e in g.out_edges(vertex):
                ext = length + e.length
                if ext <= budget.max_length:
                    m = mass if e.probability is None else mass * e.probability
                    heapq.heappush(heap, (ext, e.target, cnt, m))


def _budget(horizon: float, max_paths: int) -> EnumerationBudget:
    return EnumerationBudget(max_length=horizon, max_paths=max_paths)


def _require_probabilities(g: WeightedDigraph):
    if not g.has_probabilities:
        raise MissingProbabilities("operation needs a probability-annotated graph")


def count_paths_exact(
    g: WeightedDigraph, i: int, j: int, x: float, max_paths: int = DEFAULT_MAX_PATHS
) -> int:
    """Number of paths from i to j of length at most x (empty path included)."""
    if x < 0.0:
        return 0
    total = 0
    for length, vertex, cnt, _ in _expand_classes(g, i, _budget(x, max_paths)):
        if vertex == j:
            total += cnt
    return total


def count_edge_hits_exact(
    g: WeightedDigraph, i: int, edge_ref, x: float, max_paths: int = DEFAULT_MAX_PATHS
) -> int:
    """Number of paths of length exactly x from i to a point on the edge.

    Counts paths gamma ending at the edge's origin with
    l(gamma) <= x < l(gamma) + l(edge).
    """
    alpha = g.edge(edge_ref)
    if x < 0.0:
        return 0
    total = 0
    for length, vertex, cnt, _ in _expand_classes(g, i, _budget(x, max_paths)):
        if vertex == alpha.source and x < length + alpha.length:
            total += cnt
    return total


def vertex_probability_atoms(
    g: WeightedDigraph,
    i: int,
    j: int,
    time: float,
    window: float = 0.0,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> float:
    """Probability mass of being exactly at vertex j during [time-window, time].

    The at-vertex occupation is purely atomic (a sum of point masses at path
    lengths); ``window=0`` returns the single-time atom mass.
    """
    _require_probabilities(g)
    if window < 0.0:
        raise ValueError("window must be >= 0")
    if time < 0.0:
        return 0.0
    total = 0.0
    for length, vertex, _, mass in _expand_classes(g, i, _budget(time, max_paths)):
        if vertex == j and length >= time - window:
            total += mass
    return total


def edge_probability_exact(
    g: WeightedDigraph, i: int, edge_ref, time: float, max_paths: int = DEFAULT_MAX_PATHS
) -> float:
    """Probability that the walker from i is on the given edge at ``time``."""
    _require_probabilities(g)
    alpha = g.edge(edge_ref)
    if time < 0.0:
        return 0.0
    total = 0.0
    for length, vertex, _, mass in _expand_classes(g, i, _budget(time, max_paths)):
        if vertex == alpha.source and time < length + alpha.length:
            total += mass
    return total * alpha.probability


def survival_exact(
    g: WeightedDigraph, i: int, time: float, max_paths: int = DEFAULT_MAX_PATHS
) -> float:
    """Probability that the walker from i is still on some edge at ``time``.

    Equals the sum of :func:`edge_probability_exact` over all edges, computed
    in a single expansion.  At times where the walker sits exactly at a
    vertex, the mass of walkers choosing to leave the graph right then is not
    on any edge, so for sub-stochastic graphs this is the on-edge mass, not
    the not-yet-exited mass.
    """
    _require_probabilities(g)
    if time < 0.0:
        return 0.0
    total = 0.0
    for length, vertex, _, mass in _expand_classes(g, i, _budget(time, max_paths)):
        for e in g.out_edges(vertex):
            if time < length + e.length:
                total += mass * e.probability
    return total


def truncated_laplace_sum(
    g: WeightedDigraph,
    i: int,
    j: int,
    s,
    max_length: float,
    max_paths: int = DEFAULT_MAX_PATHS,
    weighted: bool = False,
):
    """Sum of e^(-s*l(gamma)) over paths i -> j with l(gamma) <= max_length.

    With ``weighted=True`` each term carries the path probability.  As the
    horizon grows this converges, for Re(s) above the critical exponent, to
    the (i, j) resolvent entry adj(I - M(s))_ij / det(I - M(s)); the tail is
    geometrically small in the horizon.
    """
    total = 0.0j if isinstance(s, complex) else 0.0
    for length, vertex, cnt, mass in _expand_classes(
        g, i, _budget(max_length, max_paths)
    ):
        if vertex == j:
            weight = mass if weighted else cnt
            total += weight * _exp_neg(s, length)
    return total


def _exp_neg(s, length: float):
    if isinstance(s, complex):
        return cmath.exp(-s * length)
    return math.exp(-s * length)
