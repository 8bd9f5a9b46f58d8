"""Asymptotics of path-length counting and random walks on weighted digraphs.

The package splits into:

- :mod:`orbitcount.graph` -- the multigraph model, validation, connectivity
  and cycle-length diagnostics;
- :mod:`orbitcount.spectral` -- matrix functions M/N/W, Perron-Frobenius
  machinery, the critical exponent and the coefficient matrix Q;
- :mod:`orbitcount.asymptotics` -- closed-form leading-order estimators and
  Laplace-transform diagnostics;
- :mod:`orbitcount.oracle` -- exact brute-force counting and probability
  mass evaluation, the ground truth for every asymptotic claim;
- :mod:`orbitcount.walker` -- seeded Monte Carlo simulation of the
  constant-speed random walk;
- :mod:`orbitcount.applications` -- interval splitting sequences,
  substitution-rule graphs, Pascal-triangle region sums;
- :mod:`orbitcount.cli` -- the ``orbitcount`` command-line tool.
"""

from .graph import (
    ConnectivityReport,
    Edge,
    IncommensurabilityVerdict,
    WeightedDigraph,
    build_graph,
    cycle_lengths,
    graph_to_dict,
    incommensurability_check,
    load_graph,
    strong_connectivity,
)
from .spectral import (
    MatrixFunction,
    Mode,
    PerronData,
    SpectralSolution,
    adjugate,
    perron_eigen,
    perron_projection,
    q_matrix,
    solve_lambda,
)

__all__ = [
    "ConnectivityReport",
    "Edge",
    "IncommensurabilityVerdict",
    "MatrixFunction",
    "Mode",
    "PerronData",
    "SpectralSolution",
    "WeightedDigraph",
    "adjugate",
    "build_graph",
    "cycle_lengths",
    "graph_to_dict",
    "incommensurability_check",
    "load_graph",
    "perron_eigen",
    "perron_projection",
    "q_matrix",
    "solve_lambda",
    "strong_connectivity",
]

__version__ = "0.1.0"
