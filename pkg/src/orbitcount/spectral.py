"""Matrix functions of a weighted digraph and their Perron-Frobenius analysis.

A graph G with edge lengths l defines a matrix-valued function of a complex
variable s whose (i, j) entry sums e^(-s*l) over the edges i -> j, optionally
weighted by transition probabilities (vertex or edge based).  The critical
exponent ``lambda`` is the unique real s at which the dominant eigenvalue of
that matrix equals 1; the rank-one coefficient matrix Q collects the leading
asymptotic constants.  Everything here is dense; target sizes are small
(n up to ~100), so robustness wins over asymptotic speed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    BracketFailure,
    DidNotConverge,
    MissingProbabilities,
    NotIrreducible,
    NotPrimitive,
    NotStronglyConnected,
    SingularDenominator,
)
from .graph import WeightedDigraph, strong_connectivity

# Diagonal shift added before power iteration; keeps the iteration matrix
# primitive for any irreducible non-negative input without moving eigenvectors.
PRIMITIVITY_SHIFT = 1e-3

MU_TOLERANCE = 1e-12
MAX_BISECTIONS = 200
BRACKET_CEILING = 64.0  # bracket expansion stops at 64 / min edge length


class Mode(enum.Enum):
    """Which weights enter the matrix entries."""

    COUNTING = "counting"       # plain e^(-s*l), vertex-indexed
    PROBABILITY = "probability"  # p * e^(-s*l), vertex-indexed
    EDGE = "edge"               # p * e^(-s*l), edge-indexed random walk


@dataclass(frozen=True)
class PerronData:
    """Dominant eigenvalue and positive left/right eigenvectors, u^T v = 1."""

    mu: float
    right_vector: np.ndarray
    left_vector: np.ndarray


@dataclass(frozen=True)
class SpectralSolution:
    """Critical exponent and coefficient matrix for one matrix function."""

    function: "MatrixFunction"
    lam: float
    q: np.ndarray
    perron_at_lambda: PerronData
    bracket: tuple[float, float]
    residual: float

    @property
    def graph(self) -> WeightedDigraph:
        return self.function.graph

    @property
    def mode(self) -> Mode:
        return self.function.mode


@dataclass(frozen=True)
class MatrixFunction:
    """A graph together with an evaluation mode.

    ``evaluate`` returns a real matrix for real s and a complex matrix
    otherwise; entries are entrywise non-negative on the real axis.
    """

    graph: WeightedDigraph
    mode: Mode = Mode.COUNTING

    def __post_init__(self):
        if self.mode is not Mode.COUNTING and not self.graph.has_probabilities:
            raise MissingProbabilities(
                f"{self.mode.value} mode requires a fully probability-annotated graph"
            )

    @property
    def dimension(self) -> int:
        if self.mode is Mode.EDGE:
            return self.graph.edge_count
        return self.graph.vertex_count

    def _terms(self):
        """(row, col, weight, length) for every matrix term."""
        g = self.graph
        if self.mode is Mode.COUNTING:
            return [(e.source - 1, e.target - 1, 1.0, e.length) for e in g.edges]
        if self.mode is Mode.PROBABILITY:
            return [
                (e.source - 1, e.target - 1, e.probability, e.length) for e in g.edges
            ]
        # Edge-based walk: entry (beta, alpha) is the probability of picking
        # beta after traversing alpha, times e^(-s*l(alpha)); beta must leave
        # the vertex where alpha ends.
        terms = []
        for alpha in g.edges:
            for beta in g.out_edges(alpha.target):
                terms.append((beta.id, alpha.id, beta.probability, alpha.length))
        return terms

    def evaluate(self, s) -> np.ndarray:
        real = np.imag(s) == 0
        s = float(np.real(s)) if real else complex(s)
        dim = self.dimension
        m = np.zeros((dim, dim), dtype=float if real else complex)
        for i, j, w, length in self._terms():
            m[i, j] += w * np.exp(-s * length)
        return m

    def evaluate_derivative(self, s) -> np.ndarray:
        real = np.imag(s) == 0
        s = float(np.real(s)) if real else complex(s)
        dim = self.dimension
        m = np.zeros((dim, dim), dtype=float if real else complex)
        for i, j, w, length in self._terms():
            m[i, j] += -length * w * np.exp(-s * length)
        return m


# -- Perron-Frobenius ------------------------------------------------------------


def _check_square_nonnegative(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValueError("matrix must be entrywise non-negative and finite")
    return a


def _bool_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (x.astype(np.int64) @ y.astype(np.int64)) > 0


def _is_irreducible(a: np.ndarray) -> bool:
    """Strong connectivity of the sparsity pattern (exact reachability)."""
    n = a.shape[0]
    if n == 1:
        return a[0, 0] > 0
    # Repeated squaring of (I | support) closes reachability in log2(n) steps.
    closure = (a > 0) | np.eye(n, dtype=bool)
    for _ in range(int(np.ceil(np.log2(n))) + 1):
        closure = _bool_matmul(closure, closure)
    return bool((closure & closure.T).all())


def _inverse_iteration_step(a, shift, vec):
    n = a.shape[0]
    try:
        x = np.linalg.solve(a - shift * np.eye(n), vec)
    except np.linalg.LinAlgError:
        x = np.linalg.solve(a - shift * (1 + 1e-12) * np.eye(n), vec)
    if x.sum() < 0:
        x = -x
    norm = np.abs(x).sum()
    if norm == 0 or not np.isfinite(norm):
        return vec
    return x / norm


def perron_eigen(a, tol: float = 1e-13, max_iter: int = 500) -> PerronData:
    """Dominant eigenvalue with positive left/right eigenvectors, u^T v = 1.

    A short power-iteration phase on the diagonally shifted matrix gives a
    first positive vector; inverse iteration then polishes it.  The shift for
    each inverse step sits just above the current Collatz-Wielandt upper
    bound, and every eigenvalue other than the dominant one is strictly
    farther from such a point, so each solve contracts toward the dominant
    eigenvector and preserves positivity.  The returned ``mu`` carries the
    final Collatz-Wielandt bracket as its convergence certificate.

    Raises NotIrreducible when the sparsity pattern is not strongly
    connected, DidNotConverge when the bracket fails to close.
    """
    a = _check_square_nonnegative(a)
    n = a.shape[0]
    if not _is_irreducible(a):
        raise NotIrreducible("matrix sparsity pattern is not strongly connected")
    if n == 1:
        mu = float(a[0, 0])
        one = np.array([1.0])
        return PerronData(mu=mu, right_vector=one, left_vector=one)

    b = a + PRIMITIVITY_SHIFT * np.eye(n)

    def cw_bounds(mat, vec):
        ratios = (mat @ vec) / vec
        return float(ratios.min()), float(ratios.max())

    def iterate(mat):
        v = np.full(n, 1.0 / n)
        lo, hi = cw_bounds(mat, v)
        for _ in range(max_iter):
            w = mat @ v
            total = w.sum()
            if total <= 0 or not np.isfinite(total):
                raise NotIrreducible("power iteration left the positive cone")
            v = w / total
            lo, hi = cw_bounds(mat, v)
            if hi - lo <= 1e-3 * max(1.0, hi):
                break
        for _ in range(200):
            if hi - lo <= tol * max(1.0, abs(hi)):
                return 0.5 * (lo + hi), v
            v = _inverse_iteration_step(mat, hi * (1 + 1e-12), v)
            if np.any(v <= 0):
                v = np.abs(v) + np.finfo(float).tiny
                v /= v.sum()
            lo, hi = cw_bounds(mat, v)
        raise DidNotConverge(
            max_iter + 200, f"Perron bracket stuck at width {hi - lo:g}"
        )

    mu_b, v = iterate(b)
    mu_bt, u = iterate(b.T)
    mu = 0.5 * (mu_b + mu_bt) - PRIMITIVITY_SHIFT
    if np.any(v <= 0) or np.any(u <= 0):
        raise NotIrreducible("computed eigenvector is not strictly positive")
    v = v / v.sum()
    u = u / float(u @ v)
    return PerronData(mu=mu, right_vector=v, left_vector=u)


def adjugate(a) -> np.ndarray:
    """Classical adjoint: transpose of the cofactor matrix.

    Cofactor expansion with one LU-backed determinant per minor, O(n^5).
    Exact where inverse-based shortcuts fail, i.e. on singular input;
    adj of a 1x1 matrix is [[1]] by convention.
    """
    a = np.asarray(a, dtype=complex if np.iscomplexobj(a) else float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if n == 1:
        return np.ones((1, 1), dtype=a.dtype)
    out = np.empty_like(a)
    rows = np.arange(n)
    for i in range(n):
        keep_r = rows != i
        for j in range(n):
            minor = a[np.ix_(keep_r, rows != j)]
            out[j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return out


def _charpoly_derivative_at(a: np.ndarray, x: float) -> float:
    coeffs = np.real(np.poly(a))  # monic characteristic polynomial
    deriv = np.polyder(coeffs)
    return float(np.polyval(deriv, x))


def _is_primitive(a: np.ndarray) -> bool:
    """Wielandt bound check by repeated squaring of the sparsity pattern."""
    n = a.shape[0]
    bound = n * n - 2 * n + 2
    pattern = a > 0
    k = 1
    while k <= bound:
        if pattern.all():
            return True
        pattern = _bool_matmul(pattern, pattern)
        k *= 2
    return bool(pattern.all())


ADJUGATE = "adjugate"
CHARPOLY_DERIVATIVE = "charpoly-derivative"
EIGEN_PRODUCT = "eigen-product"
POWER_LIMIT = "power-limit"
PROJECTION_METHODS = (ADJUGATE, CHARPOLY_DERIVATIVE, EIGEN_PRODUCT, POWER_LIMIT)


def perron_projection(a, method: str = ADJUGATE) -> np.ndarray:
    """Rank-one spectral projector onto the dominant eigendirection.

    Four equivalent routes, useful as mutual cross-checks:

    - ``adjugate``: adj(mu*I - A) normalized by its trace;
    - ``charpoly-derivative``: same numerator over p'_A(mu);
    - ``eigen-product``: prod (A - mu_i I) / prod (mu - mu_i) over the
      non-dominant eigenvalues;
    - ``power-limit``: limit of (A/mu)^k, primitive matrices only.
    """
    a = _check_square_nonnegative(a)
    n = a.shape[0]
    data = perron_eigen(a)
    mu = data.mu
    if method == ADJUGATE:
        adj = adjugate(mu * np.eye(n) - a)
        return adj / np.trace(adj)
    if method == CHARPOLY_DERIVATIVE:
        adj = adjugate(mu * np.eye(n) - a)
        return adj / _charpoly_derivative_at(a, mu)
    if method == EIGEN_PRODUCT:
        eigs = np.linalg.eigvals(a)
        rest = np.delete(eigs, int(np.argmin(np.abs(eigs - mu))))
        prod = np.eye(n, dtype=complex)
        denom = 1.0 + 0.0j
        for mu_i in rest:
            prod = prod @ (a - mu_i * np.eye(n))
            denom *= mu - mu_i
        return np.real(prod / denom)
    if method == POWER_LIMIT:
        if not _is_primitive(a):
            raise NotPrimitive("power limit requires a primitive matrix")
        # Repeated squaring with trace renormalization: tr P = 1, and the
        # renormalization stops mu's rounding error from compounding
        # doubly-exponentially in the exponent.
        x = a / mu
        for _ in range(80):
            x2 = x @ x
            trace = np.trace(x2)
            if trace > 0:
                x2 = x2 / trace
            if np.max(np.abs(x2 - x)) <= 1e-13 * max(1.0, np.max(np.abs(x2))):
                return x2
            x = x2
        raise DidNotConverge(80, "power limit did not stabilize")
    raise ValueError(f"unknown method {method!r}; expected one of {PROJECTION_METHODS}")


# -- critical exponent and Q -------------------------------------------------------


def _spectral_radius(f: MatrixFunction, sigma: float) -> float:
    return perron_eigen(f.evaluate(sigma)).mu


def solve_lambda(f: MatrixFunction) -> SpectralSolution:
    """Bracket and bisect the strictly decreasing map sigma -> mu(sigma).

    Counting mode starts from [0, hi] with mu(0) >= 1 and doubles hi until
    mu < 1; probability and edge modes have mu(0) <= 1 and expand the bracket
    to the left.  Stops when |mu - 1| <= 1e-12.
    """
    report = strong_connectivity(f.graph)
    if not report.strongly_connected:
        raise NotStronglyConnected(
            f"graph has {len(report.components)} strongly connected components"
        )
    ceiling = BRACKET_CEILING / f.graph.min_edge_length()

    mu0 = _spectral_radius(f, 0.0)
    if f.mode is Mode.COUNTING:
        if mu0 < 1.0 - MU_TOLERANCE:
            raise BracketFailure(
                f"mu(0) = {mu0!r} < 1 in counting mode; "
                "impossible for a strongly connected graph, upstream bug"
            )
        lo, hi = 0.0, 1.0
        while _spectral_radius(f, hi) >= 1.0:
            hi *= 2.0
            if hi > ceiling:
                raise BracketFailure(f"no sign change up to sigma = {hi:g}")
    else:
        if mu0 > 1.0 + MU_TOLERANCE:
            raise BracketFailure(
                f"mu(0) = {mu0!r} > 1 in {f.mode.value} mode; "
                "probability sums per vertex must be <= 1"
            )
        hi = 0.0
        lo = -1.0
        while _spectral_radius(f, lo) <= 1.0:
            lo *= 2.0
            if -lo > ceiling:
                raise BracketFailure(f"no sign change down to sigma = {lo:g}")

    bracket = (lo, hi)
    lam, residual = None, None
    for endpoint in bracket:
        r = abs(_spectral_radius(f, endpoint) - 1.0)
        if r <= MU_TOLERANCE:
            lam, residual = endpoint, r
            break
    if lam is None:
        for _ in range(MAX_BISECTIONS):
            mid = 0.5 * (lo + hi)
            mu = _spectral_radius(f, mid)
            if abs(mu - 1.0) <= MU_TOLERANCE:
                lam, residual = mid, abs(mu - 1.0)
                break
            if mu > 1.0:
                lo = mid
            else:
                hi = mid
        else:
            raise DidNotConverge(
                MAX_BISECTIONS, f"bisection stalled on [{lo!r}, {hi!r}]"
            )

    perron = perron_eigen(f.evaluate(lam))
    return SpectralSolution(
        function=f,
        lam=lam,
        q=q_matrix(f, lam),
        perron_at_lambda=perron,
        bracket=bracket,
        residual=residual,
    )


def critical_line_scan(f: MatrixFunction, lam: float, t_grid) -> np.ndarray:
    """|det(I - M(lam + i t))| over a caller-supplied grid of imaginary parts.

    On incommensurable graphs the determinant vanishes on the critical line
    only at t = 0; values near zero elsewhere flag a (nearly) lattice length
    spectrum, where the leading-order laws degrade.  A diagnostic, not a
    certificate of pole absence.
    """
    eye = np.eye(f.dimension, dtype=complex)
    return np.array(
        [abs(np.linalg.det(eye - f.evaluate(complex(lam, t)))) for t in t_grid]
    )


def q_matrix(f: MatrixFunction, lam: float) -> np.ndarray:
    """Coefficient matrix adj(I - M(lam)) / (-tr(adj(I - M(lam)) M'(lam))).

    Equals the residue at lam of adj(I - M(s))_ij / det(I - M(s)).  Requires
    mu(lam) = 1; raises SingularDenominator when the trace term vanishes,
    which signals that lam is not a simple root.
    """
    m = f.evaluate(lam)
    mprime = f.evaluate_derivative(lam)
    adj = adjugate(np.eye(f.dimension) - m)
    denom = -float(np.trace(adj @ mprime))
    scale = max(1.0, float(np.abs(adj).max()) * float(np.abs(mprime).max()))
    if abs(denom) <= 1e-12 * scale:
        raise SingularDenominator(
            f"trace normalization is {denom!r}; lam = {lam!r} is not a simple root"
        )
    return adj / denom
