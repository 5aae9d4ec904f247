"""Collocation matrix construction, solves, and inversion.

The collocation matrix of a kernel/window pair has entries
``A(i, j) = (alpha^2 + (x_i - x_j)^2)^(-k)``.  It is symmetric positive
definite for distinct nodes, which the solvers rely on: the reference path
is a dense Cholesky factorization, and a Neumann-series path

    A^(-1) = ||A||^(-1) * sum_j R^j,    R = Id - A / ||A||

is provided as a secondary route with a geometric remainder bound
``r^n * ||A^(-1)||`` where ``r = ||R|| = 1 - lambda_min / lambda_max``.

Operator norms are spectral norms of symmetric matrices, estimated
iteratively to a fixed tolerance of 1e-8 with an iteration cap of 1e5:
``lambda_max`` by power iteration on A, ``lambda_min`` by power iteration
on A^(-1) applied through the Cholesky factor (plain or shifted iteration
on A itself stalls when the extreme eigenvalues cluster, which they do
here for all but tiny windows).

Matrices are immutable after construction; the solvers take read-only
matrix access, so concurrent solves against one matrix are safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, NotPositiveDefiniteError, ValidationError
from .kernel import KernelParams, imq_eval
from .nodes import NodeWindow
from ._serialize import format_float

SPECTRAL_TOL = 1e-8
SPECTRAL_ITERATION_CAP = 100_000
NON_CONVERGENT_THRESHOLD = 1.0 - 1e-12
DEFAULT_MAX_NODES = 5001


@dataclass(eq=False)
class CollocationMatrix:
    """Dense symmetric kernel matrix for one window, with a cached factor."""

    entries: np.ndarray
    params: KernelParams
    window: NodeWindow
    _factor: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def cholesky(self):
        """Lower Cholesky factor (cached); raises NotPositiveDefiniteError."""
        if self._factor is None:
            try:
                self._factor = scipy.linalg.cho_factor(
                    self.entries, lower=True, check_finite=False
                )
            except np.linalg.LinAlgError as exc:
                raise NotPositiveDefiniteError(
                    f"matrix not numerically positive definite: {exc}"
                ) from exc
        return self._factor


@dataclass(frozen=True, eq=False)
class InverseMatrix:
    """Computed inverse with provenance and a core residual diagnostic.

    ``residual_norm`` is the max-norm of ``A @ entries - Id`` restricted to
    the core rows and columns.
    """

    entries: np.ndarray
    source: str  # "direct" | "neumann"
    residual_norm: float


@dataclass(frozen=True)
class NeumannState:
    """Convergence diagnostics for a Neumann partial sum.

    ``r_norm`` is the spectral norm of R = Id - A/||A||; the series only
    converges for r_norm < 1, and the state is flagged non-convergent when
    r_norm >= 1 - 1e-12.  ``remainder_bound = r_norm^terms_used * a_inv_norm``
    bounds the spectral norm (hence every entry) of the truncation error.
    Both operator norms ||A|| and ||A^(-1)|| are recorded.
    """

    r_norm: float
    terms_used: int
    remainder_bound: float
    a_norm: float
    a_inv_norm: float
    non_convergent: bool


@dataclass(frozen=True)
class SpectralDiagnostics:
    lambda_min: float
    lambda_max: float
    cond: float


def build_matrix(
    params: KernelParams, window: NodeWindow, max_nodes: int = DEFAULT_MAX_NODES
) -> CollocationMatrix:
    """Dense symmetric collocation matrix A(i,j) = phi(x_i - x_j).

    Rejects windows larger than ``max_nodes`` (default 5001): the dense
    O(n^3) reference path is only meant for desk scale.
    """
    n = window.size
    if n > max_nodes:
        raise ValidationError(
            f"window has {n} nodes, exceeding the configured limit {max_nodes}"
        )
    diff = window.nodes[:, None] - window.nodes[None, :]
    return CollocationMatrix(imq_eval(params, diff), params, window)


def _as_rhs(matrix: CollocationMatrix, rhs) -> np.ndarray:
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != matrix.size:
        raise ValidationError(
            f"rhs has leading dimension {rhs.shape[0]}, matrix needs {matrix.size}"
        )
    if not np.all(np.isfinite(rhs)):
        raise ValidationError("rhs contains non-finite entries")
    return rhs


def spd_solve(matrix: CollocationMatrix, rhs) -> np.ndarray:
    """Solve A a = rhs through the Cholesky factorization.

    ``rhs`` may be a vector or a matrix of stacked right-hand sides.
    Positive definiteness is checked via factorization success.
    """
    rhs = _as_rhs(matrix, rhs)
    return scipy.linalg.cho_solve(matrix.cholesky(), rhs, check_finite=False)


def unit_vector(matrix: CollocationMatrix, m: int) -> np.ndarray:
    """Unit right-hand side e_m for logical index m."""
    e = np.zeros(matrix.size)
    e[matrix.window.to_storage(m)] = 1.0
    return e


def _core_residual(matrix: CollocationMatrix, inverse_entries, margin) -> float:
    core = matrix.window.core_storage(margin)
    n = matrix.size
    resid = matrix.entries @ inverse_entries - np.eye(n)
    return float(np.abs(resid[np.ix_(core, core)]).max())


def dense_invert(matrix: CollocationMatrix, margin: int | None = None) -> InverseMatrix:
    """Full inverse via n simultaneous unit-vector solves."""
    entries = spd_solve(matrix, np.eye(matrix.size))
    return InverseMatrix(
        entries=entries,
        source="direct",
        residual_norm=_core_residual(matrix, entries, margin),
    )


def _power_iteration(apply_op, n: int, tol: float = SPECTRAL_TOL,
                     max_iter: int = SPECTRAL_ITERATION_CAP) -> float:
    """Dominant eigenvalue of a symmetric operator by power iteration.

    Stops when the eigenpair residual ||Op v - mu v|| drops below
    tol * max(|mu|, tol); for symmetric operators that certifies the
    eigenvalue to the same accuracy.  Deterministic: fixed-seed start vector.
    """
    rng = np.random.default_rng(2024)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    mu = 0.0
    for _ in range(max_iter):
        w = apply_op(v)
        mu = float(v @ w)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0  # operator annihilates v: dominant eigenvalue 0
        residual = np.linalg.norm(w - mu * v)
        v = w / norm_w
        if residual <= tol * max(abs(mu), tol):
            return mu
    raise ConvergenceError(
        f"spectral estimate did not converge within {max_iter} iterations"
    )


def spectral_diagnostics(matrix: CollocationMatrix) -> SpectralDiagnostics:
    """Extremal eigenvalues and condition number of the collocation matrix.

    lambda_max comes from power iteration on A; lambda_min from power
    iteration on A^(-1) through the Cholesky factor (tolerance 1e-8,
    iteration cap 1e5).  Raises ConvergenceError on a cap hit and
    NotPositiveDefiniteError if the factorization fails.
    """
    a = matrix.entries
    lam_max = _power_iteration(lambda v: a @ v, matrix.size)
    factor = matrix.cholesky()
    inv_lam_min = _power_iteration(
        lambda v: scipy.linalg.cho_solve(factor, v, check_finite=False), matrix.size
    )
    lam_min = 1.0 / inv_lam_min
    return SpectralDiagnostics(lam_min, lam_max, lam_max / lam_min)


def neumann_inverse(
    matrix: CollocationMatrix, n_terms: int, margin: int | None = None
) -> tuple[InverseMatrix, NeumannState]:
    """Partial Neumann sum ||A||^(-1) * sum_{j < n_terms} R^j and diagnostics.

    ``||A^(-1)||`` in the remainder bound is 1/lambda_min (A is symmetric
    positive).  When the factorization needed for lambda_min fails, r_norm
    falls back to direct power iteration on R (the dominant eigenvalues of R
    are then numerically degenerate and the iteration settles immediately),
    ||A^(-1)|| is reported as inf, and the state is flagged non-convergent.
    """
    if n_terms < 1:
        raise ValidationError(f"n_terms must be >= 1, got {n_terms}")
    a = matrix.entries
    n = matrix.size
    lam_max = _power_iteration(lambda v: a @ v, n)
    r = np.eye(n) - a / lam_max

    partial = np.zeros_like(a)
    term = np.eye(n)
    for _ in range(n_terms):
        partial += term
        term = r @ term
    entries = partial / lam_max

    try:
        inv_lam_min = _power_iteration(
            lambda v: scipy.linalg.cho_solve(matrix.cholesky(), v, check_finite=False), n
        )
        a_inv_norm = float(inv_lam_min)
        r_norm = 1.0 - 1.0 / (inv_lam_min * lam_max)
    except NotPositiveDefiniteError:
        r_norm = float(_power_iteration(lambda v: r @ v, n))
        a_inv_norm = float("inf")

    non_convergent = r_norm >= NON_CONVERGENT_THRESHOLD
    state = NeumannState(
        r_norm=r_norm,
        terms_used=n_terms,
        remainder_bound=r_norm**n_terms * a_inv_norm,
        a_norm=lam_max,
        a_inv_norm=a_inv_norm,
        non_convergent=non_convergent,
    )
    inverse = InverseMatrix(
        entries=entries,
        source="neumann",
        residual_norm=_core_residual(matrix, entries, margin),
    )
    return inverse, state


def dump_matrix_csv(entries: np.ndarray, path) -> None:
    """Write a dense matrix as CSV, one row per line, 17 significant digits."""
    entries = np.atleast_2d(np.asarray(entries, dtype=float))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in entries:
            fh.write(",".join(format_float(v) for v in row) + "\n")
