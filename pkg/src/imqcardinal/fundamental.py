"""Fundamental (cardinal Lagrange) functions of a collocation matrix.

The m-th fundamental function is

    L_m(x) = sum_j c_j * (alpha^2 + (x - x_j)^2)^(-k),    c = A^(-1) e_m,

so that L_m(x_j) = delta_{jm} at the window nodes.  Besides construction and
evaluation, this module measures the cardinality residual, fits the spatial
decay envelope of |L_m|, and evaluates weighted series sum_m b_m L_m(x) with
a truncation-tail indicator.

Evaluation is pure; batch grid evaluation is plain vectorized numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .collocation import CollocationMatrix, dense_invert, spd_solve, unit_vector
from .decay import DecayEnvelope, DecayFit, fit_exponent
from .errors import ValidationError
from .kernel import KernelParams, imq_eval
from .nodes import NodeWindow
from ._serialize import write_xy_csv


@dataclass(frozen=True, eq=False)
class FundamentalFunction:
    """Center index m (logical) plus the coefficient column A^(-1) e_m."""

    center: int
    coeffs: np.ndarray
    params: KernelParams
    window: NodeWindow


@dataclass(frozen=True)
class CardinalityReport:
    max_abs_deviation: float
    argmax_node: int  # logical index of the worst node
    passed: bool


class SeriesValue(NamedTuple):
    """Weighted-series value with the magnitude of the largest edge term."""

    value: float | np.ndarray
    tail_magnitude: float | np.ndarray


def make_fundamental(matrix: CollocationMatrix, m: int) -> FundamentalFunction:
    """Fundamental function centered at logical index m."""
    coeffs = spd_solve(matrix, unit_vector(matrix, m))
    return FundamentalFunction(int(m), coeffs, matrix.params, matrix.window)


def make_all_fundamentals(matrix: CollocationMatrix) -> list[FundamentalFunction]:
    """All window fundamentals at once, through the dense inverse columns."""
    inverse = dense_invert(matrix)
    window = matrix.window
    return [
        FundamentalFunction(window.to_logical(i), inverse.entries[:, i], matrix.params, window)
        for i in range(window.size)
    ]


def eval_fundamental(L: FundamentalFunction, x):
    """L(x) = sum_j coeffs_j * phi(x - x_j) over the full window."""
    x = np.asarray(x, dtype=float)
    out = imq_eval(L.params, x[..., None] - L.window.nodes) @ L.coeffs
    return float(out) if out.ndim == 0 else out


def cardinality_residual(
    L: FundamentalFunction, tol: float = 1e-8, margin: int | None = None
) -> CardinalityReport:
    """Max over core nodes x_j of |L(x_j) - delta_{jm}|; passes iff <= tol."""
    window = L.window
    core = window.core_storage(margin)
    values = eval_fundamental(L, window.nodes[core])
    expected = (window.to_logical(core) == L.center).astype(float)
    deviation = np.abs(values - expected)
    worst = int(np.argmax(deviation))
    return CardinalityReport(
        max_abs_deviation=float(deviation[worst]),
        argmax_node=window.to_logical(int(core[worst])),
        passed=bool(deviation[worst] <= tol),
    )


def fundamental_envelope(
    L: FundamentalFunction,
    x_lo: float,
    x_hi: float,
    samples: int = 500,
    margin: int | None = None,
) -> DecayEnvelope:
    """Per-unit-interval max envelope of |L| against the lag |x - x_m|.

    |L| oscillates through zeros, so raw samples would dominate a log fit;
    the envelope takes the maximum |L| within each unit interval of lag and
    keeps the lag where that maximum occurs.  The sample window [x_lo, x_hi]
    must lie inside the node core and hold at least 50 samples.
    """
    if samples < 50:
        raise ValidationError(f"samples must be >= 50, got {samples}")
    if not x_lo < x_hi:
        raise ValidationError(f"empty sample window [{x_lo}, {x_hi}]")
    hull_lo, hull_hi = L.window.core_hull(margin)
    if x_lo < hull_lo or x_hi > hull_hi:
        raise ValidationError(
            f"sample window [{x_lo}, {x_hi}] extends beyond the node core "
            f"[{hull_lo:g}, {hull_hi:g}]"
        )
    xs = np.linspace(x_lo, x_hi, samples)
    mags = np.abs(eval_fundamental(L, xs))
    lags = np.abs(xs - L.window.node_at(L.center))
    buckets = np.floor(lags).astype(int)
    env_lags, env_mags = [], []
    for b in np.unique(buckets):
        sel = buckets == b
        i = np.argmax(mags[sel])
        env_lags.append(lags[sel][i])
        env_mags.append(mags[sel][i])
    order = np.argsort(env_lags)
    return DecayEnvelope(
        np.asarray(env_lags)[order], np.asarray(env_mags)[order], "position"
    )


def envelope_fit_fundamental(
    L: FundamentalFunction,
    x_lo: float,
    x_hi: float,
    samples: int = 500,
    margin: int | None = None,
) -> DecayFit:
    """Power-law fit of the |L| envelope over the sample window."""
    env = fundamental_envelope(L, x_lo, x_hi, samples, margin)
    return fit_exponent(env, env.lags[0], env.lags[-1])


def weighted_series_eval(
    fundamentals: Sequence[FundamentalFunction], b, x
) -> SeriesValue:
    """Evaluate sum_m b_m L_m(x) over the window truncation.

    ``fundamentals`` must cover every window index in logical order and
    ``b`` must be a finite window-length weight vector.  The reported
    tail magnitude max(|b_first L_first(x)|, |b_last L_last(x)|) indicates
    how much the outermost terms still contribute at x.
    """
    if not fundamentals:
        raise ValidationError("fundamentals must be non-empty")
    window = fundamentals[0].window
    params = fundamentals[0].params
    n = window.size
    if len(fundamentals) != n:
        raise ValidationError(
            f"need one fundamental per window node ({n}), got {len(fundamentals)}"
        )
    expected = window.to_logical(0)
    for pos, L in enumerate(fundamentals):
        if L.center != expected + pos:
            raise ValidationError("fundamentals must be ordered by logical index")
    b = np.asarray(b, dtype=float)
    if b.shape != (n,):
        raise ValidationError(f"b must have shape ({n},), got {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValidationError("b contains non-finite entries")

    coeff_columns = np.column_stack([L.coeffs for L in fundamentals])
    combined = coeff_columns @ b
    x = np.asarray(x, dtype=float)
    phi = imq_eval(params, x[..., None] - window.nodes)
    value = phi @ combined
    tail = np.maximum(
        np.abs(b[0] * (phi @ coeff_columns[:, 0])),
        np.abs(b[-1] * (phi @ coeff_columns[:, -1])),
    )
    if value.ndim == 0:
        return SeriesValue(float(value), float(tail))
    return SeriesValue(value, tail)


def write_samples_csv(path, xs, values) -> None:
    """Function samples export: CSV with header ``x,value``."""
    write_xy_csv(path, ("x", "value"), xs, values)
