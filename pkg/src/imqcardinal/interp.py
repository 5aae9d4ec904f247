"""The interpolation operator, its Lebesgue function, and lp stability.

Given window data y, the interpolant is

    I[y](x) = sum_i (A^(-1) y)_i * (alpha^2 + (x - x_i)^2)^(-k),

which can equivalently be evaluated as sum_i y_i L_i(x) through the
fundamental functions; both paths are implemented and must agree.  The
Lebesgue function Lambda(x) = sum_j |L_j(x)| controls the sup-norm
stability of the operator; lp ratios ||I[y]||_p / ||y||_p are measured for
p in {1, 2, inf} with composite-trapezoid quadrature on the core hull.

Quadrature grids are evaluated with numpy's deterministic pairwise
summation, so repeated runs produce identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .collocation import CollocationMatrix, spd_solve
from .errors import ValidationError
from .fundamental import FundamentalFunction, eval_fundamental
from .kernel import KernelParams, imq_eval
from .nodes import NodeWindow

VALID_P = (1, 2, math.inf)


@dataclass(frozen=True, eq=False)
class Interpolant:
    """Solved interpolant: data y and coefficients A^(-1) y."""

    coeffs: np.ndarray
    data: np.ndarray
    params: KernelParams
    window: NodeWindow


@dataclass(frozen=True)
class StabilityReport:
    p: float
    norm_Ip: float
    norm_yp: float
    ratio: float
    grid_step: float


def make_interpolant(matrix: CollocationMatrix, y) -> Interpolant:
    """Interpolant of the window data y (finite, window-length)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (matrix.size,):
        raise ValidationError(f"y must have shape ({matrix.size},), got {y.shape}")
    coeffs = spd_solve(matrix, y)
    return Interpolant(coeffs, y, matrix.params, matrix.window)


def eval_interpolant(
    spec: Interpolant,
    x,
    path: str = "direct",
    fundamentals: Sequence[FundamentalFunction] | None = None,
):
    """Evaluate I[y](x) by one of two equivalent routes.

    "direct" sums the solved coefficients against kernel shifts;
    "via_fundamentals" sums y_i L_i(x) and needs precomputed fundamentals
    for every window index.  The two agree up to roundoff.
    """
    x = np.asarray(x, dtype=float)
    if path == "direct":
        out = imq_eval(spec.params, x[..., None] - spec.window.nodes) @ spec.coeffs
    elif path == "via_fundamentals":
        if fundamentals is None or len(fundamentals) != spec.window.size:
            raise ValidationError(
                "via_fundamentals needs one precomputed fundamental per window node"
            )
        columns = np.column_stack([L.coeffs for L in fundamentals])
        phi = imq_eval(spec.params, x[..., None] - spec.window.nodes)
        out = (phi @ columns) @ spec.data
    else:
        raise ValidationError(f"path must be 'direct' or 'via_fundamentals', got {path!r}")
    return float(out) if out.ndim == 0 else out


def lebesgue_function(fundamentals: Sequence[FundamentalFunction], x):
    """Lambda(x) = sum_j |L_j(x)| over the given fundamentals.

    At core nodes Lambda equals 1 up to the cardinality residual; in
    between it is >= the interpolation operator's local amplification.
    """
    if not fundamentals:
        raise ValidationError("fundamentals must be non-empty")
    window = fundamentals[0].window
    params = fundamentals[0].params
    columns = np.column_stack([L.coeffs for L in fundamentals])
    x = np.asarray(x, dtype=float)
    values = imq_eval(params, x[..., None] - window.nodes) @ columns
    out = np.abs(values).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def _discrete_norm(y: np.ndarray, p: float) -> float:
    if p == math.inf:
        return float(np.abs(y).max())
    if p == 1:
        return float(np.abs(y).sum())
    return float(np.sqrt((y * y).sum()))


def lp_stability(
    spec: Interpolant,
    p,
    grid_step: float | None = None,
    margin: int | None = None,
) -> StabilityReport:
    """Measured ratio ||I[y]||_p / ||y||_p on the core hull.

    p must be 1, 2, or inf.  The continuous norm uses composite trapezoid
    quadrature (grid max for p = inf) with grid_step defaulting to
    sep_min / 20; steps above sep_min / 10 are rejected as too coarse.
    ||y||_p is the discrete norm of the full data vector.  A zero data
    vector yields ratio 0 by convention.
    """
    p = float(p)
    if p not in VALID_P:
        raise ValidationError(f"p must be one of 1, 2, inf, got {p}")
    window = spec.window
    if grid_step is None:
        grid_step = window.sep_min / 20.0
    if grid_step <= 0 or grid_step > window.sep_min / 10.0:
        raise ValidationError(
            f"grid_step must lie in (0, sep_min/10] = (0, {window.sep_min / 10.0:g}], "
            f"got {grid_step}"
        )
    lo, hi = window.core_hull(margin)
    if hi <= lo:
        raise ValidationError("degenerate core hull: need at least two core nodes")
    n_cells = max(1, int(math.ceil((hi - lo) / grid_step)))
    xs = np.linspace(lo, hi, n_cells + 1)
    values = eval_interpolant(spec, xs)
    if p == math.inf:
        norm_ip = float(np.abs(values).max())
    elif p == 1:
        norm_ip = float(np.trapezoid(np.abs(values), xs))
    else:
        norm_ip = float(np.sqrt(np.trapezoid(values * values, xs)))
    norm_yp = _discrete_norm(spec.data, p)
    ratio = 0.0 if norm_yp == 0.0 else norm_ip / norm_yp
    return StabilityReport(
        p=p,
        norm_Ip=norm_ip,
        norm_yp=norm_yp,
        ratio=ratio,
        grid_step=float(xs[1] - xs[0]) if xs.size > 1 else float(grid_step),
    )


def stability_record(spec: Interpolant, report: StabilityReport) -> dict:
    """JSON-ready stability record including the run's kernel and window size."""
    return {
        "p": "inf" if report.p == math.inf else int(report.p),
        "norm_Ip": report.norm_Ip,
        "norm_yp": report.norm_yp,
        "ratio": report.ratio,
        "grid_step": report.grid_step,
        "N": spec.window.half_width,
        "alpha": spec.params.alpha,
        "k": spec.params.k,
    }
