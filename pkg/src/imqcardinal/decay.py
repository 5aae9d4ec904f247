"""Off-diagonal decay measurement: envelopes, power-law fits, bound ratios.

An *envelope* of a matrix row is the per-lag maximum magnitude profile,
with the lag measured either in index distance |m - n| or in position
distance |x_m - x_n|.  Power-law decay is quantified by least squares on
(log lag, log magnitude).

Two bound-ratio checks quantify kernel-shaped decay directly: for a matrix
power R^n, and for a computed inverse, the maximum over core pairs (s, t) of

    |M(s, t)| * (alpha^2 + (x_s - x_t)^2)^k

is the measured constant in front of the kernel decay profile.

All operations are pure over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .collocation import InverseMatrix
from .errors import FitError, ValidationError
from .kernel import KernelParams, _int_power
from .nodes import NodeWindow
from ._serialize import write_json, write_xy_csv

MAGNITUDE_FLOOR = 1e-300  # below this, log-fit points are excluded as zeros
DEFAULT_POWER_CAP = 8

LAG_KINDS = ("index", "position")


@dataclass(frozen=True, eq=False)
class DecayEnvelope:
    """Per-lag maximum magnitudes; lags strictly increasing."""

    lags: np.ndarray
    magnitudes: np.ndarray
    lag_kind: str

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=float)
        mags = np.asarray(self.magnitudes, dtype=float)
        if self.lag_kind not in LAG_KINDS:
            raise ValidationError(f"lag_kind must be one of {LAG_KINDS}, got {self.lag_kind!r}")
        if lags.shape != mags.shape or lags.ndim != 1:
            raise ValidationError("lags and magnitudes must be 1-D and equal length")
        if lags.size and (lags.min() <= 0 or np.any(np.diff(lags) <= 0)):
            raise ValidationError("lags must be positive and strictly increasing")
        if mags.size and mags.min() < 0:
            raise ValidationError("magnitudes must be non-negative")
        lags.setflags(write=False)
        mags.setflags(write=False)
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "magnitudes", mags)


@dataclass(frozen=True)
class DecayFit:
    """Fitted power law magnitude ~ exp(log_prefactor) * lag^exponent."""

    exponent: float
    log_prefactor: float
    residual_rms: float
    lag_lo: float
    lag_hi: float
    n_points: int
    n_excluded: int

    @property
    def fit_window(self) -> tuple[float, float]:
        return (self.lag_lo, self.lag_hi)


@dataclass(frozen=True)
class BoundReport:
    """Max kernel-weighted ratio over core pairs, with its argmax (logical)."""

    max_ratio: float
    argmax_pair: tuple[int, int]
    truncation_size: int


def envelope_of(
    entries: np.ndarray,
    center_row: int = 0,
    lag_kind: str = "index",
    window: NodeWindow | None = None,
    margin: int | None = None,
) -> DecayEnvelope:
    """Envelope of one matrix row against index or position distance.

    ``center_row`` is a logical index (0 = window center) and must lie in
    the interior core.  Without a window the matrix must be odd-sized and is
    treated as a unit-lattice window, so index and position lags coincide.
    Equal lags keep the larger magnitude; the diagonal (lag 0) is excluded.
    """
    entries = np.asarray(entries, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValidationError(f"entries must be square, got shape {entries.shape}")
    n = entries.shape[0]
    if window is not None:
        if window.size != n:
            raise ValidationError(f"window size {window.size} does not match matrix size {n}")
        positions = window.nodes
        center = window.center_index + center_row
        core = window.core_storage(margin)
    else:
        if n % 2 == 0:
            raise ValidationError("even-sized matrix needs an explicit window")
        positions = np.arange(n, dtype=float)
        center = (n - 1) // 2 + center_row
        core = NodeWindow(positions).core_storage(margin)
    if center not in core:
        raise ValidationError(f"center_row {center_row} lies outside the interior core")

    if lag_kind == "index":
        lag = np.abs(np.arange(n) - center).astype(float)
    elif lag_kind == "position":
        lag = np.abs(positions - positions[center])
    else:
        raise ValidationError(f"lag_kind must be one of {LAG_KINDS}, got {lag_kind!r}")

    best: dict[float, float] = {}
    row = np.abs(entries[center])
    for j in range(n):
        if j == center:
            continue
        key = float(lag[j])
        mag = float(row[j])
        if key not in best or mag > best[key]:
            best[key] = mag
    lags = np.array(sorted(best))
    return DecayEnvelope(lags, np.array([best[v] for v in lags]), lag_kind)


def fit_exponent(envelope: DecayEnvelope, lag_lo: float, lag_hi: float) -> DecayFit:
    """Least-squares line through (log lag, log magnitude) on [lag_lo, lag_hi].

    Zero/denormal magnitudes inside the window are skipped and counted in
    ``n_excluded``.  Requires at least 5 usable points.
    """
    if not lag_lo < lag_hi:
        raise FitError(f"empty fit window [{lag_lo}, {lag_hi}]")
    in_window = (envelope.lags >= lag_lo) & (envelope.lags <= lag_hi)
    usable = in_window & (envelope.magnitudes > MAGNITUDE_FLOOR)
    n_excluded = int(in_window.sum() - usable.sum())
    n_points = int(usable.sum())
    if n_points < 5:
        raise FitError(
            f"fit window [{lag_lo}, {lag_hi}] holds {n_points} usable points; need >= 5"
        )
    x = np.log(envelope.lags[usable])
    y = np.log(envelope.magnitudes[usable])
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    return DecayFit(
        exponent=float(slope),
        log_prefactor=float(intercept),
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
        lag_lo=float(lag_lo),
        lag_hi=float(lag_hi),
        n_points=n_points,
        n_excluded=n_excluded,
    )


def _kernel_weights(params: KernelParams, positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None] - positions[None, :]
    return _int_power(params.alpha**2 + diff * diff, params.k)


def matrix_power_ratio(
    entries: np.ndarray,
    n: int,
    params: KernelParams,
    window: NodeWindow,
    margin: int | None = None,
    power_cap: int = DEFAULT_POWER_CAP,
) -> BoundReport:
    """Max kernel-weighted ratio of the n-th matrix power over core pairs.

    Computes R^n by repeated multiplication and reports
    ``max |R^n(s,t)| * (alpha^2 + (x_s - x_t)^2)^k`` with the maximizing
    logical pair.  ``n`` beyond ``power_cap`` (default 8) is rejected as an
    overflow guard.
    """
    entries = np.asarray(entries, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValidationError(f"entries must be square, got shape {entries.shape}")
    if entries.shape[0] != window.size:
        raise ValidationError("matrix size does not match window size")
    if n < 1:
        raise ValidationError(f"power n must be >= 1, got {n}")
    if n > power_cap:
        raise ValidationError(f"power n={n} exceeds the cap {power_cap}")
    power = entries
    for _ in range(n - 1):
        power = power @ entries
    return _bound_ratio(power, params, window, margin)


def inverse_bound_ratio(
    inverse: InverseMatrix | np.ndarray,
    params: KernelParams,
    window: NodeWindow,
    margin: int | None = None,
    row: int | None = None,
) -> BoundReport:
    """Max kernel-weighted ratio of inverse entries over core pairs.

    This is the empirical constant C in |A^(-1)(s,t)| <= C * phi(x_s - x_t).
    With ``row`` given (logical index), only pairs (row, t) are scanned,
    which exposes the shift invariance of the ratio on lattice windows.
    """
    entries = inverse.entries if isinstance(inverse, InverseMatrix) else np.asarray(inverse)
    if entries.shape[0] != window.size:
        raise ValidationError("matrix size does not match window size")
    return _bound_ratio(entries, params, window, margin, row)


def _bound_ratio(entries, params, window, margin, row=None) -> BoundReport:
    core = window.core_storage(margin)
    weights = _kernel_weights(params, window.nodes[core])
    sub = np.abs(entries[np.ix_(core, core)]) * weights
    if row is not None:
        s = window.to_storage(row)
        if s not in core:
            raise ValidationError(f"row {row} lies outside the interior core")
        r = int(np.searchsorted(core, s))
        t = int(np.argmax(sub[r]))
        return BoundReport(
            max_ratio=float(sub[r, t]),
            argmax_pair=(row, window.to_logical(int(core[t]))),
            truncation_size=window.size,
        )
    flat = int(np.argmax(sub))
    i, j = np.unravel_index(flat, sub.shape)
    return BoundReport(
        max_ratio=float(sub[i, j]),
        argmax_pair=(
            window.to_logical(int(core[i])),
            window.to_logical(int(core[j])),
        ),
        truncation_size=window.size,
    )


def write_envelope_csv(envelope: DecayEnvelope, path) -> None:
    """Envelope export: CSV with header ``lag,magnitude``."""
    write_xy_csv(path, ("lag", "magnitude"), envelope.lags, envelope.magnitudes)


def fit_record(fit: DecayFit) -> dict:
    """JSON-ready record of a decay fit."""
    return {
        "exponent": fit.exponent,
        "log_prefactor": fit.log_prefactor,
        "residual_rms": fit.residual_rms,
        "lag_lo": fit.lag_lo,
        "lag_hi": fit.lag_hi,
    }


def write_fit_json(fit: DecayFit, path) -> None:
    write_json(path, fit_record(fit))
