"""Cardinal interpolation with inverse multiquadric kernels.

Library for building and validating fundamental (cardinal Lagrange)
functions of scattered shifts of (alpha^2 + x^2)^(-k) on finite node
windows: collocation-matrix inversion (direct and by Neumann series),
off-diagonal decay measurement, and an lp-stable interpolation operator
with Lebesgue-function diagnostics.
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    FitError,
    NotPositiveDefiniteError,
    ValidationError,
)
from .kernel import KernelParams, imq_eval, partial_fraction_split
from .nodes import NodeWindow, from_list, jittered_window, lattice_window, load_window
from .collocation import (
    CollocationMatrix,
    InverseMatrix,
    NeumannState,
    SpectralDiagnostics,
    build_matrix,
    dense_invert,
    dump_matrix_csv,
    neumann_inverse,
    spd_solve,
    spectral_diagnostics,
    unit_vector,
)
from .decay import (
    BoundReport,
    DecayEnvelope,
    DecayFit,
    envelope_of,
    fit_exponent,
    fit_record,
    inverse_bound_ratio,
    matrix_power_ratio,
    write_envelope_csv,
    write_fit_json,
)
from .fundamental import (
    CardinalityReport,
    FundamentalFunction,
    SeriesValue,
    cardinality_residual,
    envelope_fit_fundamental,
    eval_fundamental,
    fundamental_envelope,
    make_all_fundamentals,
    make_fundamental,
    weighted_series_eval,
    write_samples_csv,
)
from .interp import (
    Interpolant,
    StabilityReport,
    eval_interpolant,
    lebesgue_function,
    lp_stability,
    make_interpolant,
    stability_record,
)

__version__ = "0.1.0"

__all__ = [
    "KernelParams",
    "imq_eval",
    "partial_fraction_split",
    "NodeWindow",
    "lattice_window",
    "jittered_window",
    "from_list",
    "load_window",
    "CollocationMatrix",
    "InverseMatrix",
    "NeumannState",
    "SpectralDiagnostics",
    "build_matrix",
    "spd_solve",
    "dense_invert",
    "neumann_inverse",
    "spectral_diagnostics",
    "unit_vector",
    "dump_matrix_csv",
    "DecayEnvelope",
    "DecayFit",
    "BoundReport",
    "envelope_of",
    "fit_exponent",
    "matrix_power_ratio",
    "inverse_bound_ratio",
    "write_envelope_csv",
    "write_fit_json",
    "fit_record",
    "FundamentalFunction",
    "CardinalityReport",
    "SeriesValue",
    "make_fundamental",
    "make_all_fundamentals",
    "eval_fundamental",
    "cardinality_residual",
    "fundamental_envelope",
    "envelope_fit_fundamental",
    "weighted_series_eval",
    "write_samples_csv",
    "Interpolant",
    "StabilityReport",
    "make_interpolant",
    "eval_interpolant",
    "lebesgue_function",
    "lp_stability",
    "stability_record",
    "ValidationError",
    "NotPositiveDefiniteError",
    "ConvergenceError",
    "FitError",
    "ConfigError",
]
