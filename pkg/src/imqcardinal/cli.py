"""Batch front end: JSON experiment configs, orchestration, report emission.

Usage::

    imq <experiment> --config cfg.json [--out DIR] [--alpha A] [--k K]
        [--n N] [--seed S]

The experiment may come from the positional argument or the config file
("experiment" key); flags override config values.  Reports are written as
``report.json`` plus experiment CSV/JSON artifacts to the output directory;
identical configs reproduce byte-identical outputs.

Exit codes: 0 = pass, 2 = a configured tolerance failed (or a Neumann run
was flagged non-convergent), 1 = error.

The environment variable ``IMQ_MAX_NODES`` overrides the 5001-node size
guard for matrix construction.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import collocation, decay, fundamental, interp
from .collocation import DEFAULT_MAX_NODES, build_matrix
from .errors import ConfigError, ConvergenceError, FitError, NotPositiveDefiniteError, ValidationError
from .kernel import KernelParams
from .nodes import NodeWindow, jittered_window, lattice_window, load_window
from ._serialize import write_json, write_xy_csv

EXPERIMENTS = (
    "cardinality",
    "decay-inverse",
    "decay-fundamental",
    "neumann",
    "lemma2",
    "interpolate",
    "lebesgue",
    "stability",
)

_COMMON_KEYS = {"experiment", "alpha", "k", "N", "nodes", "margin", "seed", "out_dir"}
_EXPERIMENT_KEYS = {
    "cardinality": {"tol"},
    "decay-inverse": {"fit_lo", "fit_hi", "lag_kind"},
    "decay-fundamental": {"x_lo", "x_hi", "samples"},
    "neumann": {"n_terms"},
    "lemma2": {"power", "max_ratio_limit"},
    "interpolate": {"rhs", "grid_step", "tol"},
    "lebesgue": {"grid_step", "tol"},
    "stability": {"p", "trials", "grid_step"},
}


@dataclass
class ExperimentConfig:
    experiment: str
    alpha: float
    k: int
    N: int
    nodes: dict
    margin: int | None
    seed: int
    out_dir: str
    options: dict

    def as_dict(self) -> dict:
        base = {
            "experiment": self.experiment,
            "alpha": self.alpha,
            "k": self.k,
            "N": self.N,
            "nodes": self.nodes,
            "margin": self.margin,
            "seed": self.seed,
            "out_dir": self.out_dir,
        }
        base.update(self.options)
        return base


def _number(data, key, default, minimum=None, strict_min=None):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}")
    if strict_min is not None and value <= strict_min:
        raise ConfigError(f"{key} must be > {strict_min}, got {value}")
    return float(value)


def _integer(data, key, default, minimum=None):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}")
    return int(value)


def _resolve_nodes(raw, default_seed: int) -> dict:
    if raw == "lattice":
        return {"kind": "lattice"}
    if isinstance(raw, dict) and set(raw) == {"jitter"}:
        inner = raw["jitter"]
        if not isinstance(inner, dict):
            raise ConfigError('nodes.jitter must be an object like {"delta": 0.25, "seed": 1}')
        extra = set(inner) - {"delta", "seed"}
        if extra:
            raise ConfigError(f"unknown nodes.jitter keys: {', '.join(sorted(extra))}")
        delta = _number(inner, "delta", 0.25, minimum=0.0)
        if delta >= 0.5:
            raise ConfigError(f"nodes.jitter.delta must be < 0.5, got {delta}")
        seed = _integer(inner, "seed", default_seed)
        return {"kind": "jitter", "delta": delta, "seed": seed}
    if isinstance(raw, dict) and set(raw) == {"file"}:
        path = raw["file"]
        if not isinstance(path, str):
            raise ConfigError(f"nodes.file must be a path string, got {path!r}")
        if not Path(path).is_file():
            raise FileNotFoundError(f"node file not found: {path}")
        return {"kind": "file", "path": path}
    raise ConfigError(
        'nodes must be "lattice", {"jitter": {"delta": ..., "seed": ...}}, '
        'or {"file": "path"}'
    )


def _resolve_rhs(raw, default_seed: int) -> dict:
    if raw is None:
        return {"unit": 0}
    if isinstance(raw, dict) and set(raw) == {"unit"}:
        if isinstance(raw["unit"], bool) or not isinstance(raw["unit"], int):
            raise ConfigError(f"rhs.unit must be an integer index, got {raw['unit']!r}")
        return {"unit": int(raw["unit"])}
    if isinstance(raw, dict) and set(raw) == {"values"}:
        values = raw["values"]
        if not isinstance(values, list) or not values:
            raise ConfigError("rhs.values must be a non-empty list of numbers")
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"rhs.values entries must be finite numbers, got {v!r}")
        return {"values": [float(v) for v in values]}
    if isinstance(raw, dict) and set(raw) == {"random"}:
        inner = raw["random"]
        if inner is True:
            inner = {}
        if not isinstance(inner, dict) or set(inner) - {"seed"}:
            raise ConfigError('rhs.random must be true or {"seed": ...}')
        return {"random": {"seed": _integer(inner, "seed", default_seed)}}
    raise ConfigError('rhs must be {"unit": m}, {"values": [...]}, or {"random": ...}')


def resolve_config(data: dict) -> ExperimentConfig:
    """Validate a raw config mapping and apply defaults."""
    if not isinstance(data, dict):
        raise ConfigError(f"config must be a JSON object, got {type(data).__name__}")
    experiment = data.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"experiment must be one of {', '.join(EXPERIMENTS)}, got {experiment!r}"
        )
    allowed = _COMMON_KEYS | _EXPERIMENT_KEYS[experiment]
    extra = set(data) - allowed
    if extra:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")

    alpha = _number(data, "alpha", 2.0, strict_min=0.0)
    k = _integer(data, "k", 2, minimum=1)
    N = _integer(data, "N", 100, minimum=0)
    seed = _integer(data, "seed", 1)
    nodes = _resolve_nodes(data.get("nodes", "lattice"), seed)
    margin = data.get("margin")
    if margin is None:
        margin = N // 4 if nodes["kind"] != "file" else None
    else:
        margin = _integer(data, "margin", None, minimum=0)
    out_dir = data.get("out_dir", "imq-out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError(f"out_dir must be a non-empty path string, got {out_dir!r}")

    options: dict = {}
    if experiment == "cardinality":
        options["tol"] = _number(data, "tol", 1e-8, strict_min=0.0)
    elif experiment == "decay-inverse":
        options["fit_lo"] = _number(data, "fit_lo", 20.0, strict_min=0.0)
        default_hi = min(80.0, N / 2.0 - (margin or 0))
        options["fit_hi"] = _number(data, "fit_hi", default_hi)
        if options["fit_hi"] <= options["fit_lo"]:
            raise ConfigError(
                f"fit_hi must be > fit_lo, got [{options['fit_lo']}, {options['fit_hi']}]"
            )
        lag_kind = data.get("lag_kind", "position")
        if lag_kind not in decay.LAG_KINDS:
            raise ConfigError(f"lag_kind must be one of {decay.LAG_KINDS}, got {lag_kind!r}")
        options["lag_kind"] = lag_kind
    elif experiment == "decay-fundamental":
        options["x_lo"] = _number(data, "x_lo", 10.0, strict_min=0.0)
        options["x_hi"] = _number(data, "x_hi", 60.0)
        if options["x_hi"] <= options["x_lo"]:
            raise ConfigError(
                f"x_hi must be > x_lo, got [{options['x_lo']}, {options['x_hi']}]"
            )
        options["samples"] = _integer(data, "samples", 501, minimum=50)
    elif experiment == "neumann":
        raw_terms = data.get("n_terms", [5, 10, 20])
        if isinstance(raw_terms, int) and not isinstance(raw_terms, bool):
            raw_terms = [raw_terms]
        if (
            not isinstance(raw_terms, list)
            or not raw_terms
            or any(isinstance(t, bool) or not isinstance(t, int) or t < 1 for t in raw_terms)
        ):
            raise ConfigError(f"n_terms must be positive integers, got {raw_terms!r}")
        options["n_terms"] = list(raw_terms)
    elif experiment == "lemma2":
        options["power"] = _integer(data, "power", 2, minimum=1)
        limit = data.get("max_ratio_limit")
        if limit is not None:
            limit = _number(data, "max_ratio_limit", None, strict_min=0.0)
        options["max_ratio_limit"] = limit
    elif experiment == "interpolate":
        options["rhs"] = _resolve_rhs(data.get("rhs"), seed)
        options["grid_step"] = (
            None if data.get("grid_step") is None
            else _number(data, "grid_step", None, strict_min=0.0)
        )
        options["tol"] = _number(data, "tol", 1e-8, strict_min=0.0)
    elif experiment == "lebesgue":
        options["grid_step"] = (
            None if data.get("grid_step") is None
            else _number(data, "grid_step", None, strict_min=0.0)
        )
        options["tol"] = _number(data, "tol", 1e-8, strict_min=0.0)
    elif experiment == "stability":
        p = data.get("p", "inf")
        if p in (1, 2) and not isinstance(p, bool):
            p = str(p)
        if p not in ("1", "2", "inf"):
            raise ConfigError(f'p must be 1, 2, or "inf", got {p!r}')
        options["p"] = p
        options["trials"] = _integer(data, "trials", 50, minimum=1)
        options["grid_step"] = (
            None if data.get("grid_step") is None
            else _number(data, "grid_step", None, strict_min=0.0)
        )

    return ExperimentConfig(
        experiment=experiment,
        alpha=alpha,
        k=k,
        N=N,
        nodes=nodes,
        margin=margin,
        seed=seed,
        out_dir=out_dir,
        options=options,
    )


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON config document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return resolve_config(data)


def _build_window(config: ExperimentConfig) -> NodeWindow:
    nodes = config.nodes
    if nodes["kind"] == "lattice":
        return lattice_window(config.N)
    if nodes["kind"] == "jitter":
        return jittered_window(config.N, nodes["delta"], nodes["seed"])
    return load_window(nodes["path"])


def _run_cardinality(config, matrix, margin):
    tol = config.options["tol"]
    window = matrix.window
    core = window.core_storage(margin)
    fundamentals = fundamental.make_all_fundamentals(matrix)
    deviations = []
    worst = (-1.0, 0, 0)
    for i in core:
        m = window.to_logical(int(i))
        report = fundamental.cardinality_residual(fundamentals[i], tol, margin)
        deviations.append((m, report.max_abs_deviation))
        if report.max_abs_deviation > worst[0]:
            worst = (report.max_abs_deviation, m, report.argmax_node)
    results = {
        "max_abs_deviation": worst[0],
        "argmax_center": worst[1],
        "argmax_node": worst[2],
        "tol": tol,
        "n_core": len(deviations),
    }
    artifacts = {
        "deviations.csv": {
            "kind": "xy",
            "header": ("m", "deviation"),
            "x": [m for m, _ in deviations],
            "y": [d for _, d in deviations],
        }
    }
    return results, worst[0] <= tol, artifacts


def _run_decay_inverse(config, matrix, margin):
    opts = config.options
    inverse = collocation.dense_invert(matrix, margin)
    env = decay.envelope_of(
        inverse.entries, 0, opts["lag_kind"], matrix.window, margin
    )
    fit = decay.fit_exponent(env, opts["fit_lo"], opts["fit_hi"])
    limit = -2.0 * config.k + 0.5
    prior_limit = -(2.0 * config.k - 2.0) - 0.5
    results = {
        "exponent": fit.exponent,
        "log_prefactor": fit.log_prefactor,
        "residual_rms": fit.residual_rms,
        "fit_lo": fit.lag_lo,
        "fit_hi": fit.lag_hi,
        "n_points": fit.n_points,
        "n_excluded": fit.n_excluded,
        "exponent_limit": limit,
        "prior_rate_limit": prior_limit,
        "inverse_residual_norm": inverse.residual_norm,
    }
    passed = fit.exponent <= limit and fit.exponent <= prior_limit
    artifacts = {
        "envelope.csv": {
            "kind": "xy",
            "header": ("lag", "magnitude"),
            "x": env.lags,
            "y": env.magnitudes,
        },
        "fit.json": {"kind": "json", "data": decay.fit_record(fit)},
    }
    return results, passed, artifacts


def _run_decay_fundamental(config, matrix, margin):
    opts = config.options
    L = fundamental.make_fundamental(matrix, 0)
    env = fundamental.fundamental_envelope(
        L, opts["x_lo"], opts["x_hi"], opts["samples"], margin
    )
    fit = decay.fit_exponent(env, env.lags[0], env.lags[-1])
    limit = -2.0 * config.k + 0.5
    passed = fit.exponent <= limit

    # plateau of |L(x)| * (alpha^2 + (x - x_m)^2)^k: compare [5, 50] to [5, 10]
    hull_lo, hull_hi = matrix.window.core_hull(margin)
    center = matrix.window.node_at(L.center)
    plateau = None
    if hull_hi >= center + 10.0:
        hi = min(50.0, hull_hi - center)
        xs = center + np.arange(5.0, hi + 1e-9, 0.01)
        weights = (config.alpha**2 + (xs - center) ** 2) ** config.k
        ratio = np.abs(fundamental.eval_fundamental(L, xs)) * weights
        max_all = float(ratio.max())
        max_near = float(ratio[xs <= center + 10.0].max())
        plateau = {
            "max_ratio_full": max_all,
            "max_ratio_near": max_near,
            "factor": max_all / max_near,
            "x_full": [5.0, hi],
            "x_near": [5.0, 10.0],
        }
        passed = passed and max_all <= 2.0 * max_near
    results = {
        "exponent": fit.exponent,
        "log_prefactor": fit.log_prefactor,
        "residual_rms": fit.residual_rms,
        "exponent_limit": limit,
        "n_points": fit.n_points,
        "n_excluded": fit.n_excluded,
        "plateau": plateau,
    }
    artifacts = {
        "envelope.csv": {
            "kind": "xy",
            "header": ("lag", "magnitude"),
            "x": env.lags,
            "y": env.magnitudes,
        },
        "fit.json": {"kind": "json", "data": decay.fit_record(fit)},
    }
    return results, passed, artifacts


def _run_neumann(config, matrix, margin):
    runs = []
    flagged = False
    state = None
    for n in config.options["n_terms"]:
        inverse, state = collocation.neumann_inverse(matrix, n, margin)
        runs.append((n, inverse, state))
        flagged = flagged or state.non_convergent
    results = {
        "r_norm": state.r_norm,
        "a_norm": state.a_norm,
        "a_inv_norm": state.a_inv_norm,
        "non_convergent": flagged,
        "terms": [],
    }
    if flagged:
        for n, _, st in runs:
            results["terms"].append(
                {"n_terms": n, "remainder_bound": st.remainder_bound, "error": None}
            )
        return results, False, {}
    direct = collocation.dense_invert(matrix, margin)
    errors = []
    for n, inverse, st in runs:
        err = float(np.abs(inverse.entries - direct.entries).max())
        errors.append(err)
        results["terms"].append(
            {"n_terms": n, "remainder_bound": st.remainder_bound, "error": err}
        )
    within_bounds = all(
        term["error"] <= term["remainder_bound"] for term in results["terms"]
    )
    decreasing = all(a > b for a, b in zip(errors, errors[1:]))
    results["within_bounds"] = within_bounds
    results["strictly_decreasing"] = decreasing
    return results, within_bounds and decreasing, {}


def _run_lemma2(config, matrix, margin):
    opts = config.options
    report = decay.matrix_power_ratio(
        matrix.entries, opts["power"], matrix.params, matrix.window, margin
    )
    results = {
        "power": opts["power"],
        "max_ratio": report.max_ratio,
        "argmax_pair": list(report.argmax_pair),
        "truncation_size": report.truncation_size,
        "max_ratio_limit": opts["max_ratio_limit"],
    }
    passed = opts["max_ratio_limit"] is None or report.max_ratio <= opts["max_ratio_limit"]
    return results, passed, {}


def _make_rhs(rhs: dict, matrix) -> np.ndarray:
    n = matrix.size
    if "unit" in rhs:
        return collocation.unit_vector(matrix, rhs["unit"])
    if "values" in rhs:
        values = np.asarray(rhs["values"], dtype=float)
        if values.shape != (n,):
            raise ConfigError(f"rhs.values must have length {n}, got {values.size}")
        return values
    rng = np.random.default_rng(rhs["random"]["seed"])
    return rng.uniform(-1.0, 1.0, n)


def _run_interpolate(config, matrix, margin):
    opts = config.options
    window = matrix.window
    y = _make_rhs(opts["rhs"], matrix)
    spec = interp.make_interpolant(matrix, y)
    core = window.core_storage(margin)
    node_values = interp.eval_interpolant(spec, window.nodes[core])
    max_node_error = float(np.abs(node_values - y[core]).max())

    step = opts["grid_step"] if opts["grid_step"] is not None else window.sep_min / 20.0
    lo, hi = window.core_hull(margin)
    n_cells = max(1, int(math.ceil((hi - lo) / step)))
    xs = np.linspace(lo, hi, n_cells + 1)
    values = interp.eval_interpolant(spec, xs)
    results = {
        "max_node_error": max_node_error,
        "tol": opts["tol"],
        "n_samples": int(xs.size),
        "grid_step": float(xs[1] - xs[0]) if xs.size > 1 else step,
    }
    artifacts = {
        "samples.csv": {"kind": "xy", "header": ("x", "value"), "x": xs, "y": values}
    }
    return results, max_node_error <= opts["tol"], artifacts


def _run_lebesgue(config, matrix, margin):
    opts = config.options
    window = matrix.window
    if window.size < 2:
        raise ValidationError("lebesgue experiment needs at least two nodes")
    fundamentals = fundamental.make_all_fundamentals(matrix)
    step = opts["grid_step"] if opts["grid_step"] is not None else window.sep_min / 20.0
    cell_lo = window.nodes[window.center_index]
    cell_hi = window.nodes[window.center_index + 1]
    n_cells = max(1, int(math.ceil((cell_hi - cell_lo) / step)))
    xs = np.linspace(cell_lo, cell_hi, n_cells + 1)
    lam = interp.lebesgue_function(fundamentals, xs)

    core = window.core_storage(margin)
    lam_nodes = interp.lebesgue_function(fundamentals, window.nodes[core])
    max_node_dev = float(np.abs(lam_nodes - 1.0).max())
    results = {
        "sup_central_cell": float(np.max(lam)),
        "central_cell": [float(cell_lo), float(cell_hi)],
        "max_node_deviation": max_node_dev,
        "tol": opts["tol"],
    }
    artifacts = {
        "lebesgue.csv": {"kind": "xy", "header": ("x", "value"), "x": xs, "y": lam}
    }
    return results, max_node_dev <= opts["tol"], artifacts


def _run_stability(config, matrix, margin):
    opts = config.options
    p = math.inf if opts["p"] == "inf" else float(opts["p"])
    rng = np.random.default_rng(config.seed)
    best = None
    ratios = []
    for _ in range(opts["trials"]):
        y = rng.uniform(-1.0, 1.0, matrix.size)
        y /= np.abs(y).max()
        spec = interp.make_interpolant(matrix, y)
        report = interp.lp_stability(spec, p, opts["grid_step"], margin)
        ratios.append(report.ratio)
        if best is None or report.ratio > best[1].ratio:
            best = (spec, report)
    results = {
        "p": opts["p"],
        "trials": opts["trials"],
        "max_ratio": float(np.max(ratios)),
        "mean_ratio": float(np.mean(ratios)),
        "grid_step": best[1].grid_step,
    }
    artifacts = {
        "stability.json": {"kind": "json", "data": interp.stability_record(*best)}
    }
    return results, True, artifacts


_RUNNERS = {
    "cardinality": _run_cardinality,
    "decay-inverse": _run_decay_inverse,
    "decay-fundamental": _run_decay_fundamental,
    "neumann": _run_neumann,
    "lemma2": _run_lemma2,
    "interpolate": _run_interpolate,
    "lebesgue": _run_lebesgue,
    "stability": _run_stability,
}


def run_experiment(config: ExperimentConfig) -> dict:
    """Execute the configured experiment, write artifacts, return the report."""
    window = _build_window(config)
    margin = config.margin if config.margin is not None else window.default_margin
    params = KernelParams(config.alpha, config.k)
    max_nodes = int(os.environ.get("IMQ_MAX_NODES", DEFAULT_MAX_NODES))
    matrix = build_matrix(params, window, max_nodes)

    results, passed, artifacts = _RUNNERS[config.experiment](config, matrix, margin)

    resolved = config.as_dict()
    resolved["margin"] = margin
    resolved["N"] = window.half_width
    report = {
        "experiment": config.experiment,
        "passed": bool(passed),
        "config": resolved,
        "results": results,
        "artifacts": artifacts,
    }
    emit_report(report, config.out_dir)
    report.pop("artifacts")
    return report


def emit_report(report: dict, out_dir) -> list[Path]:
    """Write report.json plus any attached CSV/JSON artifacts to out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    payload = {key: value for key, value in report.items() if key != "artifacts"}
    report_path = out / "report.json"
    write_json(report_path, payload)
    written.append(report_path)
    for name, artifact in report.get("artifacts", {}).items():
        path = out / name
        if artifact["kind"] == "xy":
            write_xy_csv(path, artifact["header"], artifact["x"], artifact["y"])
        elif artifact["kind"] == "json":
            write_json(path, artifact["data"])
        else:
            raise ValueError(f"unknown artifact kind {artifact['kind']!r}")
        written.append(path)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="imq",
        description="Inverse multiquadric cardinal interpolation experiments.",
    )
    parser.add_argument("experiment", nargs="?", default=None,
                        help=f"one of: {', '.join(EXPERIMENTS)}")
    parser.add_argument("--config", help="path to a JSON config document")
    parser.add_argument("--out", help="output directory (overrides config out_dir)")
    parser.add_argument("--alpha", type=float, help="kernel shape override")
    parser.add_argument("--k", type=int, help="kernel order override")
    parser.add_argument("--n", type=int, help="window half-width N override")
    parser.add_argument("--seed", type=int, help="seed override")
    args = parser.parse_args(argv)

    try:
        if args.config is not None:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except FileNotFoundError:
                raise FileNotFoundError(f"config file not found: {args.config}")
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
            if not isinstance(data, dict):
                raise ConfigError("config must be a JSON object")
        else:
            data = {}
        if args.experiment is not None:
            data["experiment"] = args.experiment
        if args.alpha is not None:
            data["alpha"] = args.alpha
        if args.k is not None:
            data["k"] = args.k
        if args.n is not None:
            data["N"] = args.n
        if args.seed is not None:
            data["seed"] = args.seed
        if args.out is not None:
            data["out_dir"] = args.out
        config = resolve_config(data)
        report = run_experiment(config)
    except (ConfigError, ValidationError, FitError, NotPositiveDefiniteError,
            ConvergenceError, FileNotFoundError, OSError) as exc:
        print(f"error: {type(exc).__module__}.{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    status = "PASS" if report["passed"] else "FAIL"
    print(f"{report['experiment']}: {status} (report: {Path(config.out_dir) / 'report.json'})")
    return 0 if report["passed"] else 2


if __name__ == "__main__":
    sys.exit(main())
