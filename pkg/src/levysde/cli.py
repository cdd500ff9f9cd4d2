"""Command-line front end.

One JSON configuration document drives each run; the schema is validated
before any computation and unknown keys are rejected. Subcommands:

  simulate    generate a seeded path, write series CSV + metadata JSON
  fit         ingest, initialize, fit (two-pass when truncation is
              configured), uncertainties, diagnostics, report files
  pdf / cdf   tabulate the stable density / distribution as a curve CSV
  residuals   standardized innovations of a series under a model
  potential   effective potential of a data file as a curve CSV
  report      render a saved report JSON as text

Exit codes: 0 success (fit: converged), 1 usage or configuration,
2 data problems, 3 numerical failures.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .analysis import (
    effective_potential,
    find_potential_minima,
    ks_residual_test,
    model_report,
    render_report_text,
)
from .errors import ConfigurationError, DataError, LevySdeError
from .estimate import FitOptions, fit_mle, initialize_params, two_pass_fit
from .likelihood import TimeSeries, compute_residuals
from .models import SplineDrift, SplineNoise, pack_params
from .serialize import dumps_json17, model_from_dict, model_to_dict, write_json17
from .simulate import SimConfig, simulate_path
from .stable import StableParams, stable_cdf, stable_log_pdf

__all__ = ["main", "ingest_csv", "RUN_CONFIG_SCHEMA"]


# ---------------------------------------------------------------------------
# Configuration schema

_FREE = {"type": "array", "items": {"type": "boolean"}}
_NUMBERS = {"type": "array", "items": {"type": "number"}}

_DRIFT_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"const": "polynomial"},
                "coefficients": _NUMBERS,
                "free": _FREE,
            },
            "required": ["kind", "coefficients"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "spline"},
                "knots": _NUMBERS,
                "ordinates": _NUMBERS,
                "free": _FREE,
            },
            "required": ["kind", "knots", "ordinates"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "lotka_volterra"},
                "r": {"type": "number"},
                "interactions": _NUMBERS,
                "free": _FREE,
            },
            "required": ["kind", "r", "interactions"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "multinomial"},
                "coefficients": _NUMBERS,
                "exponents": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                },
                "free": _FREE,
            },
            "required": ["kind", "coefficients", "exponents"],
            "additionalProperties": False,
        },
    ]
}

_NOISE_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"const": "constant"},
                "sigma": {"type": "number", "exclusiveMinimum": 0},
                "free": _FREE,
            },
            "required": ["kind", "sigma"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "spline"},
                "knots": _NUMBERS,
                "sigma_ordinates": _NUMBERS,
                "free": _FREE,
            },
            "required": ["kind", "knots", "sigma_ordinates"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "polynomial"},
                "log_coefficients": _NUMBERS,
                "free": _FREE,
            },
            "required": ["kind", "log_coefficients"],
            "additionalProperties": False,
        },
    ]
}

_MODEL_SCHEMA = {
    "type": "object",
    "properties": {
        "dimension": {"type": "integer", "minimum": 1},
        "drift": {"type": "array", "items": _DRIFT_SCHEMA},
        "noise": {"type": "array", "items": _NOISE_SCHEMA},
        "stable": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 2},
                    "beta": {"type": "number", "minimum": -1, "maximum": 1},
                    "alpha_free": {"type": "boolean"},
                    "beta_free": {"type": "boolean"},
                },
                "required": ["alpha", "beta"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["dimension", "drift", "noise", "stable"],
    "additionalProperties": False,
}

RUN_CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "model": _MODEL_SCHEMA,
        "data": {
            "type": "object",
            "properties": {
                "path": {"type": "string"},
                "delta": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["path"],
            "additionalProperties": False,
        },
        "simulate": {
            "type": "object",
            "properties": {
                "x0": _NUMBERS,
                "delta": {"type": "number", "exclusiveMinimum": 0},
                "n_steps": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "burn_in": {"type": "integer", "minimum": 0},
                "explosion_cap": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["x0", "delta", "n_steps"],
            "additionalProperties": False,
        },
        "fit": {
            "type": "object",
            "properties": {
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
                "max_iterations": {"type": ["integer", "null"], "minimum": 1},
                "multistart": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "truncation": {
                    "type": ["object", "null"],
                    "properties": {
                        "quantiles": {
                            "type": "array",
                            "items": {"type": "number", "minimum": 0, "maximum": 1},
                            "minItems": 2,
                            "maxItems": 2,
                        },
                        "bounds": {
                            "type": "array",
                            "items": {"type": "array", "items": {"type": "number"},
                                      "minItems": 2, "maxItems": 2},
                        },
                    },
                    "additionalProperties": False,
                },
                "hessian_step": {"type": "number", "exclusiveMinimum": 0},
                "initialize": {"type": "boolean"},
                "ks_level": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {"directory": {"type": "string"}},
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}


def load_config(path) -> dict:
    import json

    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config is not valid JSON: {e}")
    try:
        jsonschema.validate(cfg, RUN_CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "(top level)"
        raise ConfigurationError(f"config schema violation at {where}: {e.message}")
    return cfg


# ---------------------------------------------------------------------------
# CSV handling


def ingest_csv(path, delta=None) -> TimeSeries:
    """Read a series CSV: header `t,x1,...,xd` (uniform t, step inferred)
    or `x1,...,xd` with the step supplied by the configuration."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except FileNotFoundError:
        raise DataError(f"data file not found: {path}")
    if len(lines) < 3:
        raise DataError("need a header row plus at least 2 observations")
    header = [h.strip() for h in lines[0].split(",")]
    has_time = header[0] in ("t", "time")
    ncol = len(header)
    rows = np.empty((len(lines) - 1, ncol))
    for i, ln in enumerate(lines[1:]):
        parts = ln.split(",")
        if len(parts) != ncol:
            raise DataError(f"row {i + 2}: expected {ncol} columns, found {len(parts)}")
        for j, cell in enumerate(parts):
            cell = cell.strip()
            if not cell:
                raise DataError(f"row {i + 2}: empty cell in column {header[j]!r}")
            try:
                rows[i, j] = float(cell)
            except ValueError:
                raise DataError(f"row {i + 2}: cannot parse {cell!r} as a number")
        if not np.all(np.isfinite(rows[i])):
            raise DataError(f"row {i + 2}: non-finite value")
    if has_time:
        t = rows[:, 0]
        steps = np.diff(t)
        step = steps[0]
        if step <= 0 or np.any(np.abs(steps - step) > 1e-6 * abs(step)):
            raise DataError("time stamps are not uniform (relative deviation > 1e-6)")
        return TimeSeries(values=rows[:, 1:], delta=float(step), timestamps=t)
    if delta is None:
        raise DataError("no time column: the sampling step must come from the config")
    return TimeSeries(values=rows, delta=float(delta))


def write_series_csv(path, ts: TimeSeries):
    d = ts.dimension
    header = ",".join(f"x{i + 1}" for i in range(d))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in ts.values:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def _write_curve_csv(path, xs, ys, names=("x", "y")):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for x, y in zip(xs, ys):
            fh.write(f"{format(x, '.17g')},{format(y, '.17g')}\n")


# ---------------------------------------------------------------------------
# Stages


@contextlib.contextmanager
def _stage(name):
    try:
        yield
    except LevySdeError as e:
        e.args = (f"{name}: {e}",) + e.args[1:]
        raise


def _outdir(cfg, args):
    out = args.out or cfg.get("output", {}).get("directory", ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _require(cfg, key, what):
    if key not in cfg:
        raise ConfigurationError(f"config section {key!r} is required to {what}")
    return cfg[key]


def cmd_simulate(args):
    cfg = load_config(args.config)
    with _stage("model"):
        model = model_from_dict(_require(cfg, "model", "simulate"))
    sim = _require(cfg, "simulate", "simulate")
    seed = args.seed if args.seed is not None else sim.get("seed", cfg.get("seed", 0))
    delta = args.delta_t or sim["delta"]
    with _stage("simulate"):
        run = SimConfig(
            model=model,
            x0=sim["x0"],
            delta=delta,
            n_steps=sim["n_steps"],
            seed=seed,
            burn_in=sim.get("burn_in", 0),
            explosion_cap=sim.get("explosion_cap", 1e12),
        )
        ts = simulate_path(run)
    out = _outdir(cfg, args)
    write_series_csv(out / "series.csv", ts)
    write_json17(
        out / "simulation_meta.json",
        {
            "package_version": __version__,
            "model": model_to_dict(model),
            "x0": list(map(float, run.x0)),
            "delta": float(run.delta),
            "n_steps": int(run.n_steps),
            "burn_in": int(run.burn_in),
            "seed": int(seed),
            "explosion_cap": float(run.explosion_cap),
            "n_rows": int(ts.n),
        },
    )
    print(f"wrote {out / 'series.csv'} ({ts.n} rows) and simulation_meta.json")
    return 0


def _load_data(cfg, args):
    data = _require(cfg, "data", "load the series")
    delta = args.delta_t or data.get("delta")
    return ingest_csv(data["path"], delta=delta)


def _fit_options(cfg, args):
    f = cfg.get("fit", {})
    trunc = f.get("truncation")
    quantiles = None
    bounds = None
    if trunc:
        if "bounds" in trunc:
            bounds = np.asarray(trunc["bounds"], dtype=float)
        else:
            quantiles = tuple(trunc.get("quantiles", (0.005, 0.995)))
    seed = args.seed if args.seed is not None else f.get("seed", cfg.get("seed", 0))
    opts = FitOptions(
        tolerance=f.get("tolerance", 1e-8),
        max_iterations=f.get("max_iterations"),
        multistart=f.get("multistart", 1),
        seed=seed,
        truncation=quantiles,
        truncation_bounds=bounds,
        hessian_step=f.get("hessian_step", 1e-4),
    )
    return opts, trunc is not None, f


def _regrid_knots(model, ts, n_knots, opts):
    """Replace spline knot sequences with n equidistant knots over the
    truncation domain (or the data range)."""
    if opts.truncation_bounds is not None:
        lo, hi = opts.truncation_bounds[0]
    else:
        q = opts.truncation or (0.005, 0.995)
        lo, hi = np.quantile(ts.values[:, 0], q)
    knots = np.linspace(lo, hi, n_knots)
    for i in range(model.dimension):
        if isinstance(model.drift[i], SplineDrift):
            model.drift[i] = SplineDrift(knots, np.zeros(n_knots))
        if isinstance(model.noise[i], SplineNoise):
            model.noise[i] = SplineNoise(knots, np.zeros(n_knots))
    return model


def cmd_fit(args):
    cfg = load_config(args.config)
    with _stage("model"):
        template = model_from_dict(_require(cfg, "model", "fit"))
    with _stage("ingest"):
        ts = _load_data(cfg, args)
    opts, truncated, fit_cfg = _fit_options(cfg, args)
    with _stage("configure"):
        if args.knots:
            template = _regrid_knots(template, ts, args.knots, opts)
    with _stage("initialize"):
        if fit_cfg.get("initialize", True):
            template = initialize_params(ts, template)
    with _stage("fit"):
        if truncated:
            fit = two_pass_fit(ts, template, opts)
        else:
            fit = fit_mle(ts, template, opts)
    with _stage("diagnostics"):
        from .likelihood import Residuals
        from .models import unpack_params

        fitted = unpack_params(fit.theta_hat.values, template)
        res = compute_residuals(ts, fitted)
        diagnostics = {}
        for i in range(fitted.dimension):
            key = "ks_residuals" if fitted.dimension == 1 else f"ks_residuals_x{i + 1}"
            diagnostics[key] = ks_residual_test(
                Residuals(res.eta[:, [i]], res.mask),
                fitted.stable[i],
                level=fit_cfg.get("ks_level", 0.01),
            )
    out = _outdir(cfg, args)
    report = model_report(fit, diagnostics)
    report["model"] = model_to_dict(fitted)
    report["data"] = {"path": cfg["data"]["path"], "delta": float(ts.delta), "n": int(ts.n)}
    report["options"] = {
        "tolerance": opts.tolerance,
        "max_iterations": opts.max_iterations,
        "multistart": opts.multistart,
        "seed": opts.seed,
        "truncation": cfg.get("fit", {}).get("truncation"),
        "hessian_step": opts.hessian_step,
        "threads": args.threads,
        "package_version": __version__,
    }
    write_json17(out / "report.json", report)
    text = render_report_text(report)
    (out / "report.txt").write_text(text, encoding="utf-8")
    header = ",".join(f"eta{i + 1}" for i in range(fitted.dimension))
    with open(out / "residuals.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in res.eta:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    print(text, end="")
    print(f"wrote {out / 'report.json'}, report.txt, residuals.csv")
    return 0 if fit.converged else 3


def _curve_params(args):
    alpha = args.alpha if args.alpha is not None else 1.8
    beta = args.beta if args.beta is not None else 0.0
    return StableParams(alpha, beta, args.gamma, args.delta)


def cmd_pdf(args):
    p = _curve_params(args)
    xs = np.linspace(args.xmin, args.xmax, args.points)
    ys = np.exp(stable_log_pdf(xs, p))
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    _write_curve_csv(out / "pdf_curve.csv", xs, ys, names=("x", "pdf"))
    print(f"wrote {out / 'pdf_curve.csv'}")
    return 0


def cmd_cdf(args):
    p = _curve_params(args)
    xs = np.linspace(args.xmin, args.xmax, args.points)
    ys = stable_cdf(xs, p)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    _write_curve_csv(out / "cdf_curve.csv", xs, ys, names=("x", "cdf"))
    print(f"wrote {out / 'cdf_curve.csv'}")
    return 0


def cmd_residuals(args):
    cfg = load_config(args.config)
    with _stage("model"):
        if args.report:
            import json

            with open(args.report, "r", encoding="utf-8") as fh:
                model = model_from_dict(json.load(fh)["model"])
        else:
            model = model_from_dict(_require(cfg, "model", "compute residuals"))
    with _stage("ingest"):
        ts = _load_data(cfg, args)
    with _stage("residuals"):
        res = compute_residuals(ts, model)
    out = _outdir(cfg, args)
    header = ",".join(f"eta{i + 1}" for i in range(ts.dimension))
    with open(out / "residuals.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in res.eta:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    print(f"wrote {out / 'residuals.csv'} ({len(res.eta)} rows)")
    return 0


def cmd_potential(args):
    cfg = load_config(args.config)
    with _stage("ingest"):
        ts = _load_data(cfg, args)
    if ts.dimension != 1:
        raise ConfigurationError("the effective potential is defined for 1-d series")
    with _stage("potential"):
        curve = effective_potential(ts.values[:, 0], grid_size=args.points)
    out = _outdir(cfg, args)
    _write_curve_csv(out / "potential.csv", curve.abscissae, curve.potential, names=("x", "U"))
    minima = find_potential_minima(curve)
    print(
        f"wrote {out / 'potential.csv'} (bandwidth {curve.bandwidth:.6g}, "
        f"{len(minima)} interior local minima)"
    )
    return 0


def cmd_report(args):
    import json

    with open(args.report, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    print(render_report_text(report), end="")
    return 0


# ---------------------------------------------------------------------------
# Parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(sub):
    sub.add_argument("--config", required=False, help="run configuration JSON")
    sub.add_argument("--seed", type=int, default=None, help="override the run seed")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--threads", type=int, default=1,
                     help="reserved; evaluation is single-threaded and deterministic")
    sub.add_argument("--delta-t", type=float, default=None, dest="delta_t",
                     help="override the sampling step")


def build_parser():
    parser = _Parser(prog="levysde", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"levysde {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="generate a seeded path")
    _add_common(sim)
    sim.set_defaults(func=cmd_simulate, needs_config=True)

    fit = subs.add_parser("fit", help="maximum-likelihood reconstruction")
    _add_common(fit)
    fit.add_argument("--knots", type=int, default=None,
                     help="replace spline knot sequences with this many equidistant knots")
    fit.set_defaults(func=cmd_fit, needs_config=True)

    for name, fn in (("pdf", cmd_pdf), ("cdf", cmd_cdf)):
        c = subs.add_parser(name, help=f"tabulate the stable {name} as a curve CSV")
        c.add_argument("--alpha", type=float, required=True)
        c.add_argument("--beta", type=float, default=0.0)
        c.add_argument("--gamma", type=float, default=1.0)
        c.add_argument("--delta", type=float, default=0.0)
        c.add_argument("--xmin", type=float, default=-10.0)
        c.add_argument("--xmax", type=float, default=10.0)
        c.add_argument("--points", type=int, default=401)
        c.add_argument("--out", default=None)
        c.set_defaults(func=fn, needs_config=False)

    res = subs.add_parser("residuals", help="standardized innovations under a model")
    _add_common(res)
    res.add_argument("--report", default=None, help="use the fitted model from a report JSON")
    res.set_defaults(func=cmd_residuals, needs_config=True)

    pot = subs.add_parser("potential", help="effective potential of a data file")
    _add_common(pot)
    pot.add_argument("--points", type=int, default=512)
    pot.set_defaults(func=cmd_potential, needs_config=True)

    rep = subs.add_parser("report", help="render a report JSON as text")
    rep.add_argument("report", help="path to report.json")
    rep.set_defaults(func=cmd_report, needs_config=False)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "needs_config", False) and not args.config:
        print(f"levysde {args.command}: error: --config is required", file=sys.stderr)
        return 1
    if getattr(args, "threads", 1) is not None and getattr(args, "threads", 1) < 1:
        print("levysde: error: --threads must be at least 1", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except LevySdeError as e:
        print(f"levysde {args.command}: error: {e}", file=sys.stderr)
        return e.exit_code
    except FileNotFoundError as e:
        print(f"levysde {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
