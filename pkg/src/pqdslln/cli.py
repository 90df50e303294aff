"""Single command-line entry point with reproducible run manifests.

One binary, subcommand style.  Every run writes ``manifest.json`` echoing
the fully resolved, result-affecting parameter set plus the tool version;
``rerun`` replays a manifest and reproduces every output byte for byte.
Execution details that cannot affect results (worker count, output
directory) are deliberately kept out of the manifest.  A flat key=value
config file may supply defaults; explicit flags win.

Exit codes: 0 success, 2 parameter/usage error, 3 numeric failure.
Verdicts are data, not errors: a "diverges" result still exits 0.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .borel_cantelli import EventSystem, GfmDependence, epsilon_bracket_check, renyi_lamperti_ratios
from .conditions import condition_sum, condition_terms, majorant_sum, tail_condition
from .copulas import GfmCopula, ThetaSchedule
from .errors import DomainError, NumericError, ParameterError
from .gfun import DeltaField, g_closed_form, g_factor, g_numeric
from .marginals import ParetoMarginal
from .quadrature import QuadSpec
from .simulate import MultivariateFgmModel, SlnnRun, run_slln
from .specfun import gamma, gauss_2f1, pochhammer

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_NUMERIC = 3

OUTDIR_ENV = "PQDSLLN_OUTDIR"
_TOOL = "pqdslln"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description: what to compute and where to put it."""

    subcommand: str
    parameters: dict
    outdir: Path
    fmt: str = "both"
    workers: int = 1


# --------------------------------------------------------------------------
# serialization helpers (deterministic bytes: sorted keys, repr floats,
# non-finite values mapped to null, no timestamps)
# --------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_json(path: Path, obj) -> None:
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n")


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _series_verdict_dict(verdict) -> dict:
    return asdict(verdict)


# --------------------------------------------------------------------------
# parameter plumbing
# --------------------------------------------------------------------------


def _parse_theta_spec(spec: str) -> dict:
    """Parse 'zero' or 'power:mu,nu[,scale]' into a structured description."""
    spec = spec.strip()
    if spec == "zero":
        return {"kind": "zero"}
    if spec.startswith("power:"):
        parts = spec[len("power:"):].split(",")
        if len(parts) not in (2, 3):
            raise ParameterError(f"theta spec must be 'power:mu,nu[,scale]', got {spec!r}")
        try:
            mu, nu = float(parts[0]), float(parts[1])
            scale = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise ParameterError(f"theta spec has non-numeric fields: {spec!r}") from exc
        return {"kind": "power", "mu": mu, "nu": nu, "scale": scale}
    raise ParameterError(f"theta spec must be 'zero' or 'power:mu,nu[,scale]', got {spec!r}")


def _parse_n_grid(spec: str) -> list[int]:
    """Parse 'log:<max>:<points>' or a comma list of sizes into an n grid."""
    spec = spec.strip()
    if spec.startswith("log:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ParameterError(f"log grid must be 'log:<max>:<points>', got {spec!r}")
        n_max, points = int(parts[1]), int(parts[2])
        if n_max < 1 or points < 1:
            raise ParameterError(f"log grid needs positive max and point count, got {spec!r}")
        raw = np.unique(np.geomspace(1, n_max, points).astype(int))
        return [int(v) for v in raw]
    try:
        values = sorted({int(tok) for tok in spec.split(",") if tok.strip()})
    except ValueError as exc:
        raise ParameterError(f"n grid must be integers, got {spec!r}") from exc
    if not values or values[0] < 1:
        raise ParameterError(f"n grid must contain positive integers, got {spec!r}")
    return values


def _dependence_from_params(params: dict) -> GfmDependence | None:
    theta = params["theta_spec"]
    if theta["kind"] == "zero":
        return None
    schedule = ThetaSchedule(mu=theta["mu"], nu=theta["nu"], p=params["p"])
    if theta.get("scale", 1.0) != 1.0:
        raise ParameterError("analytic event systems take the schedule as-is; scale is only for 'simulate'")
    return GfmDependence(r=params["r"], s=params["s"], schedule=schedule)


# --------------------------------------------------------------------------
# subcommand handlers: params dict -> (result dict, {csv name: (header, rows)}, stdout lines)
# --------------------------------------------------------------------------


def _run_specfun_eval(params: dict):
    fn = params["fn"]
    if fn == "gamma":
        value = gamma(params["x"])
        echo = {"fn": fn, "x": params["x"]}
    elif fn == "pochhammer":
        value = pochhammer(params["a"], int(params["n"]))
        echo = {"fn": fn, "a": params["a"], "n": params["n"]}
    elif fn == "2f1":
        value = gauss_2f1(params["a"], params["b"], params["c"], params["z"])
        echo = {"fn": fn, "a": params["a"], "b": params["b"], "c": params["c"], "z": params["z"]}
    else:
        raise ParameterError(f"unknown function {fn!r}; expected gamma, pochhammer or 2f1")
    result = dict(echo, value=value)
    return result, {}, [f"{value:.15g}"]


def _run_g_eval(params: dict):
    theta, r, s, u, v = (params[k] for k in ("theta", "r", "s", "u", "v"))
    method = params["method"]
    marginal = ParetoMarginal(2.0)
    methods: dict[str, float] = {}
    if method in ("closed", "all"):
        methods["closed"] = g_closed_form(theta, r, s, u, v)
    if method in ("numeric", "all"):
        spec = QuadSpec(abs_tol=params["quad_tol"], max_panels=params["max_panels"])
        field = DeltaField(GfmCopula(theta=theta, r=r, s=s), marginal)
        methods["numeric"] = g_numeric(field, u, v, spec)
    if method in ("factor", "all"):
        methods["factor"] = theta * g_factor(r, s, marginal, u) * g_factor(r, s, marginal, v)
    values = list(methods.values())
    discrepancy = max(values) - min(values) if len(values) > 1 else 0.0
    result = {
        "theta": theta,
        "r": r,
        "s": s,
        "u": u,
        "v": v,
        "methods": methods,
        "max_discrepancy": discrepancy,
    }
    lines = [f"{name}: {value:.15g}" for name, value in methods.items()]
    lines.append(f"max discrepancy: {discrepancy:.3e}")
    return result, {}, lines


def _run_condition_check(params: dict):
    schedule = ThetaSchedule(mu=params["mu"], nu=params["nu"], p=params["p"])
    marginal = ParetoMarginal(params["alpha"])
    kind = params["kind"]
    verdict = condition_sum(kind, params["p"], schedule, params["r"], params["s"], marginal, params["N"])
    j_values, terms = condition_terms(
        kind, params["p"], schedule, params["r"], params["s"], marginal, params["N"]
    )
    result = dict(_series_verdict_dict(verdict), kind=kind)
    tables = {"terms": (["j", "term"], zip(j_values.tolist(), terms.tolist()))}
    return result, tables, [f"{kind}: {verdict.verdict} (partial sum {verdict.partial_sum:.9g})"]


def _run_bc_ratio(params: dict):
    es = EventSystem(p=params["p"], marginal=ParetoMarginal(params["alpha"]), dependence=_dependence_from_params(params))
    grid = params["n_grid"]
    ratios = renyi_lamperti_ratios(es, grid)
    running_min = np.minimum.accumulate(ratios)
    result = {
        "p": params["p"],
        "alpha": params["alpha"],
        "n_grid": grid,
        "final_ratio": float(ratios[-1]),
        "running_min": float(running_min[-1]),
    }
    tables = {"ratio": (["n", "ratio", "running_min"], zip(grid, ratios.tolist(), running_min.tolist()))}
    return result, tables, [f"ratio at n={grid[-1]}: {ratios[-1]:.9g} (running min {running_min[-1]:.9g})"]


def _run_bc_bracket(params: dict):
    es = EventSystem(p=params["p"], marginal=ParetoMarginal(params["alpha"]), dependence=_dependence_from_params(params))
    check = epsilon_bracket_check(es, params["k"], params["j"], params["eps"])
    result = {
        "p": params["p"],
        "alpha": params["alpha"],
        "k": params["k"],
        "j": params["j"],
        "eps": params["eps"],
        "lhs": check.lhs,
        "rhs": check.rhs,
        "holds": check.holds,
        "quad_error": check.quad_error,
    }
    return result, {}, [f"lhs={check.lhs:.9g} rhs={check.rhs:.9g} holds={check.holds}"]


def _run_simulate_slln(params: dict, workers: int = 1):
    theta = params["theta_spec"]
    n_cap = params["n_max"]
    if theta["kind"] == "zero":
        model = None
    else:
        model = MultivariateFgmModel.from_power_schedule(
            n_cap, theta["mu"], theta["nu"], theta.get("scale", 1.0), window=params.get("window")
        )
    run = SlnnRun(
        p=params["p"],
        marginal=ParetoMarginal(params["alpha"]),
        model=model,
        n_max=n_cap,
        replicates=params["replicates"],
        seed=params["seed"],
        c=params.get("c"),
    )
    report = run_slln(run, workers=workers)
    result = {
        "checkpoints": list(report.checkpoints),
        "median_abs_m": report.median_abs_m().tolist(),
        "max_abs_m": report.max_abs_m().tolist(),
        "mean_exceedances": report.mean_exceedances().tolist(),
        "metadata": report.metadata,
    }
    rows = []
    for rep in range(report.m_values.shape[0]):
        for i, n in enumerate(report.checkpoints):
            rows.append((rep, n, report.m_values[rep, i], int(report.exceedances[rep, i])))
    tables = {"paths": (["replicate", "checkpoint_n", "m_n", "e_n"], rows)}
    lines = [
        f"checkpoints: {list(report.checkpoints)}",
        f"median |M_n|: {[f'{v:.4g}' for v in report.median_abs_m()]}",
        f"max |M_n| at n_max: {report.max_abs_m()[-1]:.6g}",
    ]
    return result, tables, lines


def _run_report_example(params: dict):
    p, mu, nu, r, s, n_terms = (params[k] for k in ("p", "mu", "nu", "r", "s", "N"))
    schedule = ThetaSchedule(mu=mu, nu=nu, p=p)
    marginal = ParetoMarginal(params["alpha"])
    window = {
        "lower": 1.0 / p - 1.0,
        "mu": mu,
        "upper": 2.0 / p - 2.0 - nu,
        "holds": True,  # ThetaSchedule construction enforces it
    }

    grid = (1.5, 2.0, 5.0, 20.0)
    field = DeltaField(GfmCopula(theta=1.0, r=r, s=s), marginal)
    g_rows = []
    max_disc = 0.0
    for u in grid:
        for v in grid:
            closed = g_closed_form(1.0, r, s, u, v)
            numeric = g_numeric(field, u, v)
            diff = abs(closed - numeric)
            max_disc = max(max_disc, diff)
            g_rows.append((u, v, closed, numeric, diff))

    verdict = condition_sum("nec12", p, schedule, r, s, marginal, n_terms)
    j_values, terms = condition_terms("nec12", p, schedule, r, s, marginal, n_terms)
    majorant = majorant_sum(p, mu, nu, r, s, n_terms)
    partial_cum = np.cumsum(terms)
    majorant_cum = majorant.c_const * np.cumsum(j_values.astype(float) ** majorant.exponent)
    bound_holds = bool(np.all(partial_cum <= majorant_cum + 1e-12))

    tail = tail_condition(p, marginal, n_terms)
    moment = marginal.abs_moment(p)

    result = {
        "p": p,
        "alpha": params["alpha"],
        "schedule": {"mu": mu, "nu": nu},
        "r": r,
        "s": s,
        "N": n_terms,
        "window": window,
        "g_oracle_max_discrepancy": max_disc,
        "series": _series_verdict_dict(verdict),
        "verdict": verdict.verdict,
        "majorant": asdict(majorant),
        "majorant_bound_holds_at_every_checkpoint": bound_holds,
        "tail_condition": _series_verdict_dict(tail),
        "abs_moment": moment,
        "dependence_label": "pairwise PQD",
    }
    tables = {
        "gtable": (["u", "v", "g_closed", "g_numeric", "abs_diff"], g_rows),
        "terms": (["j", "term"], zip(j_values.tolist(), terms.tolist())),
    }
    lines = [
        f"window holds: {window['lower']:.6g} < mu={mu} < {window['upper']:.6g}",
        f"G closed vs numeric max discrepancy: {max_disc:.3e}",
        f"series verdict: {verdict.verdict} (partial sum {verdict.partial_sum:.9g})",
        f"majorant bound holds at every checkpoint: {bound_holds}",
    ]
    return result, tables, lines


_HANDLERS = {
    "specfun eval": _run_specfun_eval,
    "g eval": _run_g_eval,
    "condition check": _run_condition_check,
    "bc ratio": _run_bc_ratio,
    "bc bracket": _run_bc_bracket,
    "simulate slln": _run_simulate_slln,
    "report example": _run_report_example,
}

_TAKES_WORKERS = {"simulate slln"}


def dispatch(config: RunConfig) -> int:
    """Execute a resolved run: compute, write artifacts, write the manifest."""
    handler = _HANDLERS.get(config.subcommand)
    if handler is None:
        raise ParameterError(f"unknown subcommand {config.subcommand!r}")
    if config.fmt not in ("json", "csv", "both"):
        raise ParameterError(f"output format must be json, csv or both, got {config.fmt!r}")
    if config.subcommand in _TAKES_WORKERS:
        result, tables, lines = handler(config.parameters, workers=max(1, config.workers))
    else:
        result, tables, lines = handler(config.parameters)

    config.outdir.mkdir(parents=True, exist_ok=True)
    outputs = []
    if config.fmt in ("json", "both"):
        _write_json(config.outdir / "result.json", result)
        outputs.append("result.json")
    if config.fmt in ("csv", "both"):
        for name, (header, rows) in tables.items():
            _write_csv(config.outdir / f"{name}.csv", header, rows)
            outputs.append(f"{name}.csv")
    manifest = {
        "tool": _TOOL,
        "version": __version__,
        "subcommand": config.subcommand,
        "format": config.fmt,
        "parameters": config.parameters,
        "outputs": sorted(outputs),
    }
    _write_json(config.outdir / "manifest.json", manifest)
    for line in lines:
        print(line)
    print(f"wrote {config.outdir}")
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--outdir", type=Path, default=None, help="output directory (default: $PQDSLLN_OUTDIR or ./runs/<subcommand>)")
    parser.add_argument("--format", choices=("json", "csv", "both"), default="both")
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--config", type=Path, default=None, help="flat key=value file supplying defaults; flags win")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=_TOOL, description=__doc__)
    parser.add_argument("--version", action="version", version=f"{_TOOL} {__version__}")
    top = parser.add_subparsers(dest="group", required=True)

    spec = top.add_parser("specfun", help="special-function debugging").add_subparsers(dest="action", required=True)
    p = spec.add_parser("eval")
    p.add_argument("--fn", choices=("gamma", "pochhammer", "2f1"), required=True)
    p.add_argument("--x", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--z", type=float)
    p.add_argument("--n", type=int)
    _add_common(p)

    g = top.add_parser("g", help="covariance functional").add_subparsers(dest="action", required=True)
    p = g.add_parser("eval")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--method", choices=("closed", "numeric", "factor", "all"), default="all")
    p.add_argument("--quad-tol", type=float, default=1e-9)
    p.add_argument("--max-panels", type=int, default=1 << 16)
    _add_common(p)

    cond = top.add_parser("condition", help="series conditions").add_subparsers(dest="action", required=True)
    p = cond.add_parser("check")
    p.add_argument("--kind", choices=("cs11", "nec12", "l1"), required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--N", type=int, default=2000)
    _add_common(p)

    bc = top.add_parser("bc", help="Borel-Cantelli diagnostics").add_subparsers(dest="action", required=True)
    p = bc.add_parser("ratio")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--theta-spec", default="zero")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--n-grid", default="log:10000:25")
    _add_common(p)
    p = bc.add_parser("bracket")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--theta-spec", default="zero")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    _add_common(p)

    sim = top.add_parser("simulate", help="seeded Monte Carlo").add_subparsers(dest="action", required=True)
    p = sim.add_parser("slln")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta-spec", default="zero")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--replicates", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--window", type=int, default=None)
    _add_common(p)

    rep = top.add_parser("report", help="end-to-end reports").add_subparsers(dest="action", required=True)
    p = rep.add_parser("example")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--N", type=int, default=2000)
    _add_common(p)

    p = top.add_parser("rerun", help="replay a manifest byte-for-byte")
    p.add_argument("--manifest", type=Path, required=True)
    _add_common(p)

    return parser


def _params_from_namespace(subcommand: str, ns: argparse.Namespace) -> dict:
    if subcommand == "specfun eval":
        keep = {"fn": ns.fn}
        for key in ("x", "a", "b", "c", "z", "n"):
            value = getattr(ns, key)
            if value is not None:
                keep[key] = value
        return keep
    if subcommand == "g eval":
        return {
            "theta": ns.theta,
            "r": ns.r,
            "s": ns.s,
            "u": ns.u,
            "v": ns.v,
            "method": ns.method,
            "quad_tol": ns.quad_tol,
            "max_panels": ns.max_panels,
        }
    if subcommand == "condition check":
        return {
            "kind": ns.kind,
            "p": ns.p,
            "mu": ns.mu,
            "nu": ns.nu,
            "r": ns.r,
            "s": ns.s,
            "alpha": ns.alpha,
            "N": ns.N,
        }
    if subcommand == "bc ratio":
        return {
            "p": ns.p,
            "alpha": ns.alpha,
            "theta_spec": _parse_theta_spec(ns.theta_spec),
            "r": ns.r,
            "s": ns.s,
            "n_grid": _parse_n_grid(ns.n_grid),
        }
    if subcommand == "bc bracket":
        return {
            "p": ns.p,
            "alpha": ns.alpha,
            "theta_spec": _parse_theta_spec(ns.theta_spec),
            "r": ns.r,
            "s": ns.s,
            "k": ns.k,
            "j": ns.j,
            "eps": ns.eps,
        }
    if subcommand == "simulate slln":
        params = {
            "p": ns.p,
            "alpha": ns.alpha,
            "theta_spec": _parse_theta_spec(ns.theta_spec),
            "n_max": ns.n_max,
            "replicates": ns.replicates,
            "seed": ns.seed,
        }
        if ns.c is not None:
            params["c"] = ns.c
        if ns.window is not None:
            params["window"] = ns.window
        return params
    if subcommand == "report example":
        return {
            "p": ns.p,
            "mu": ns.mu,
            "nu": ns.nu,
            "r": ns.r,
            "s": ns.s,
            "alpha": ns.alpha,
            "N": ns.N,
        }
    raise ParameterError(f"unknown subcommand {subcommand!r}")


def _default_outdir(subcommand: str) -> Path:
    base = Path(os.environ.get(OUTDIR_ENV, "runs"))
    return base / subcommand.replace(" ", "-")


def _structured_config_flags(key: str, value: str) -> list[str] | None:
    """Translate structured config spellings to primitive flags.

    Supported: marginal = pareto(alpha); copula = gfm(theta, r, s);
    schedule = power(mu, nu).
    """
    value = value.strip()
    if key == "marginal":
        if not (value.startswith("pareto(") and value.endswith(")")):
            raise ParameterError(f"marginal must be 'pareto(alpha)', got {value!r}")
        return ["--alpha", value[len("pareto(") : -1].strip()]
    if key == "copula":
        if not (value.startswith("gfm(") and value.endswith(")")):
            raise ParameterError(f"copula must be 'gfm(theta, r, s)', got {value!r}")
        parts = [part.strip() for part in value[len("gfm(") : -1].split(",")]
        if len(parts) != 3:
            raise ParameterError(f"copula must be 'gfm(theta, r, s)', got {value!r}")
        return ["--theta", parts[0], "--r", parts[1], "--s", parts[2]]
    if key == "schedule":
        if not (value.startswith("power(") and value.endswith(")")):
            raise ParameterError(f"schedule must be 'power(mu, nu)', got {value!r}")
        parts = [part.strip() for part in value[len("power(") : -1].split(",")]
        if len(parts) != 2:
            raise ParameterError(f"schedule must be 'power(mu, nu)', got {value!r}")
        return ["--mu", parts[0], "--nu", parts[1]]
    return None


def _apply_config_file(argv: list[str]) -> list[str]:
    """Expand --config FILE into flags placed before the user's flags.

    Argparse keeps the last occurrence of a flag, so explicit flags win.
    """
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ParameterError("--config requires a file path")
    path = Path(argv[idx + 1])
    rest = argv[:idx] + argv[idx + 2 :]
    if not path.exists():
        raise ParameterError(f"config file {path} does not exist")
    flags: list[str] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        structured = _structured_config_flags(key, value)
        if structured is not None:
            flags.extend(structured)
        else:
            flags.extend([f"--{key.replace('_', '-')}", value])
    n_sub = 0
    while n_sub < len(rest) and not rest[n_sub].startswith("-"):
        n_sub += 1
    return rest[:n_sub] + flags + rest[n_sub:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        argv = _apply_config_file(argv)
        parser = _build_parser()
        try:
            ns = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        if ns.group == "rerun":
            manifest = json.loads(ns.manifest.read_text())
            subcommand = manifest["subcommand"]
            params = manifest["parameters"]
            if "n_grid" in params:
                params["n_grid"] = [int(v) for v in params["n_grid"]]
            config = RunConfig(
                subcommand=subcommand,
                parameters=params,
                outdir=ns.outdir or _default_outdir(subcommand),
                fmt=manifest.get("format", "both"),
                workers=ns.workers,
            )
        else:
            subcommand = f"{ns.group} {ns.action}"
            config = RunConfig(
                subcommand=subcommand,
                parameters=_params_from_namespace(subcommand, ns),
                outdir=ns.outdir or _default_outdir(subcommand),
                fmt=ns.format,
                workers=ns.workers,
            )
        return dispatch(config)
    except (ParameterError, DomainError) as exc:
        print(f"{_TOOL}: error: [parameter] {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except NumericError as exc:
        print(f"{_TOOL}: error: [numeric] {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
