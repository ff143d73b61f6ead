"""Command-line front end.

Subcommands wrap the library operations one-to-one; reports are emitted as
JSON (default), CSV, or a plain human-readable listing.  Exit status is 0 on
success, 2 on a precondition violation, 3 on numerical nonconvergence.

Float formatting is deterministic: JSON uses the shortest round-trip
representation, CSV uses 17 significant digits.  ``NO_COLOR`` disables the
(minimal) styling of the human format.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np

from . import __version__
from .bounds import closed_form_bound, essential_spectrum_threshold, neumann_upper_bound
from .comparison import comparison_residual, composed_tolerance, rigidity_check
from .eigensolve import first_dirichlet_eigen
from .errors import CdeigenError, NonconvergenceError, PreconditionError
from .modelspace import Density, check_cd_density
from .physics import CompactificationSpec, kk_mass_bound_optimal

_META_KEYS = ("command", "format", "out", "config")


# ------------------------------------------------------------- density files

def load_density_csv(path: str, interp_dim: float = 2.0) -> Density:
    """Read a sampled density from a ``theta,h`` CSV file.

    Malformed content is reported with the offending line number; theta must
    start at 0 and increase strictly, h must be nonnegative.
    """
    try:
        handle = open(path, "r", newline="")
    except OSError as exc:
        raise PreconditionError("io", f"cannot read density file {path}: {exc}")
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise PreconditionError("schema", f"{path}: empty file, expected header 'theta,h'")
        if [c.strip() for c in header] != ["theta", "h"]:
            raise PreconditionError(
                "schema",
                f"{path}: line 1: expected header 'theta,h', got {','.join(header)!r}",
            )
        thetas: list[float] = []
        values: list[float] = []
        for ln, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise PreconditionError(
                    "schema", f"{path}: line {ln}: expected 2 columns, got {len(row)}"
                )
            try:
                th, hv = float(row[0]), float(row[1])
            except ValueError:
                raise PreconditionError(
                    "schema", f"{path}: line {ln}: non-numeric row {','.join(row)!r}"
                )
            if not thetas and th != 0.0:
                raise PreconditionError(
                    "monotonicity", f"{path}: line {ln}: theta must start at 0, got {th}"
                )
            if thetas and th <= thetas[-1]:
                raise PreconditionError(
                    "monotonicity",
                    f"{path}: line {ln}: theta {th} does not increase over {thetas[-1]}",
                )
            if hv < 0:
                raise PreconditionError(
                    "negative-value", f"{path}: line {ln}: negative density value {hv}"
                )
            thetas.append(th)
            values.append(hv)
    if len(thetas) < 3:
        raise PreconditionError(
            "schema", f"{path}: need at least 3 data rows, got {len(thetas)}"
        )
    return Density.sampled(thetas, values, interp_dim=interp_dim)


def write_density_csv(h: Density, path: str) -> None:
    """Write a sampled density as ``theta,h`` rows, 17 significant digits."""
    if h.kind != "sampled":
        raise PreconditionError("domain", "only sampled densities can be written to CSV")
    with open(path, "w", newline="") as handle:
        handle.write("theta,h\n")
        for th, hv in zip(h.grid, h.values):
            handle.write(f"{th:.17g},{hv:.17g}\n")


# ---------------------------------------------------------------- run config

@dataclass
class RunConfig:
    """A parsed command: name, operation parameters, and output routing."""

    command: str
    params: dict
    output_format: str = "json"
    out: str | None = None


# ------------------------------------------------------------- computations
# Each compute function takes the parameter namespace and returns
# (result, diagnostics) as plain dicts with deterministic key order.

def _density_from_params(p, fallback_N: float) -> Density:
    has_csv = getattr(p, "csv", None) is not None
    has_model = getattr(p, "model_K", None) is not None
    if has_csv == has_model:
        raise PreconditionError(
            "domain", "provide exactly one density source: --csv PATH or --model-K FLOAT"
        )
    if has_csv:
        return load_density_csv(p.csv, interp_dim=p.interp_dim)
    model_N = p.model_N if p.model_N is not None else fallback_N
    return Density.model(p.model_K, model_N)


def _compute_model_eigen(p):
    sol = first_dirichlet_eigen(Density.model(p.K, p.N), p.r0, tol=p.tol, method=p.method)
    bound = closed_form_bound(p.K, p.N, p.r0)
    exact = bound.value if bound.exact else None
    result = {
        "lambda": sol.eigenvalue,
        "exact_reference": exact,
        "upper_bound": bound.value,
        "upper_bound_exact": bound.exact,
    }
    diagnostics = {
        "method": sol.method,
        "tol": p.tol,
        "refinement_history": [float(v) for v in sol.refinement_history],
        "flux_residual": sol.flux_residual,
    }
    return result, diagnostics


def _compute_check_density(p):
    h = load_density_csv(p.csv, interp_dim=p.interp_dim)
    interval = _parse_float_pair(p.interval, "interval") if p.interval else None
    rep = check_cd_density(
        h, p.K, p.N,
        resolution=_parse_int_pair(p.lattice, "lattice"),
        tolerance=p.tol,
        interval=interval,
    )
    result = {
        "satisfied": rep.satisfied,
        "worst_violation": rep.worst_violation,
        "witness_theta0": rep.witness[0],
        "witness_theta1": rep.witness[1],
        "witness_t": rep.witness[2],
    }
    diagnostics = {
        "triples_checked": rep.triples_checked,
        "tolerance": rep.tolerance,
        "nodes": int(h.grid.size),
    }
    return result, diagnostics


def _compute_compare(p):
    h = _density_from_params(p, p.N)
    rep = comparison_residual(
        h, p.K, p.N, p.r0, p.theta,
        solver_tol=p.solver_tol, quad_tol=p.quad_tol,
        check_density=not p.no_density_check,
    )
    result = {
        "theta": rep.theta,
        "lhs": rep.lhs,
        "rhs": rep.rhs,
        "gap": rep.gap,
        "relative_gap": rep.relative_gap,
    }
    diagnostics = {
        "composed_tolerance": composed_tolerance(p.solver_tol, p.quad_tol),
        "solver_tol": p.solver_tol,
        "quad_tol": p.quad_tol,
        "density_checked": not p.no_density_check,
    }
    return result, diagnostics


def _compute_rigidity(p):
    h = _density_from_params(p, p.N)
    verdict = rigidity_check(
        h, p.K, p.N, p.r0, p.tol,
        solver_tol=p.solver_tol, quad_tol=p.quad_tol,
        check_density=not p.no_density_check,
    )
    result = {
        "rigid": verdict.rigid,
        "fitted_c": verdict.fitted_c,
        "max_relative_density_deviation": verdict.max_relative_density_deviation,
        "relative_gap": verdict.relative_gap,
    }
    diagnostics = {
        "tol": p.tol,
        "solver_tol": p.solver_tol,
        "quad_tol": p.quad_tol,
    }
    return result, diagnostics


def _compute_neumann_bound(p):
    value = neumann_upper_bound(p.K, p.N, p.diam, p.j, method=p.method, solver_tol=p.tol)
    result = {
        "bound": value,
        "j": p.j,
        "r0": p.diam / (2.0 * p.j),
    }
    diagnostics = {"method": p.method, "tol": p.tol}
    return result, diagnostics


def _compute_ess_spectrum(p):
    return {"threshold": essential_spectrum_threshold(p.K, p.N)}, {}


def _compute_kk_bound(p):
    spec = CompactificationSpec(D=p.D, d=p.d, Lambda=p.Lambda, sigma_w=p.sigma, diam=p.diam)
    res = kk_mass_bound_optimal(
        spec, p.j, method=p.method, grid_points=p.grid_points,
        golden_tol=p.golden_tol, want_profile=p.profile, solver_tol=p.tol,
    )
    result = {
        "j": res.j,
        "N_star": res.N_star,
        "K_star": res.K_star,
        "bound": res.bound,
        "bracketed": res.bracketed,
        "note": res.note,
    }
    if res.profile is not None:
        result["profile"] = [
            [n_val, b if math.isfinite(b) else None] for n_val, b in res.profile
        ]
    diagnostics = {
        "method": res.method,
        "grid_points": p.grid_points,
        "golden_tol": p.golden_tol,
    }
    return result, diagnostics


_COMPUTE = {
    "model-eigen": _compute_model_eigen,
    "check-density": _compute_check_density,
    "compare": _compute_compare,
    "rigidity": _compute_rigidity,
    "neumann-bound": _compute_neumann_bound,
    "ess-spectrum": _compute_ess_spectrum,
    "kk-bound": _compute_kk_bound,
}


# ------------------------------------------------------------------ parsers

def _parse_float_pair(text: str, name: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise PreconditionError("domain", f"--{name} expects 'a,b', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise PreconditionError("domain", f"--{name} expects numbers, got {text!r}")


def _parse_int_pair(text: str, name: str) -> tuple[int, int]:
    a, b = _parse_float_pair(text, name)
    return int(a), int(b)


def _add_common(p: argparse.ArgumentParser, default_format: str = "json") -> None:
    p.add_argument("--format", choices=("json", "csv", "human"), default=default_format,
                   help="report format (default: %(default)s)")
    p.add_argument("--out", default=None, metavar="PATH",
                   help="write the report to PATH instead of standard output")
    p.add_argument("--config", default=None, metavar="PATH",
                   help="flat key=value file supplying defaults; flags override")


def _add_density_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--csv", default=None, metavar="PATH",
                   help="sampled density file with header theta,h")
    p.add_argument("--model-K", dest="model_K", type=float, default=None,
                   help="use the model density with this curvature instead of a file")
    p.add_argument("--model-N", dest="model_N", type=float, default=None,
                   help="dimension for --model-K (defaults to --N)")
    p.add_argument("--interp-dim", dest="interp_dim", type=float, default=2.0,
                   help="interpolation exponent parameter for sampled densities")


def _command_parsers() -> dict[str, argparse.ArgumentParser]:
    table: dict[str, argparse.ArgumentParser] = {}

    p = argparse.ArgumentParser(prog="cdeigen model-eigen", add_help=False)
    p.add_argument("--K", type=float, required=True, help="curvature parameter")
    p.add_argument("--N", type=float, required=True, help="dimension parameter, > 1")
    p.add_argument("--r0", type=float, required=True, help="Dirichlet radius")
    p.add_argument("--tol", type=float, default=1e-8, help="solver relative tolerance")
    p.add_argument("--method", choices=("matrix", "shooting"), default="matrix")
    table["model-eigen"] = p

    p = argparse.ArgumentParser(prog="cdeigen check-density", add_help=False)
    p.add_argument("--csv", required=True, metavar="PATH")
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--lattice", default="64,17", help="scan resolution n_theta,n_t")
    p.add_argument("--tol", type=float, default=1e-9, help="violation tolerance")
    p.add_argument("--interval", default=None, help="scan subinterval a,b")
    p.add_argument("--interp-dim", dest="interp_dim", type=float, default=2.0)
    table["check-density"] = p

    p = argparse.ArgumentParser(prog="cdeigen compare", add_help=False)
    _add_density_source(p)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--solver-tol", dest="solver_tol", type=float, default=1e-8)
    p.add_argument("--quad-tol", dest="quad_tol", type=float, default=1e-10)
    p.add_argument("--no-density-check", dest="no_density_check", action="store_true",
                   help="skip the CD lattice scan of the input density")
    table["compare"] = p

    p = argparse.ArgumentParser(prog="cdeigen rigidity", add_help=False)
    _add_density_source(p)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-6, help="rigidity tolerance")
    p.add_argument("--solver-tol", dest="solver_tol", type=float, default=1e-8)
    p.add_argument("--quad-tol", dest="quad_tol", type=float, default=1e-10)
    p.add_argument("--no-density-check", dest="no_density_check", action="store_true")
    table["rigidity"] = p

    p = argparse.ArgumentParser(prog="cdeigen neumann-bound", add_help=False)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--diam", type=float, required=True, help="diameter of the space")
    p.add_argument("--j", type=int, default=1, help="Neumann mode index")
    p.add_argument("--method", choices=("closed_form", "solver"), default="closed_form")
    p.add_argument("--tol", type=float, default=1e-8, help="solver tolerance")
    table["neumann-bound"] = p

    p = argparse.ArgumentParser(prog="cdeigen ess-spectrum", add_help=False)
    p.add_argument("--K", type=float, required=True, help="curvature, must be <= 0")
    p.add_argument("--N", type=float, required=True, help="dimension, must be >= 3")
    table["ess-spectrum"] = p

    p = argparse.ArgumentParser(prog="cdeigen kk-bound", add_help=False)
    p.add_argument("--D", type=int, required=True, help="total dimension")
    p.add_argument("--d", type=int, required=True, help="spacetime dimension")
    p.add_argument("--Lambda", type=float, required=True, help="cosmological constant")
    p.add_argument("--sigma", type=float, required=True, help="warp gradient bound")
    p.add_argument("--diam", type=float, required=True, help="internal diameter")
    p.add_argument("--j", type=int, default=1, help="KK mode index")
    p.add_argument("--method", choices=("closed_form", "solver"), default="closed_form")
    p.add_argument("--grid-points", dest="grid_points", type=int, default=160)
    p.add_argument("--golden-tol", dest="golden_tol", type=float, default=1e-6)
    p.add_argument("--profile", action="store_true", help="include the scanned profile")
    p.add_argument("--tol", type=float, default=1e-8, help="solver tolerance")
    table["kk-bound"] = p

    for sub in table.values():
        _add_common(sub)
    return table


_COMMAND_HELP = {
    "model-eigen": "first Dirichlet eigenvalue of the (K, N) model weight",
    "check-density": "scan a sampled density for CD(K,N) violations",
    "compare": "eigenvalue comparison integrals for a density at one point",
    "rigidity": "test whether a density is a multiple of the model weight",
    "neumann-bound": "upper bound for the j-th Neumann eigenvalue",
    "ess-spectrum": "essential spectrum threshold for K <= 0, N >= 3",
    "kk-bound": "Kaluza-Klein mass bound, optionally optimized over N",
}


def _top_parser(table: dict[str, argparse.ArgumentParser]) -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="cdeigen",
        description="Eigenvalue comparison on weighted intervals: model "
                    "eigenvalues, CD(K,N) density checks, closed-form bounds, "
                    "and Kaluza-Klein mass bounds.",
    )
    top.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = top.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, parser in table.items():
        sub.add_parser(name, parents=[parser], help=_COMMAND_HELP[name])
    sweep = sub.add_parser("sweep", help="run one command over a parameter range")
    _configure_sweep_parser(sweep)
    return top


def _configure_sweep_parser(p: argparse.ArgumentParser) -> None:
    p.add_argument("target", help="command to sweep")
    p.add_argument("--over", required=True, metavar="NAME",
                   help="name of the numeric flag to vary")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--workers", type=int, default=4)
    _add_common(p, default_format="csv")


# ------------------------------------------------------------- config files

def _extract_config(args: list[str]) -> tuple[str | None, list[str]]:
    path = None
    rest: list[str] = []
    i = 0
    while i < len(args):
        item = args[i]
        if item == "--config":
            if i + 1 >= len(args):
                raise PreconditionError("config", "--config requires a path")
            path = args[i + 1]
            i += 2
        elif item.startswith("--config="):
            path = item.split("=", 1)[1]
            i += 1
        else:
            rest.append(item)
            i += 1
    return path, rest


def _read_config_pairs(path: str) -> list[tuple[str, str]]:
    try:
        with open(path, "r") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise PreconditionError("io", f"cannot read config file {path}: {exc}")
    pairs = []
    for ln, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise PreconditionError(
                "config", f"{path}: line {ln}: expected key=value, got {raw!r}"
            )
        key, _, value = text.partition("=")
        pairs.append((key.strip(), value.strip()))
    return pairs


def _find_action(parser: argparse.ArgumentParser, key: str):
    for action in parser._actions:
        if key == action.dest or f"--{key}" in action.option_strings:
            return action
    return None


def _config_flags(pairs: list[tuple[str, str]], parser: argparse.ArgumentParser,
                  path: str) -> list[str]:
    flags: list[str] = []
    for key, value in pairs:
        action = _find_action(parser, key)
        if action is None or not action.option_strings:
            raise PreconditionError("config", f"{path}: unknown config key {key!r}")
        option = action.option_strings[-1]
        if action.nargs == 0:
            low = value.lower()
            if low in ("true", "1", "yes", "on"):
                flags.append(option)
            elif low in ("false", "0", "no", "off"):
                pass
            else:
                raise PreconditionError(
                    "config", f"{path}: key {key!r} expects a boolean, got {value!r}"
                )
        else:
            flags.extend([option, value])
    return flags


# ---------------------------------------------------------------- rendering

def _plain(value):
    """JSON-safe scalar: non-finite floats become None."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _jsonsafe(obj):
    if isinstance(obj, dict):
        return {k: _jsonsafe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonsafe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    return _plain(obj)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _scalar_items(d: dict):
    for k, v in d.items():
        if isinstance(v, (bool, int, float, str)) or v is None:
            yield k, v


def _styler():
    if os.environ.get("NO_COLOR") is not None or not sys.stdout.isatty():
        return lambda s: s
    return lambda s: f"\x1b[1m{s}\x1b[0m"


def _render_envelope(envelope: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonsafe(envelope), indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        items = list(_scalar_items(envelope["result"]))
        writer.writerow([k for k, _ in items])
        writer.writerow([_csv_cell(v) for _, v in items])
        return buf.getvalue()
    bold = _styler()
    lines = [f"{bold('command')}: {envelope['command']}"]
    for section in ("inputs", "result", "diagnostics"):
        body = envelope.get(section)
        if not body:
            continue
        lines.append(bold(section))
        for k, v in body.items():
            if isinstance(v, float):
                lines.append(f"  {k} = {v!r}")
            else:
                lines.append(f"  {k} = {v}")
    lines.append(f"{bold('version')}: {envelope['version']}")
    return "\n".join(lines) + "\n"


def _render_rows(param: str, columns: list[str], rows: list[dict], fmt: str,
                 envelope_base: dict) -> str:
    header = [param] + columns + ["error"]
    if fmt == "json":
        envelope = dict(envelope_base)
        envelope["result"] = {"rows": _jsonsafe(rows)}
        envelope["version"] = __version__
        return json.dumps(envelope, indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        if not rows:
            return ""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row.get(k)) for k in header])
        return buf.getvalue()
    bold = _styler()
    if not rows:
        return bold("(empty sweep)") + "\n"
    widths = {k: max(len(k), max(len(_csv_cell(r.get(k))) for r in rows)) for k in header}
    lines = ["  ".join(bold(k.ljust(widths[k])) for k in header)]
    for row in rows:
        lines.append("  ".join(_csv_cell(row.get(k)).ljust(widths[k]) for k in header))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _print_error(exc: CdeigenError) -> None:
    payload = {"error": {"code": exc.code, "message": str(exc)}}
    sys.stderr.write(json.dumps(payload) + "\n")


# ---------------------------------------------------------------- execution

def run_command(config: RunConfig) -> int:
    """Dispatch a parsed RunConfig and write its report; returns exit status."""
    compute = _COMPUTE.get(config.command)
    if compute is None:
        raise PreconditionError("domain", f"unknown command {config.command!r}")
    params = SimpleNamespace(**config.params)
    result, diagnostics = compute(params)
    envelope = {
        "command": config.command,
        "inputs": _jsonsafe(config.params),
        "result": result,
        "diagnostics": diagnostics,
        "version": __version__,
    }
    _emit(_render_envelope(envelope, config.output_format), config.out)
    return 0


def _namespace_params(ns: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(ns).items() if k not in _META_KEYS}


def _run_single(args: list[str]) -> int:
    table = _command_parsers()
    if args and args[0] in table:
        cfg_path, rest = _extract_config(args[1:])
        if cfg_path is not None:
            pairs = _read_config_pairs(cfg_path)
            args = [args[0]] + _config_flags(pairs, table[args[0]], cfg_path) + rest
    top = _top_parser(table)
    ns = top.parse_args(args)
    config = RunConfig(
        command=ns.command,
        params=_namespace_params(ns),
        output_format=ns.format,
        out=ns.out,
    )
    return run_command(config)


def _sweep_row(target: str, params: dict) -> tuple[dict | None, str]:
    try:
        result, _ = _COMPUTE[target](SimpleNamespace(**params))
        return result, ""
    except CdeigenError as exc:
        return None, f"{exc.code}: {exc}"


def _run_sweep(args: list[str]) -> int:
    sweep_parser = argparse.ArgumentParser(prog="cdeigen sweep")
    _configure_sweep_parser(sweep_parser)
    ns, passthrough = sweep_parser.parse_known_args(args)

    table = _command_parsers()
    target = ns.target
    if target not in table:
        raise PreconditionError(
            "domain", f"cannot sweep {target!r}; choose one of {sorted(table)}"
        )
    tparser = table[target]

    cfg_path, passthrough = _extract_config(passthrough)
    if ns.config is not None:
        cfg_path = ns.config
    if cfg_path is not None:
        pairs = _read_config_pairs(cfg_path)
        passthrough = _config_flags(pairs, tparser, cfg_path) + passthrough

    action = _find_action(tparser, ns.over)
    if action is None or not action.option_strings:
        raise PreconditionError("domain", f"{target} has no flag --{ns.over}")
    if action.type not in (float, int):
        raise PreconditionError("domain", f"--{ns.over} is not a numeric flag")
    if ns.count < 0:
        raise PreconditionError("domain", f"count must be nonnegative, got {ns.count}")
    option = action.option_strings[-1]

    values = np.linspace(ns.start, ns.stop, ns.count) if ns.count > 0 else np.array([])
    param_sets = []
    for v in values:
        v = int(v) if action.type is int else float(v)
        row_ns = tparser.parse_args(passthrough + [option, repr(v)])
        param_sets.append((v, _namespace_params(row_ns)))

    rows: list[dict] = []
    columns: list[str] = []
    if param_sets:
        workers = max(1, min(ns.workers, len(param_sets)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_row, target, ps) for _, ps in param_sets]
            outcomes = [f.result() for f in futures]
        for (v, _), (result, err) in zip(param_sets, outcomes):
            row = {ns.over: v}
            if result is not None:
                for k, val in _scalar_items(result):
                    row[k] = val
                    if k not in columns:
                        columns.append(k)
            row["error"] = err
            rows.append(row)

    base = {
        "command": "sweep",
        "inputs": {
            "target": target,
            "over": ns.over,
            "start": ns.start,
            "stop": ns.stop,
            "count": ns.count,
            "args": list(passthrough),
        },
        "diagnostics": {"workers": ns.workers},
    }
    _emit(_render_rows(ns.over, columns, rows, ns.format, base), ns.out)
    return 0


def main(argv=None) -> int:
    """Entry point; returns the process exit status instead of raising."""
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        if args and args[0] == "sweep":
            return _run_sweep(args[1:])
        return _run_single(args)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2
    except PreconditionError as exc:
        _print_error(exc)
        return 2
    except NonconvergenceError as exc:
        _print_error(exc)
        return 3


def console_main() -> None:
    sys.exit(main(None))


if __name__ == "__main__":
    console_main()
