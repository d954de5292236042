"""Command-line front end: one subcommand per module plus ``selftest``.

Exit codes: 0 success, 1 a computation contract was violated (a residual
above tolerance or a library error), 2 usage error.  Numbers are written
with 17 significant digits; complex values appear as ``re``/``im`` pairs.
"""

from __future__ import annotations

import os

# thread caps must be in place before numpy loads its BLAS
_THREADS = os.environ.get("HALFLINE_THREADS")
if _THREADS:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(_var, _THREADS)

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import HalflineError

__all__ = ["RunConfig", "build_parser", "main", "format_number"]

SUBCOMMANDS = ("specfun", "firstorder", "resolvent-kernel", "hankel", "project", "scatter", "bound-state", "numrange", "ab", "selftest")


class UsageError(Exception):
    pass


# --- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Options shared by every subcommand."""

    grid: str = "default"  # preset name or path to a JSON grid file
    tol: float | None = None
    out: str | None = None
    format: str = "csv"
    extra: dict = field(default_factory=dict)  # subcommand-specific arguments

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise UsageError(f"--format must be csv or json, got {self.format!r}")
        if self.tol is not None and not (math.isfinite(self.tol) and self.tol > 0):
            raise UsageError(f"--tol must be a positive number, got {self.tol}")
        from .radial import GRID_PRESETS

        if self.grid not in GRID_PRESETS and not os.path.isfile(self.grid):
            raise UsageError(f"--grid: {self.grid!r} is neither a preset ({', '.join(sorted(GRID_PRESETS))}) nor a JSON file")

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise UsageError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**data)

    def load_grid(self):
        from .radial import GRID_PRESETS, grid_preset, load_grid_preset

        if self.grid in GRID_PRESETS:
            return grid_preset(self.grid)
        if os.path.isfile(self.grid):
            return load_grid_preset(self.grid)
        raise UsageError(f"--grid: {self.grid!r} is neither a preset ({', '.join(sorted(GRID_PRESETS))}) nor a JSON file")

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real or complex number like 0.3 or 0.3+0.4j, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\nusage: {self.format_usage().strip().removeprefix('usage: ')}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--grid", default="default", help="grid preset (default, coarse, fine) or JSON file with make_grid arguments")
    common.add_argument("--out", default=None, help="output path (stdout when omitted)")
    common.add_argument("--format", default=None, choices=("csv", "json"), help="output format")
    common.add_argument("--tol", type=float, default=None, help="override the contract tolerance checked by the subcommand")

    p = _Parser(prog="halfline", description="Bessel operators on the half-line.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="{" + ",".join(SUBCOMMANDS) + "}")
    sub.required = True

    s = sub.add_parser("specfun", parents=[common], help="Gamma and Bessel function values")
    s.add_argument("--func", required=True, choices=("gamma", "J", "I", "K", "H1", "H2"))
    s.add_argument("--m", type=_complex, default=0.0, help="order (ignored for gamma)")
    s.add_argument("--x", type=_float_list, required=True, help="comma-separated arguments")

    s = sub.add_parser("firstorder", parents=[common], help="resolvents and semigroups of A_alpha applied to x^p e^{-s x^2/2}")
    s.add_argument("--op", required=True, choices=("resolvent-max", "resolvent-min", "semigroup-max", "semigroup-min"))
    s.add_argument("--alpha", type=_complex, required=True)
    s.add_argument("--lam", type=_complex, default=None, help="spectral parameter for resolvents")
    s.add_argument("--t", type=float, default=None, help="time for semigroups")
    s.add_argument("--p", type=float, default=1.0)
    s.add_argument("--s", type=float, default=1.0)

    s = sub.add_parser("resolvent-kernel", parents=[common], help="R_m(-k^2; x, y) on a node sub-lattice")
    s.add_argument("--m", type=_complex, required=True)
    s.add_argument("--k", type=_complex, required=True)
    s.add_argument("--stride", type=int, default=64)

    s = sub.add_parser("hankel", parents=[common], help="F_m of x^p e^{-s x^2/2} (p defaults to m + 1/2)")
    s.add_argument("--m", type=float, required=True)
    s.add_argument("--p", type=float, default=None)
    s.add_argument("--s", type=float, default=1.0)

    s = sub.add_parser("project", parents=[common], help="kernel of the spectral projection 1_[a,b](H_m) on a sub-lattice")
    s.add_argument("--m", type=float, required=True)
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--b", type=float, required=True)
    s.add_argument("--stride", type=int, default=64)

    s = sub.add_parser("scatter", parents=[common], help="wave and scattering operators for the pair (m, k)")
    s.add_argument("--m", type=float, required=True)
    s.add_argument("--k", type=float, required=True)
    s.add_argument("--mode", default="multiplier", choices=("multiplier", "hankel", "finite-time"))

    s = sub.add_parser("bound-state", parents=[common], help="negative eigenvalue of H_m^theta")
    s.add_argument("--m", type=float, required=True)
    s.add_argument("--theta", type=float, required=True)

    s = sub.add_parser("numrange", parents=[common], help="sampled values of the form of H_m")
    s.add_argument("--m", type=_complex, required=True)
    s.add_argument("--n", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("ab", parents=[common], help="Aharonov-Bohm sector table")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--variant", default=None, choices=("FF", "FK", "KF", "KK"))
    s.add_argument("--l-range", type=int, nargs=2, default=(-20, 20), metavar=("LO", "HI"))

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    s.add_argument("--suite", default="quick", choices=("quick", "full"))
    return p


_DEFAULT_FORMAT = {"bound-state": "json", "ab": "json", "selftest": "json"}


def parse_config(argv: list[str]) -> tuple[str, RunConfig]:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    fmt = args.pop("format") or _DEFAULT_FORMAT.get(command, "csv")
    base = {"grid": args.pop("grid"), "tol": args.pop("tol"), "out": args.pop("out"), "format": fmt}
    return command, RunConfig.from_mapping({**base, "extra": args})


def config_to_argv(command: str, cfg: RunConfig) -> list[str]:
    """Inverse of parse_config, up to argument order."""
    argv = [command, "--grid", cfg.grid, "--format", cfg.format]
    if cfg.tol is not None:
        argv.append(f"--tol={cfg.tol!r}")
    if cfg.out is not None:
        argv += ["--out", cfg.out]
    for key, val in cfg.extra.items():
        if val is None:
            continue
        flag = "--lambda" if key == "lam" and command == "ab" else "--" + key.replace("_", "-")
        if isinstance(val, (list, tuple)):
            if key == "x":
                argv.append(f"{flag}={','.join(repr(v) for v in val)}")
            else:
                argv += [flag, *[str(v) for v in val]]
        elif isinstance(val, complex):
            argv.append(f"{flag}={repr(val).strip('()')}")
        else:
            argv.append(f"{flag}={val}")
    return argv


# --- output ------------------------------------------------------------------------


def format_number(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _json_text(obj) -> str:
    """JSON with every float written to 17 significant digits (non-finite as null)."""
    if isinstance(obj, dict):
        return "{" + ", ".join(json.dumps(str(k)) + ": " + _json_text(v) for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return json.dumps(bool(obj) if isinstance(obj, np.bool_) else obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _json_text({"re": obj.real, "im": obj.imag})
    v = float(obj)
    return format_number(v) if math.isfinite(v) else "null"


@dataclass
class Table:
    """Rows for CSV output; the JSON form is a list of records."""

    header: list[str]
    rows: list[list]

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([c if isinstance(c, str) else format_number(c) for c in row])
        return buf.getvalue()

    def records(self) -> list[dict]:
        return [dict(zip(self.header, row)) for row in self.rows]


def _complex_rows(keys, values) -> list[list]:
    return [[*k, complex(v).real, complex(v).imag] for k, v in zip(keys, values)]


def _render(result, cfg: RunConfig) -> str:
    """``result`` is a Table or a dict; dicts may carry a table under "rows"."""
    if isinstance(result, Table):
        return result.csv_text() if cfg.format == "csv" else _json_text(result.records()) + "\n"
    if cfg.format == "json":
        return _json_text(result) + "\n"
    # flatten a dict to quantity,re,im rows
    rows = []

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(obj, (list, tuple)):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        elif isinstance(obj, (bool, np.bool_)):
            rows.append([prefix, float(obj), 0.0])
        elif isinstance(obj, str):
            rows.append([prefix, obj, ""])
        elif obj is None:
            rows.append([prefix, "", ""])
        else:
            z = complex(obj)
            rows.append([prefix, z.real, z.imag])

    walk("", result)
    return Table(["quantity", "re", "im"], rows).csv_text()


# --- subcommands ---------------------------------------------------------------


class ContractViolation(Exception):
    pass


def _check(name: str, value: float, limit: float) -> None:
    if not (value <= limit):
        raise ContractViolation(f"{name} = {value:.3e} exceeds tolerance {limit:.3e}")


def cmd_specfun(cfg: RunConfig):
    from . import specfun

    e = cfg.extra
    x = np.asarray(e["x"], float)
    fn = e["func"]
    if fn == "gamma":
        poles = x[(x <= 0) & (x == np.round(x))]
        if len(poles):
            raise specfun.PoleError(f"Gamma has a pole at {poles[0]:g}")
        vals = specfun.cgamma(x.astype(complex))
    elif fn == "J":
        vals = specfun.jv(e["m"], x)
    elif fn == "I":
        vals = specfun.iv(e["m"], x)
    elif fn == "K":
        vals = specfun.kv(e["m"], x)
    else:
        vals = specfun.hankel(e["m"], 1 if fn == "H1" else 2, x)
    return Table(["x", "re", "im"], _complex_rows([(v,) for v in x], vals))


def cmd_firstorder(cfg: RunConfig):
    from . import firstorder
    from .radial import GridFunction, TestFamily

    e = cfg.extra
    grid = cfg.load_grid()
    x = grid.nodes
    f = GridFunction(grid, TestFamily.evaluate(e["p"], e["s"], x))
    op = e["op"]
    if op.startswith("resolvent"):
        if e["lam"] is None:
            raise UsageError("--lam is required for resolvents")
        fn = firstorder.resolvent_amax if op == "resolvent-max" else firstorder.resolvent_amin
        out = fn(e["alpha"], e["lam"], f)
        _check("resolvent residual", firstorder.aalpha_residual_norm(e["alpha"], out, e["lam"], f), cfg.tolerance(1e-6))
    else:
        if e["t"] is None:
            raise UsageError("--t is required for semigroups")
        fn = firstorder.semigroup_amax if op == "semigroup-max" else firstorder.semigroup_amin
        out = fn(e["alpha"], e["t"], f)
        _check("contraction excess", out.norm() - f.norm(), cfg.tolerance(1e-8))
    return Table(["x", "re", "im"], _complex_rows([(v,) for v in x], out.values))


def _stride(e) -> int:
    if e["stride"] < 1:
        raise UsageError("--stride must be a positive integer")
    return e["stride"]


def _lattice_table(nodes, entries, stride) -> Table:
    idx = np.arange(0, len(nodes), stride)
    rows = []
    for i in idx:
        for j in idx:
            z = complex(entries[i, j])
            rows.append([nodes[i], nodes[j], z.real, z.imag])
    return Table(["x", "y", "re", "im"], rows)


def cmd_resolvent_kernel(cfg: RunConfig):
    from .resolvent import resolvent_kernel_values

    e = cfg.extra
    nodes = cfg.load_grid().nodes[:: _stride(e)]
    vals = resolvent_kernel_values(e["m"], e["k"], nodes, nodes)
    return _lattice_table(nodes, vals, 1)


def cmd_hankel(cfg: RunConfig):
    from .radial import GridFunction
    from .spectral import hankel_matrix

    e = cfg.extra
    grid = cfg.load_grid()
    m = e["m"]
    p = m + 0.5 if e["p"] is None else e["p"]
    if not p > -0.5:
        raise UsageError("--p must exceed -1/2")
    tr = hankel_matrix(m, grid)
    f = GridFunction(grid, grid.nodes**p * np.exp(-0.5 * e["s"] * grid.nodes**2))
    fk = tr.forward(f)
    _check("involution defect", (tr.backward(fk) - f).norm() / f.norm(), cfg.tolerance(1e-6))
    return Table(["k", "re", "im"], _complex_rows([(v,) for v in tr.kgrid.nodes], fk.values))


def cmd_project(cfg: RunConfig):
    from .spectral import spectral_projection

    e = cfg.extra
    grid = cfg.load_grid()
    p = spectral_projection(e["m"], e["a"], e["b"], grid)
    return _lattice_table(grid.nodes, p.entries, _stride(e))


def cmd_scatter(cfg: RunConfig):
    from . import mellin, spectral
    from .selftest import scattering_setup

    e = cfg.extra
    m, k = e["m"], e["k"]
    if not (m > -1 and k > -1):
        raise UsageError("--m and --k must exceed -1")
    xg, kg = scattering_setup()
    tr_m = spectral.hankel_matrix(m, xg, kg)
    tr_k = tr_m if k == m else spectral.hankel_matrix(k, xg, kg)
    pair = (tr_m, tr_k)
    f = mellin.kspace_packet(k, 1.5, 0.3, tr_k)
    nf = f.norm()
    expected = complex(np.exp(1j * np.pi * (m - k)))
    if e["mode"] == "finite-time":
        ts = [1.0, 4.0, 16.0]
        res = mellin.finite_time_probe(m, k, f, ts, pair)
        out = {f"residual_t{t:g}": r for t, r in zip(ts, res)}
        return out
    w = mellin.wave_operator(m, k, 1, f, e["mode"], pair)
    s = mellin.scattering_matrix(m, k, f, pair)
    resid = mellin.scattering_residual(m, k, f, pair)
    out = {
        "S": s,
        "S_expected": expected,
        "S_error": abs(s - expected),
        "energy_residual": resid,
        "isometry_defect": abs(w.norm() - nf) / nf,
    }
    _check("|S - exp(i pi (m - k))|", out["S_error"], cfg.tolerance(1e-5))
    _check("energy-independence residual", resid, cfg.tolerance(1e-4))
    return out


def cmd_bound_state(cfg: RunConfig):
    from .extensions import boundary_function, boundary_wronskian, bound_state

    e = cfg.extra
    grid = cfg.load_grid()
    bs = bound_state(e["m"], e["theta"], grid)
    u = bs.eigenfunction
    lu = -grid.diff(u.values, 2) + (e["m"] ** 2 - 0.25) / grid.nodes**2 * u.values + bs.k**2 * u.values
    band = grid.band()
    eig = math.sqrt(float(np.dot(grid.weights[band], np.abs(lu[band]) ** 2)))
    wr = abs(boundary_wronskian(boundary_function(e["m"], e["theta"], grid), u))
    out = {
        "m": e["m"],
        "theta": e["theta"],
        "k": bs.k,
        "energy": bs.energy,
        "residuals": {"eigen_equation": eig, "boundary_wronskian": wr},
    }
    _check("eigen-equation residual", eig, cfg.tolerance(1e-5))
    _check("boundary Wronskian", wr, cfg.tolerance(1e-4))
    return out


def cmd_numrange(cfg: RunConfig):
    from .extensions import in_cone, sample_numerical_range

    e = cfg.extra
    if e["n"] < 1:
        raise UsageError("--n must be positive")
    z = sample_numerical_range(e["m"], e["n"], np.random.default_rng(e["seed"]))
    m = complex(e["m"])
    if m.imag >= 0 and m.real > 0:
        outside = int(np.count_nonzero(~in_cone(z, m, cfg.tolerance(1e-8))))
        if outside:
            raise ContractViolation(f"{outside} sampled values fall outside the sector [0, 2 arg m]")
    return Table(["re", "im"], [[v.real, v.imag] for v in z])


def cmd_ab(cfg: RunConfig):
    from . import aharonov

    e = cfg.extra
    lo, hi = e["l_range"]
    if lo > hi:
        raise UsageError("--l-range needs LO <= HI")
    lam = e["lam"]
    smap = aharonov.sector_map(lam, lo, hi)
    rows = smap.to_rows()
    out = {"lambda": lam, "deficiency_indices": list(aharonov.deficiency_indices(lam)), "deficient_sectors": smap.deficient_sectors()}
    if e["variant"] is not None:
        orders = dict(aharonov.variant_orders(lam, e["variant"], lo, hi))
        for r in rows:
            r["variant_order"] = orders[r["l"]]
        n = math.floor(lam)
        out["variant"] = e["variant"]
        out["holomorphy_strip"] = list(aharonov.holomorphy_strip(e["variant"], n))
    out["sectors"] = rows
    return out


def cmd_selftest(cfg: RunConfig):
    from .selftest import format_line, run_suite

    results = run_suite(cfg.extra["suite"])
    for r in results:
        print(format_line(r), file=sys.stderr)
    report = {
        "suite": cfg.extra["suite"],
        "passed": all(r.passed for r in results),
        "criteria": [
            {
                "number": r.number,
                "title": r.title,
                "passed": r.passed,
                "error": r.error,
                "seconds": r.seconds,
                "budget": r.budget,
                "metrics": r.metrics,
            }
            for r in results
        ],
    }
    if not report["passed"]:
        raise ContractViolation("acceptance suite failed", report)
    return report


COMMANDS = {
    "specfun": cmd_specfun,
    "firstorder": cmd_firstorder,
    "resolvent-kernel": cmd_resolvent_kernel,
    "hankel": cmd_hankel,
    "project": cmd_project,
    "scatter": cmd_scatter,
    "bound-state": cmd_bound_state,
    "numrange": cmd_numrange,
    "ab": cmd_ab,
    "selftest": cmd_selftest,
}


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out is None:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:  # reader closed early, e.g. piped into head
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, sys.stdout.fileno())
    else:
        with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        command, cfg = parse_config(argv)
    except UsageError as exc:
        print(f"halfline: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        result = COMMANDS[command](cfg)
    except UsageError as exc:
        print(f"halfline {command}: error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        if len(exc.args) > 1:
            _emit(_render(exc.args[1], cfg), cfg)
        print(f"halfline {command}: contract violated: {exc.args[0]}", file=sys.stderr)
        return 1
    except HalflineError as exc:
        print(f"halfline {command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(_render(result, cfg), cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
