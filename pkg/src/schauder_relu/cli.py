"""Command-line entry point.

Exit codes: 0 success, 2 expression parse error, 3 evaluation error,
4 bad arguments, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import approximation, figures
from .basis import BasisKind, SoftplusConfig
from .coefficients import analyze
from .evaluator import frame_identity_check, perturbation_gaps
from .expr import DomainError, Func1D, ParseError
from .multivariate import MAX_FIT_GRID, MAX_FIT_PLANES, fit_pyramid

EXIT_OK, EXIT_PARSE, EXIT_EVAL, EXIT_ARGS, EXIT_IO = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    fn: str | None = None
    level: int = 3
    lipschitz: float | None = None
    pmin: int = 0
    pmax: int = 8
    scheme: str = "peaks"
    K: float = 1.0
    N: int = 64
    seed: int = 42
    grid: int = 101
    kinds: str = "Hat,ReluPair"
    out: str | None = None
    outdir: str = "figures"
    format: str = "csv"


def _num(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v == "" or v is None:
        return ""
    return format(float(v), ".17g")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([c if isinstance(c, str) else _num(c) for c in row])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        Path(out).write_text(text, newline="")
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc


def _target(cfg: RunConfig) -> Func1D:
    if not cfg.fn:
        raise UsageError("--fn is required")
    return Func1D.from_source(cfg.fn, cfg.lipschitz)


def cmd_coeffs(cfg: RunConfig) -> int:
    if cfg.level < 0 or cfg.level > 20:
        raise UsageError("--level must be in [0, 20]")
    e = analyze(_target(cfg), cfg.level)
    if cfg.format == "json":
        _emit(e.to_json(), cfg.out)
    else:
        rows = [("alpha0", "", e.alpha0), ("alpha1", "", e.alpha1)]
        rows += [(n, k, c) for n, lvl in enumerate(e.levels) for k, c in enumerate(lvl)]
        _emit(_csv_text(["n", "k", "alpha"], rows), cfg.out)
    return EXIT_OK


def cmd_approximate(cfg: RunConfig) -> int:
    if cfg.lipschitz is None:
        raise UsageError("--lipschitz is required")
    if not 0 <= cfg.pmin <= cfg.pmax <= approximation.MAX_SWEEP_LEVEL:
        raise UsageError(f"need 0 <= --pmin <= --pmax <= {approximation.MAX_SWEEP_LEVEL}")
    if cfg.scheme not in approximation.SCHEMES:
        raise UsageError(f"--scheme must be one of {approximation.SCHEMES}")
    report = approximation.convergence_sweep(_target(cfg), cfg.pmax, cfg.pmin, cfg.scheme)
    if cfg.out is None or cfg.out == "-":
        _emit(report.to_csv(), None)
        sys.stderr.write(report.to_json() + "\n")
    else:
        _emit(report.to_csv(), cfg.out)
        _emit(report.to_json(), str(Path(cfg.out).with_suffix(".json")))
    return EXIT_OK


def cmd_perturb(cfg: RunConfig) -> int:
    if not cfg.K > 0:
        raise UsageError("--K must be positive")
    if not 0 <= cfg.level <= 12:
        raise UsageError("--level must be in [0, 12]")
    sp = SoftplusConfig(cfg.K)
    rows = perturbation_gaps(sp, cfg.level)
    table = [(idx.n, idx.k, a, gap, bound) for idx, a, gap, bound in rows]
    delta = sum(gap for _, _, gap, _ in rows)
    table.append(("total", "", "", delta, 1.0 / (2.0 * cfg.K)))
    _emit(_csv_text(["n", "k", "a", "gap", "bound"], table), cfg.out)
    return EXIT_OK


def cmd_figures(cfg: RunConfig) -> int:
    outdir = Path(cfg.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {outdir}: {exc}") from exc
    for name, (header, rows) in figures.all_panels().items():
        _emit(_csv_text(header, rows), str(outdir / f"{name}.csv"))
    return EXIT_OK


def cmd_pyramid_fit(cfg: RunConfig) -> int:
    if not 0 <= cfg.N <= MAX_FIT_PLANES:
        raise UsageError(f"--N must be in [0, {MAX_FIT_PLANES}]")
    if not 2 <= cfg.grid <= MAX_FIT_GRID:
        raise UsageError(f"--grid must be in [2, {MAX_FIT_GRID}]")
    report = fit_pyramid(cfg.N, cfg.seed, cfg.grid)
    if cfg.out is not None and cfg.out != "-":
        _emit(report.to_json(indent=2), cfg.out)
    print(format(report.residual_sup, ".17g"))
    return EXIT_OK


def cmd_frame_check(cfg: RunConfig) -> int:
    try:
        kinds = [BasisKind.parse(k.strip()) for k in cfg.kinds.split(",")]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if len(kinds) != 2 or BasisKind.COUNTEREXAMPLE_G in kinds:
        raise UsageError("--kinds takes two series frames, e.g. Hat,ReluPair")
    if not 0 <= cfg.level <= 12:
        raise UsageError("--level must be in [0, 12]")
    e = analyze(_target(cfg), cfg.level)
    check = frame_identity_check(e, kinds, SoftplusConfig(cfg.K))
    result = {
        "kinds": [k.value for k in check.kinds],
        "level": check.level,
        "max_abs_diff": check.max_abs_diff,
        "bound": check.bound,
        "within_bound": check.within_bound,
    }
    _emit(json.dumps(result), cfg.out)
    return EXIT_OK


COMMANDS = {
    "coeffs": cmd_coeffs,
    "approximate": cmd_approximate,
    "perturb": cmd_perturb,
    "figures": cmd_figures,
    "pyramid-fit": cmd_pyramid_fit,
    "frame-check": cmd_frame_check,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schauder", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of flag defaults")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    s = argparse.SUPPRESS

    def add(name, help_text, *flags):
        p = sub.add_parser(name, help=help_text, argument_default=s)
        p.add_argument("--config", help="JSON file of flag defaults")
        p.add_argument("--out", help="output file (default stdout)")
        for flag, kw in flags:
            p.add_argument(flag, **kw)
        return p

    fn = ("--fn", dict(help="target expression in x, e.g. 'x*(1-x)'"))
    level = ("--level", dict(type=int))
    K = ("--K", dict(type=float, help="basis constant K (default 1)"))
    add("coeffs", "Schauder coefficients as JSON or CSV", fn, level,
        ("--format", dict(choices=["csv", "json"])))
    add("approximate", "interpolation error sweep for a Lipschitz target", fn,
        ("--lipschitz", dict(type=float)), ("--pmin", dict(type=int)), ("--pmax", dict(type=int)),
        ("--scheme", dict(choices=list(approximation.SCHEMES))))
    add("perturb", "per-element Softplus perturbation gaps and total budget", K, level)
    add("figures", "CSV data for the reference plots", ("--outdir", dict()))
    add("pyramid-fit", "random-feature least-squares fit of the pyramid",
        ("--N", dict(type=int)), ("--seed", dict(type=int)), ("--grid", dict(type=int)))
    add("frame-check", "compare partial sums of two frames", fn, level, K,
        ("--kinds", dict(help="two frames, e.g. Hat,SigmoidalDiff")))
    return parser


def _config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    merged = {}
    if ns.get("config"):
        try:
            merged.update(json.loads(Path(ns["config"]).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns['config']}: {exc}") from exc
    merged.update({k: v for k, v in ns.items() if k != "config" and v is not None})
    known = {f.name for f in fields(RunConfig)}
    unknown = set(merged) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    if merged.get("subcommand") == "coeffs" and "format" not in merged:
        merged["format"] = "json"
    return RunConfig(**merged)


def main(argv=None) -> int:
    try:
        cfg = _config(argv)
        return COMMANDS[cfg.subcommand](cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except (UsageError, ValueError, TypeError) as exc:
        print(f"bad arguments: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
