"""Command-line front end: single solves, convergence tables, validation.

Exit status: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import ConvergenceReport, convergence_study, monotonicity_preconditions
from .errors import SolverError
from .problem import Problem, builtin_example, validate_problem
from .scheme import SolutionGrid, solve

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3

DEFAULT_EPSILONS = [math.ldexp(1.0, -k) for k in (8, 10, 12, 14, 16, 18, 20)]
DEFAULT_NS = [64, 128, 256, 512, 1024]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    mode: str = "study"
    example_id: int = 1
    epsilons: list = field(default_factory=lambda: list(DEFAULT_EPSILONS))
    Ns: list = field(default_factory=lambda: list(DEFAULT_NS))
    output_dir: Path = Path(".")
    formats: list = field(default_factory=lambda: ["csv", "json"])
    emit_grid: bool = False
    sharper_tau: bool = False
    literal_rhs: bool = False
    jobs: int = 1


_POW = re.compile(r"^\s*2\s*(?:\^|\*\*)\s*\(?\s*([+-]?\d+)\s*\)?\s*$")


def parse_epsilon(text: str) -> float:
    """``"2^-8"`` (or ``2**-8``) becomes the exact power of two; plain decimals pass through."""
    m = _POW.match(text)
    if m:
        return math.ldexp(1.0, int(m.group(1)))
    try:
        val = float(text)
    except ValueError:
        raise UsageError(f"--epsilon: cannot parse {text!r}") from None
    if not 0.0 < val <= 1.0:
        raise UsageError(f"--epsilon: {text!r} is outside (0, 1]")
    return val


def epsilon_label(eps: float) -> str:
    mant, exp = math.frexp(eps)
    if mant == 0.5:
        return f"2^{exp - 1}"
    return repr(eps)


def _split(values: Sequence[str]) -> list[str]:
    out = []
    for v in values:
        out.extend(s for s in re.split(r"[,\s]+", v.strip()) if s)
    return out


def _parse_N(text: str) -> int:
    try:
        N = int(text)
    except ValueError:
        raise UsageError(f"--N: {text!r} is not an integer") from None
    if N < 8 or N % 4:
        raise UsageError(f"--N: {N} must be a multiple of 4 and at least 8")
    return N


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hybrid-shishkin", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--mode", choices=["solve", "study", "validate"])
    p.add_argument("--example", type=int, choices=[1, 2])
    p.add_argument("--epsilon", action="append", help="repeatable; accepts 2^-k")
    p.add_argument("--N", action="append", help="repeatable; multiple of 4, >= 8")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", action="append", help="csv and/or json (repeatable)")
    p.add_argument("--emit-grid", action="store_true", default=None)
    p.add_argument("--jobs", type=int)
    p.add_argument("--sharper-tau", action="store_true", default=None)
    p.add_argument("--literal-rhs", action="store_true", default=None)
    return p


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def _read_config_text(text: str) -> dict:
    vals = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = line.split("=", 1)
        elif ":" in line:
            key, value = line.split(":", 1)
        else:
            raise UsageError(f"config line {lineno}: expected key = value, got {raw!r}")
        key = key.strip().lstrip("-").replace("-", "_").lower()
        vals[key] = value.strip()
    return vals


def parse_config(argv: Optional[Sequence[str]] = None, config_text: Optional[str] = None) -> RunConfig:
    """Build a RunConfig from command-line flags and/or config-file text."""
    args = _build_parser().parse_args(list(argv) if argv is not None else None)
    file_vals: dict = {}
    if args.config:
        try:
            config_text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"--config: {exc}") from None
    if config_text:
        file_vals = _read_config_text(config_text)
    known = {"mode", "example", "epsilon", "n", "out", "format", "emit_grid", "jobs", "sharper_tau", "literal_rhs"}
    unknown = set(file_vals) - known
    if unknown:
        raise UsageError(f"config: unknown key(s) {', '.join(sorted(unknown))}")

    def pick(flag_value, key):
        return flag_value if flag_value is not None else file_vals.get(key)

    def as_bool(value, key):
        if value is None or isinstance(value, bool):
            return bool(value)
        try:
            return _BOOL[str(value).lower()]
        except KeyError:
            raise UsageError(f"config: {key} expects a boolean, got {value!r}") from None

    cfg = RunConfig()
    mode = pick(args.mode, "mode")
    if mode is not None:
        if mode not in ("solve", "study", "validate"):
            raise UsageError(f"--mode: invalid choice {mode!r}")
        cfg.mode = mode
    example = pick(args.example, "example")
    if example is not None:
        try:
            cfg.example_id = int(example)
        except ValueError:
            raise UsageError(f"--example: {example!r} is not 1 or 2") from None
        if cfg.example_id not in (1, 2):
            raise UsageError(f"--example: {example!r} is not 1 or 2")
    eps = args.epsilon if args.epsilon is not None else ([file_vals["epsilon"]] if "epsilon" in file_vals else None)
    if eps is not None:
        cfg.epsilons = [parse_epsilon(e) for e in _split(eps)]
    Ns = args.N if args.N is not None else ([file_vals["n"]] if "n" in file_vals else None)
    if Ns is not None:
        cfg.Ns = sorted(_parse_N(n) for n in _split(Ns))
    out = pick(args.out, "out")
    if out is not None:
        cfg.output_dir = Path(out)
    fmts = args.format if args.format is not None else ([file_vals["format"]] if "format" in file_vals else None)
    if fmts is not None:
        cfg.formats = [f.lower() for f in _split(fmts)]
        bad = set(cfg.formats) - {"csv", "json"}
        if bad:
            raise UsageError(f"--format: unsupported {', '.join(sorted(bad))}")
    jobs = pick(args.jobs, "jobs")
    if jobs is not None:
        try:
            cfg.jobs = int(jobs)
        except ValueError:
            raise UsageError(f"--jobs: {jobs!r} is not an integer") from None
        if cfg.jobs < 1:
            raise UsageError("--jobs must be at least 1")
    cfg.emit_grid = as_bool(pick(args.emit_grid, "emit_grid"), "emit_grid")
    cfg.sharper_tau = as_bool(pick(args.sharper_tau, "sharper_tau"), "sharper_tau")
    cfg.literal_rhs = as_bool(pick(args.literal_rhs, "literal_rhs"), "literal_rhs")
    if cfg.mode == "solve" and (len(cfg.epsilons) != 1 or len(cfg.Ns) != 1):
        raise UsageError("solve mode needs exactly one --epsilon and one --N")
    return cfg


def emit_grid_csv(grid: SolutionGrid, path) -> Path:
    """Write the grid in long format ``x,t,y`` (j-major), 17 significant digits."""
    path = Path(path)
    x = np.asarray(grid.mesh.nodes)
    lines = ["x,t,y"]
    for j, t in enumerate(grid.times):
        row = grid.values[j]
        lines.extend(f"{x[i] + 0.0:.17g},{t + 0.0:.17g},{row[i] + 0.0:.17g}" for i in range(len(x)))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write grid to {path}: {exc}") from exc
    return path


def _fmt_err(v: float) -> str:
    return "nan" if not math.isfinite(v) else f"{v:.2e}"


def _fmt_order(v: float) -> str:
    return "nan" if not math.isfinite(v) else f"{v:.4f}"


def table_rows(report: ConvergenceReport) -> list[list[str]]:
    """Alternating error / order rows in the layout of the published tables."""
    rows = [["epsilon"] + [str(N) for N in report.Ns]]
    for eps in report.epsilons:
        rows.append([epsilon_label(eps)] + [_fmt_err(v) for v in report.row(eps)])
        rows.append(["Order"] + [_fmt_order(v) for v in report.order_row(eps)] + [""])
    return rows


def report_json(report: ConvergenceReport, example_id: int) -> dict:
    def clean(v):
        return v if math.isfinite(v) else None

    return {
        "example": example_id,
        "Ns": report.Ns,
        "rows": [
            {"epsilon": eps, "label": epsilon_label(eps),
             "errors": [clean(v) for v in report.row(eps)],
             "orders": [clean(v) for v in report.order_row(eps)]}
            for eps in report.epsilons
        ],
        "uniform_errors": {str(N): v for N, v in report.uniform_errors.items()},
        "failures": {f"{epsilon_label(e)},N={N}": str(exc) for (e, N), exc in report.failures.items()},
    }


def write_study(report: ConvergenceReport, example_id: int, out_dir: Path, formats: Sequence[str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = out_dir / f"table_example{example_id}.csv"
        with p.open("w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(table_rows(report))
        written.append(p)
    if "json" in formats:
        p = out_dir / f"table_example{example_id}.json"
        p.write_text(json.dumps(report_json(report, example_id), indent=2) + "\n")
        written.append(p)
    return written


def run(config: RunConfig, problem: Optional[Problem] = None) -> int:
    """Execute a configuration. ``problem`` overrides the built-in example
    (library use); its epsilon is replaced by the configured one(s)."""
    base = problem if problem is not None else builtin_example(config.example_id)

    if config.mode == "validate":
        for diag in validate_problem(base):
            print(f"{diag.level}: {diag.message}")
        for N in config.Ns:
            rep = monotonicity_preconditions(base, N, N)
            d = rep.details
            print(f"N=M={N}: preconditions {'hold' if rep.precondition_ok else 'FAIL'} "
                  f"(N/lnN={d['N_over_lnN']:.4g} vs 4|a|/alpha={d['four_a_over_alpha']:.4g}; "
                  f"2N|a|={d['two_N_a']:.4g} vs |b|+2M/T={d['b_plus_two_M_over_T']:.4g})")
        return EXIT_OK

    config.output_dir.mkdir(parents=True, exist_ok=True)
    if config.mode == "solve":
        eps, N = config.epsilons[0], config.Ns[0]
        try:
            grid = solve(replace(base, epsilon=eps), N, N, sharper_tau=config.sharper_tau,
                         literal_rhs=config.literal_rhs)
        except SolverError as exc:
            print(f"numerical failure at epsilon={epsilon_label(eps)}, N={N}: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        path = emit_grid_csv(grid, config.output_dir / "grid.csv")
        print(f"wrote {path} (max |Y| = {np.max(np.abs(grid.values)):.6g})")
        return EXIT_OK

    report = convergence_study(base, config.epsilons, config.Ns, jobs=config.jobs,
                               sharper_tau=config.sharper_tau, literal_rhs=config.literal_rhs)
    for p in write_study(report, config.example_id, config.output_dir, config.formats):
        print(f"wrote {p}")
    if config.emit_grid:
        # study mode: one grid per cell, named by epsilon and N
        for eps in config.epsilons:
            for N in config.Ns:
                if (eps, N) in report.failures:
                    continue
                grid = solve(replace(base, epsilon=eps), N, N, sharper_tau=config.sharper_tau,
                             literal_rhs=config.literal_rhs)
                name = f"grid_example{config.example_id}_eps{epsilon_label(eps).replace('^', '')}_N{N}.csv"
                print(f"wrote {emit_grid_csv(grid, config.output_dir / name)}")
    for row in table_rows(report):
        print("  ".join(f"{c:>9}" for c in row))
    if report.failures:
        for (eps, N), exc in sorted(report.failures.items()):
            print(f"numerical failure at epsilon={epsilon_label(eps)}, N={N}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(cfg)
    except SolverError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
