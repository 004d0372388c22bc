"""Command-line front end: ``prandtl solve | transform | verify``.

Exit codes: 0 ok, 2 configuration error, 3 CG did not converge, 4 a
verification check failed, 5 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, ConvergenceError, GridError, SpecError
from .grid import GridFunction, OmegaGrid, sample
from .operators import multiplier_table
from .ptransform import (convolve, derivative_image, direct_convolution, forward, inverse, pairing,
                         spectral_pairing)
from .solver import CoefficientSpec, ProblemSpec, solve_weak

log = logging.getLogger("prandtl")

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_VERIFY, EXIT_IO = 0, 2, 3, 4, 5

COMMANDS = ("solve", "transform", "verify")
RHS_KINDS = ("one", "cosine", "tabulated")
N_RANGE = (256, 2 ** 20)
L_RANGE = (4.0, 40.0)
TOL_RANGE = (1e-14, 1e-4)

_TOP_KEYS = {"command", "coefficient", "rhs", "grid", "solver", "output"}
_COEFF_KEYS = {"kind", "p0", "samples", "M"}
_RHS_KEYS = {"kind", "frequency", "samples"}
_GRID_KEYS = {"n", "L", "pad"}
_SOLVER_KEYS = {"tol", "max_iter", "tail_correction"}


@dataclass(frozen=True)
class RhsConfig:
    kind: str = "one"
    frequency: float = math.pi / 2
    samples: Optional[tuple] = None

    def callable(self):
        if self.kind == "one":
            return lambda x: np.ones_like(np.asarray(x, dtype=float))
        if self.kind == "cosine":
            w = self.frequency
            return lambda x: np.cos(w * np.asarray(x, dtype=float))
        tab = np.array(self.samples, dtype=float)
        return lambda x: np.interp(np.asarray(x, dtype=float), tab[:, 0], tab[:, 1])


@dataclass(frozen=True)
class RunConfig:
    command: str = "solve"
    coefficient: CoefficientSpec = field(default_factory=lambda: CoefficientSpec("elliptic", 2.0))
    rhs: RhsConfig = field(default_factory=RhsConfig)
    n: int = 4096
    L: float = 12.0
    pad: int = 1
    tol: float = 1e-10
    max_iter: int = 5000
    tail_correction: bool = True
    output: str = "out"

    @property
    def grid(self) -> OmegaGrid:
        return OmegaGrid(self.n, self.L)

    def problem(self) -> ProblemSpec:
        return ProblemSpec(self.coefficient, self.rhs.callable(), self.grid, self.tol,
                           self.max_iter, self.tail_correction)


# ------------------------------------------------------------ parsing

def _section(doc, key, allowed):
    sub = doc.get(key, {})
    if not isinstance(sub, dict):
        raise ConfigError(f"'{key}' must be an object")
    extra = set(sub) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in '{key}': {', '.join(sorted(extra))}")
    return sub


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number, got {value!r}")
    return float(value)


def _integer(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


def _pairs(value, name):
    if not isinstance(value, list) or len(value) < 2:
        raise ConfigError(f"{name} must be a list of at least two [x, value] pairs")
    out = []
    for item in value:
        if not isinstance(item, list) or len(item) != 2:
            raise ConfigError(f"{name} entries must be [x, value] pairs, got {item!r}")
        out.append((_number(item[0], name), _number(item[1], name)))
    return tuple(out)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration.

    Raises
    ------
    ConfigError
        On malformed JSON (with line and column), unknown keys, or any value
        outside its admissible range.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    extra = set(doc) - _TOP_KEYS
    if extra:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(extra))}")

    command = doc.get("command", "solve")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")

    g = _section(doc, "grid", _GRID_KEYS)
    n = _integer(g.get("n", 4096), "grid.n")
    if n <= 0 or n & (n - 1):
        raise ConfigError(f"grid.n must be a power of two, got {n}")
    if not N_RANGE[0] <= n <= N_RANGE[1]:
        raise ConfigError(f"grid.n must lie in [{N_RANGE[0]}, {N_RANGE[1]}], got {n}")
    L = _number(g.get("L", 12.0), "grid.L")
    if not L_RANGE[0] <= L <= L_RANGE[1]:
        raise ConfigError(f"grid.L must lie in [{L_RANGE[0]:g}, {L_RANGE[1]:g}], got {L:g}")
    pad = _integer(g.get("pad", 1), "grid.pad")
    if pad not in (1, 2):
        raise ConfigError(f"grid.pad must be 1 or 2, got {pad}")
    try:
        grid = OmegaGrid(n, L)
    except GridError as exc:
        raise ConfigError(f"grid.L: {exc}") from None

    s = _section(doc, "solver", _SOLVER_KEYS)
    tol = _number(s.get("tol", 1e-10), "solver.tol")
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise ConfigError(f"solver.tol must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}], got {tol:g}")
    max_iter = _integer(s.get("max_iter", 5000), "solver.max_iter")
    if max_iter < 1:
        raise ConfigError(f"solver.max_iter must be >= 1, got {max_iter}")
    tail = s.get("tail_correction", True)
    if not isinstance(tail, bool):
        raise ConfigError("solver.tail_correction must be true or false")

    c = _section(doc, "coefficient", _COEFF_KEYS)
    kind = c.get("kind", "elliptic")
    p0 = _number(c.get("p0", 2.0 if kind == "elliptic" else 1.0), "coefficient.p0")
    samples = _pairs(c["samples"], "coefficient.samples") if "samples" in c else None
    M = _number(c["M"], "coefficient.M") if "M" in c else None
    try:
        coefficient = CoefficientSpec(kind, p0, samples, M)
        coefficient.weight(grid)
    except SpecError as exc:
        raise ConfigError(f"coefficient: {exc}") from None

    r = _section(doc, "rhs", _RHS_KEYS)
    rkind = r.get("kind", "one")
    if rkind not in RHS_KINDS:
        raise ConfigError(f"rhs.kind must be one of {RHS_KINDS}, got {rkind!r}")
    freq = _number(r.get("frequency", math.pi / 2), "rhs.frequency")
    rsamples = None
    if rkind == "tabulated":
        if "samples" not in r:
            raise ConfigError("rhs.samples is required for rhs.kind = 'tabulated'")
        rsamples = tuple(sorted(_pairs(r["samples"], "rhs.samples")))
        if any(abs(x) >= 1 for x, _ in rsamples):
            raise ConfigError("rhs.samples abscissae must satisfy |x| < 1")
    elif "samples" in r:
        raise ConfigError("rhs.samples is only allowed for rhs.kind = 'tabulated'")

    output = doc.get("output", "out")
    if not isinstance(output, str) or not output:
        raise ConfigError("output must be a non-empty path string")

    return RunConfig(command, coefficient, RhsConfig(rkind, freq, rsamples), n, L, pad, tol,
                     max_iter, tail, output)


# ------------------------------------------------------------ writers

def _g(v: float) -> str:
    return format(float(v), ".17g")


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_solution(path: Path, u: GridFunction):
    grid = u.grid
    U = forward(u)
    du = inverse(derivative_image(U), grid).values
    rows = ((j, _g(grid.omega[j]), _g(grid.x[j]), _g(u.values[j].real), _g(u.values[j].imag),
             _g(du[j].real)) for j in range(grid.n))
    _write_csv(path, ["j", "omega", "x", "u_real", "u_imag", "u_prime_weighted"], rows)


def write_spectrum(path: Path, u: GridFunction):
    U = forward(u)
    m = multiplier_table(U.grid).values
    xi = U.grid.xi
    rows = ((k, _g(xi[k]), _g(U.values[k].real), _g(U.values[k].imag), _g(m[k]))
            for k in range(U.grid.n))
    _write_csv(path, ["k", "xi", "U_real", "U_imag", "multiplier"], rows)


def report_dict(config: RunConfig, report) -> dict:
    return {
        "norms": report.norms,
        "bounds": [b.as_dict() for b in report.bounds],
        "iterations": report.iterations,
        "aux_iterations": report.aux_iterations,
        "residual": report.residual,
        "spectral_tail": report.spectral_tail,
        "grid": {"n": config.n, "L": config.L},
        "coefficient": {"kind": config.coefficient.kind, "p0": config.coefficient.p0,
                        "M": config.coefficient.M},
        "rhs": config.rhs.kind,
    }


def report_text(config: RunConfig, report) -> str:
    c = config.coefficient
    lines = [
        "Prandtl weak solve",
        f"  coefficient   {c.kind} (p0={c.p0:g}, M={c.M:g})",
        f"  rhs           {config.rhs.kind}",
        f"  grid          n={config.n}  L={config.L:g}",
        f"  iterations    {report.iterations} (+{report.aux_iterations} edge-tail)",
        f"  residual      {report.residual:.3e}",
        f"  spectral tail {report.spectral_tail:.3e}",
        "",
        f"{'norm':<16}{'value':>24}",
    ]
    lines += [f"{k:<16}{v:>24.16e}" for k, v in report.norms.items()]
    lines += ["", f"{'bound':<26}{'lhs':>24}{'rhs':>24}{'ratio':>10}  pass"]
    for b in report.bounds:
        lines.append(f"{b.name:<26}{b.lhs:>24.16e}{b.rhs:>24.16e}{b.ratio:>10.4f}  "
                     f"{'yes' if b.passed else 'NO'}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ commands

def _solve(config: RunConfig, out: Path) -> int:
    u, report = solve_weak(config.problem())
    out.mkdir(parents=True, exist_ok=True)
    write_solution(out / "solution.csv", u)
    write_spectrum(out / "spectrum.csv", u)
    (out / "report.txt").write_text(report_text(config, report), encoding="utf-8")
    (out / "report.json").write_text(json.dumps(report_dict(config, report), indent=2) + "\n",
                                     encoding="utf-8")
    print(report_text(config, report), end="")
    return EXIT_OK if report.all_passed else EXIT_VERIFY


def _sech_image(xi):
    a = np.abs(np.pi * xi)
    return 2.0 * np.pi * np.exp(-a) / (1.0 + np.exp(-2.0 * a))


def _weight_image(xi):
    a = np.abs(np.pi * xi)
    out = np.full_like(a, 2.0)
    nz = a > 0
    out[nz] = 4.0 * a[nz] * np.exp(-a[nz]) / (-np.expm1(-2.0 * a[nz]))
    return out


TEST_FUNCTIONS = {
    # name: (u(x), closed-form image)
    "sech": (lambda x: np.sqrt((1 - x) * (1 + x)), _sech_image),
    "weight": (lambda x: (1 - x) * (1 + x), _weight_image),
    "odd": (lambda x: 2 * x * np.sqrt((1 - x) * (1 + x)), lambda xi: -4j * xi * _sech_image(xi)),
}


def _transform(config: RunConfig, out: Path, name: str) -> int:
    fn, image = TEST_FUNCTIONS[name]
    grid = config.grid
    u = sample(fn, grid)
    U = forward(u)
    exact = image(grid.spectral.xi)
    back = inverse(U, grid)
    conv = convolve(u, u, pad=config.pad)
    direct = direct_convolution(u, fn)
    diag = {
        "function": name,
        "grid": {"n": config.n, "L": config.L, "pad": config.pad},
        "forward_max_error": float(np.max(np.abs(U.values - exact))),
        "roundtrip_max_error": float(np.max(np.abs(back.values - u.values))),
        "parseval_relative_error": abs(pairing(u, u) - spectral_pairing(U, U)) / abs(pairing(u, u)),
        "convolution_max_error": float(np.max(np.abs(conv.values - direct.values))),
    }
    out.mkdir(parents=True, exist_ok=True)
    xi = grid.spectral.xi
    rows = ((k, _g(xi[k]), _g(U.values[k].real), _g(U.values[k].imag), _g(exact[k].real),
             _g(exact[k].imag)) for k in range(grid.n))
    _write_csv(out / "transform.csv", ["k", "xi", "U_real", "U_imag", "exact_real", "exact_imag"], rows)
    (out / "transform.json").write_text(json.dumps(diag, indent=2) + "\n", encoding="utf-8")
    for k, v in diag.items():
        if k != "grid":
            print(f"{k:<26}{v if isinstance(v, str) else format(v, '.3e')}")
    return EXIT_OK


def _verify(quick: bool) -> int:
    from .acceptance import run_all

    results = run_all(quick=quick)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def run(config: RunConfig, *, out: Optional[str] = None, function: str = "sech",
        quick: bool = False) -> int:
    """Execute one command and return its exit status."""
    target = Path(out or config.output)
    try:
        if config.command == "solve":
            return _solve(config, target)
        if config.command == "transform":
            return _transform(config, target, function)
        return _verify(quick)
    except ConvergenceError as exc:
        log.error("%s", exc)
        return EXIT_CONVERGENCE
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prandtl", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="solve one problem and write CSV and reports")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    t = sub.add_parser("transform", help="forward/inverse diagnostics for a test function")
    t.add_argument("--function", choices=sorted(TEST_FUNCTIONS), default="sech")
    t.add_argument("--config")
    t.add_argument("--out")
    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--quick", action="store_true")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    config = RunConfig(command=args.command)
    path = getattr(args, "config", None)
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            log.error("cannot read config: %s", exc)
            return EXIT_IO
        try:
            config = parse_config(text)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        config = RunConfig(**{**config.__dict__, "command": args.command})
    return run(config, out=getattr(args, "out", None), function=getattr(args, "function", "sech"),
               quick=getattr(args, "quick", False))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
