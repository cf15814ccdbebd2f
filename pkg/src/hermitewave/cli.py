"""Command-line entry point.

Every flag may also come from a ``key = value`` config file (``--config``);
flags given on the command line win.  Output is CSV, written to ``--out`` or
to stdout.  Exit status: 0 success, 2 invalid arguments, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis as an
from . import harness as hn
from .interpolation import InterpolationError
from .schemes1d import SCHEMES, CFLError, UnsupportedError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

COMMANDS = ("simulate", "converge", "spectrum", "dispersion", "optimize")

# config-file key -> (argparse dest, converter)
_KEYS = {
    "scheme": str, "equation": str, "order": int, "cells": str, "cfl": float,
    "tfinal": float, "solution": str, "out": str, "policy": str, "trace": str,
    "samples": int, "digits": int, "wavespeed": float,
}
_DEFAULTS = {
    "scheme": "dual", "equation": "advection1d", "order": 2, "cells": None, "cfl": 0.9,
    "tfinal": None, "solution": None, "out": None, "policy": "shorten-last",
    "trace": False, "samples": 64, "digits": None, "wavespeed": 1.0,
}
_DEFAULT_CELLS = {"simulate": "16", "converge": "16,32,64", "spectrum": "16",
                  "dispersion": "16", "optimize": "8"}


class UsageError(ValueError):
    pass


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key == "n":
            key = "order"
        if key not in _KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _convert(key, value):
    if key == "trace":
        if isinstance(value, bool):
            return value
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    try:
        return _KEYS[key](value)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hermitewave", description="Hermite method solvers and analysis")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="key = value file; command-line flags override it")
    p.add_argument("--scheme", help=f"one of {', '.join(SCHEMES)}")
    p.add_argument("--equation", help=f"one of {', '.join(hn.EQUATIONS)}")
    p.add_argument("--order", "-N", dest="order", help="Hermite order N")
    p.add_argument("--cells", help="grid size K, or a comma list for converge")
    p.add_argument("--cfl", help="CFL constant C in (0, 1]")
    p.add_argument("--tfinal", help="final time")
    p.add_argument("--solution", help="initial/exact solution id")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--policy", help="step fitting: shorten-last or uniform")
    p.add_argument("--trace", action="store_const", const="true", default=None,
                   help="simulate: emit the per-step error trace")
    p.add_argument("--samples", help="dispersion: number of kh samples in (0, pi]")
    p.add_argument("--digits", help="dispersion: evaluate in extended precision")
    p.add_argument("--wavespeed", help="advection speed for spectrum/dispersion/optimize")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve(ns: argparse.Namespace) -> dict:
    merged = dict(_DEFAULTS)
    if ns.config:
        try:
            merged.update(read_config(ns.config))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    for key in _KEYS:
        v = getattr(ns, key, None)
        if v is not None:
            merged[key] = v
    opts = {k: (_convert(k, v) if v is not None else None) for k, v in merged.items()}
    if opts["cells"] is None:
        opts["cells"] = _DEFAULT_CELLS[ns.command]
    try:
        opts["cells"] = tuple(int(s) for s in str(opts["cells"]).split(",") if s.strip())
    except ValueError as exc:
        raise UsageError(f"bad --cells {opts['cells']!r}") from exc
    if not opts["cells"]:
        raise UsageError("--cells is empty")
    if opts["tfinal"] is None:
        opts["tfinal"] = 1.0 if opts["equation"] != "advection1d" else 10.0
    opts["command"] = ns.command
    return opts


def _experiment(opts) -> hn.ExperimentConfig:
    return hn.ExperimentConfig(equation=opts["equation"], scheme=opts["scheme"], N=opts["order"],
                               K=opts["cells"], C=opts["cfl"], T=opts["tfinal"],
                               solution=opts["solution"], out=opts["out"], policy=opts["policy"])


def _check_1d_analysis(opts):
    if opts["equation"] != "advection1d":
        raise UsageError("spectral analysis is available for advection1d only")
    if opts["scheme"] not in SCHEMES:
        raise UsageError(f"unknown scheme {opts['scheme']!r}")
    if opts["order"] < 0:
        raise UsageError("order must be non-negative")
    if not 0 < opts["cfl"] <= 1:
        raise UsageError("CFL constant must lie in (0, 1]")


def cmd_simulate(opts):
    cfg = _experiment(opts)
    err, trace = hn.simulate(cfg, cfg.K[0], trace=opts["trace"])
    if opts["trace"]:
        return ("step", "t", "error"), trace
    return ("K", "N", "C", "error"), [(cfg.K[0], cfg.N, cfg.C, err)]


def cmd_converge(opts):
    cfg = _experiment(opts)
    rep = hn.converge(cfg)
    rows = sorted(rep.rows(), key=lambda r: (r[0], r[1], r[2]))
    return ("K", "error", "rate"), [(K, e, rate) for K, _, _, e, rate in rows]


def cmd_spectrum(opts):
    _check_1d_analysis(opts)
    ub = an.probe_update_blocks(opts["scheme"], opts["order"], opts["cfl"], opts["wavespeed"])
    lam = an.spectrum(an.assemble_global(ub, opts["cells"][0]))
    lam = sorted(lam, key=lambda z: (round(np.angle(z), 12), abs(z)))
    return ("re", "im"), [(float(z.real), float(z.imag)) for z in lam]


def cmd_dispersion(opts):
    _check_1d_analysis(opts)
    n = opts["samples"]
    if n < 1:
        raise UsageError("--samples must be positive")
    if opts["digits"]:
        ub = an.algebraic_blocks(opts["scheme"], opts["order"], opts["cfl"], opts["wavespeed"],
                                 dps=opts["digits"])
    else:
        ub = an.probe_update_blocks(opts["scheme"], opts["order"], opts["cfl"], opts["wavespeed"])
    khs = np.pi * np.arange(1, n + 1) / n
    return ("kh", "E", "re_lambda", "im_lambda"), [tuple(map(float, r)) for r in an.dispersion_curve(ub, khs)]


def cmd_optimize(opts):
    if opts["order"] < 1:
        raise UsageError("DRP tuning needs order >= 1")
    if not 0 < opts["cfl"] <= 1:
        raise UsageError("CFL constant must lie in (0, 1]")
    K = opts["cells"][0]
    res = an.drp_optimize(opts["order"], opts["cfl"], opts["wavespeed"], K_coarse=K)
    before = an.probe_update_blocks("virtual", opts["order"], opts["cfl"], opts["wavespeed"], H2=res.H2_init)
    after = an.probe_update_blocks("virtual", opts["order"], opts["cfl"], opts["wavespeed"], H2=res.H2)
    khs = 2 * np.pi * np.arange(1, K + 1) / (2 * K)
    rows = []
    for kh in khs:
        rows.append(("curve", float(kh), an.floquet_error(before, kh).error,
                     an.floquet_error(after, kh).error, ""))
    for i, row in enumerate(res.H2):
        rows.append(("H2", i, "", "", " ".join(repr(float(x)) for x in row)))
    rows.append(("summary", "", res.objective_init, res.objective,
                 f"C={res.C} spectral_radius={res.spectral_radius!r} iterations={res.iterations}"))
    return ("kind", "kh_or_row", "E_initial", "E_optimized", "values"), rows


HANDLERS = {"simulate": cmd_simulate, "converge": cmd_converge, "spectrum": cmd_spectrum,
            "dispersion": cmd_dispersion, "optimize": cmd_optimize}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        opts = resolve(ns)
        header, rows = HANDLERS[ns.command](opts)
    except (UsageError, UnsupportedError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CFLError, InterpolationError, an.AnalysisError, np.linalg.LinAlgError,
            FloatingPointError, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = hn.csv_text(header, rows)
    if opts["out"]:
        Path(opts["out"]).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
