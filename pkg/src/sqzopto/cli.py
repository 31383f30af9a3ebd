"""Command-line interface: ``sqzopto {eval,sweep,wigner,check}``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 self-check failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .config import SweepConfig, load_config, parse_config
from .errors import ConfigError, SqzOptoError, StageError
from .params import LowQualityFactorWarning
from .pipeline import evaluate
from .selfcheck import FAULTS, SUITES, run_self_check
from .sweep import RESULT_COLUMNS, VERBOSE_COLUMNS, format_rows, run_sweep
from .wigner import project, sample_grid

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3


def _write(text, output):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8", newline="\n")


def _load(args) -> SweepConfig:
    if args.config is None:
        return parse_config("")
    return load_config(args.config)


def _columns(cfg, verbose):
    cols = tuple(n for n, _ in cfg.axes) + RESULT_COLUMNS
    return cols + VERBOSE_COLUMNS if verbose else cols


def cmd_eval(args):
    cfg = _load(args)
    if cfg.axes:
        raise ConfigError("eval takes a configuration without sweep.* axes; use sweep")
    rows = run_sweep(cfg, threads=1, verbose=args.verbose)
    _write(format_rows(rows, _columns(cfg, args.verbose), args.format or cfg.output_format),
           args.output)
    if args.cm is not None and not rows[0]["error"] and rows[0]["stable"]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LowQualityFactorWarning)
            res = evaluate(cfg.base, mode=cfg.mode, g_scale=cfg.g_scale)
        lines = [",".join("%.12g" % v for v in row) for row in res.cm.v]
        _write("\n".join(lines) + "\n", args.cm)
    return EXIT_NUMERIC if rows[0]["error"] else EXIT_OK


def cmd_sweep(args):
    cfg = _load(args)
    threads = args.threads if args.threads is not None else cfg.threads
    if threads < 1:
        raise ConfigError("--threads must be >= 1")
    rows = run_sweep(cfg, threads=threads, verbose=args.verbose)
    _write(format_rows(rows, _columns(cfg, args.verbose), args.format or cfg.output_format),
           args.output)
    return EXIT_OK


def cmd_wigner(args):
    cfg = _load(args)
    if cfg.axes:
        raise ConfigError("wigner takes a configuration without sweep.* axes")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LowQualityFactorWarning)
        res = evaluate(cfg.base, mode=cfg.mode, g_scale=cfg.g_scale)
    if not res.stable:
        raise StageError("moments", SqzOptoError(
            f"no steady state (abscissa {res.spectral_abscissa:.3e})"))
    outdir = Path(args.output) if args.output else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
    summary = []
    for qi, qj in cfg.wigner_pairs:
        g = project(res.cm, qi, qj)
        entry = {"pair": [qi, qj], **g.ellipse.to_dict(), "peak": g.peak}
        summary.append(entry)
        if outdir is not None:
            hw = cfg.wigner_half_width or 6.0 * g.ellipse.a
            px, py, w = sample_grid(g, hw, cfg.wigner_points)
            lines = ["p_x,p_y,w"]
            for i, x in enumerate(px):
                for j, y in enumerate(py):
                    lines.append("%.12g,%.12g,%.12g" % (x, y, w[i, j]))
            (outdir / f"wigner_{qi}_{qj}.csv").write_text("\n".join(lines) + "\n",
                                                          encoding="utf-8", newline="\n")
    text = json.dumps(summary, indent=1) + "\n"
    if outdir is None:
        sys.stdout.write(text)
    else:
        (outdir / "ellipses.json").write_text(text, encoding="utf-8", newline="\n")
    return EXIT_OK


def cmd_check(args):
    results = run_self_check(fault=args.inject, suites=args.suite)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<22s} {r.seconds:8.3f} s  {r.detail}")
    ok = all(r.passed for r in results)
    print("self-check " + ("passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_CHECK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sqzopto",
        description="Steady-state Gaussian entanglement of a squeezed two-mirror optomechanical system.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True, threads=False):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--output", help="output path (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default=None)
        if threads:
            p.add_argument("--threads", type=int, default=None, help="worker processes")
        p.add_argument("--verbose", action="store_true", help="append diagnostic columns")

    p = sub.add_parser("eval", help="evaluate a single parameter point")
    common(p)
    p.add_argument("--cm", help="also write the 6x6 covariance matrix as CSV to this path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="evaluate the Cartesian product of the sweep axes")
    common(p, threads=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("wigner", help="Wigner projections; --output is a directory")
    common(p, fmt=False)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("check", help="run the built-in invariant suites")
    p.add_argument("--inject", choices=FAULTS, default=None, help="inject a known fault")
    p.add_argument("--suite", action="append", choices=tuple(SUITES), default=None)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SqzOptoError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
