"""Parameter sweeps with deterministic tabular output."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import SweepConfig
from .errors import SqzOptoError, StageError
from .params import PRESETS, LowQualityFactorWarning
from .pipeline import evaluate

__all__ = ["RESULT_COLUMNS", "VERBOSE_COLUMNS", "eval_point", "run_sweep", "format_rows",
           "row_for_changes"]

RESULT_COLUMNS = ("stable", "abscissa", "n_s", "abs_m_s", "eta", "en_cb1", "en_cb2", "en_b1b2",
                  "etau_c", "etau_b1", "etau_b2", "r_min", "min_symp_eig", "error")
VERBOSE_COLUMNS = ("delta_s", "lambda_1_abs", "lambda_2_abs", "mf_residual", "mf_iterations",
                   "beta_p_ratio", "hermiticity_defect")
_ENT_COLUMNS = ("en_cb1", "en_cb2", "en_b1b2", "etau_c", "etau_b1", "etau_b2", "r_min",
                "min_symp_eig")


def row_for_changes(preset, changes, mode="reproduction", g_scale=1.0, verbose=False):
    """Evaluate one parameter point; errors go into the ``error`` field."""
    row = dict.fromkeys(RESULT_COLUMNS + (VERBOSE_COLUMNS if verbose else ()))
    row["error"] = ""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LowQualityFactorWarning)
            params = PRESETS[preset].with_changes(**changes)
    except (SqzOptoError, ValueError) as exc:
        row["error"] = str(StageError("params", exc))
        return row
    try:
        res = evaluate(params, mode=mode, g_scale=g_scale)
    except StageError as exc:
        row["error"] = str(exc)
        return row
    row.update(stable=res.stable, abscissa=res.spectral_abscissa, n_s=res.frame.N_s,
               abs_m_s=abs(res.frame.M_s), eta=res.eta)
    if verbose:
        row.update(delta_s=res.model.delta_s, lambda_1_abs=abs(res.model.lambda_1),
                   lambda_2_abs=abs(res.model.lambda_2),
                   beta_p_ratio=res.model.beta_p_ratio)
        if res.meanfield is not None:
            row.update(mf_residual=res.meanfield.residual,
                       mf_iterations=res.meanfield.iterations)
    if res.stable:
        rep = res.report
        row.update(en_cb1=rep.en_cb1, en_cb2=rep.en_cb2, en_b1b2=rep.en_b1b2,
                   etau_c=rep.etau_1v2["c"], etau_b1=rep.etau_1v2["b1"],
                   etau_b2=rep.etau_1v2["b2"], r_min=rep.r_min,
                   min_symp_eig=res.cm.min_symplectic_eigenvalue)
        if verbose:
            row["hermiticity_defect"] = res.moments.hermiticity_defect()
    for k, v in row.items():
        if isinstance(v, float) and not math.isfinite(v) and k != "eta":
            bad = {c: None for c in _ENT_COLUMNS}
            row.update(bad)
            row["error"] = f"{k}: NumericalError: non-finite value"
            break
    return row


def _task(args):
    index, preset, changes, mode, g_scale, verbose = args
    return index, row_for_changes(preset, changes, mode, g_scale, verbose)


def _points(config: SweepConfig):
    if not config.axes:
        yield ()
        return
    yield from itertools.product(*(vals for _, vals in config.axes))


def run_sweep(config: SweepConfig, threads=None, verbose=False):
    """Evaluate every point of the Cartesian product of the sweep axes.

    Rows come back in lexicographic axis order (first axis slowest) whatever
    the number of worker processes.
    """
    threads = config.threads if threads is None else threads
    names = [n for n, _ in config.axes]
    points = list(_points(config))
    tasks = [(i, config.preset, config.point_changes(p), config.mode, config.g_scale, verbose)
             for i, p in enumerate(points)]
    if threads > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_task, tasks, chunksize=chunk))
    else:
        results = [_task(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    rows = []
    for (index, row), p in zip(results, points):
        full = dict(zip(names, p))
        full.update(row)
        rows.append(full)
    return rows


def eval_point(config: SweepConfig, verbose=False):
    """Single evaluation of a configuration without sweep axes."""
    if config.axes:
        raise ValueError("eval_point needs a configuration without sweep axes")
    return run_sweep(config, threads=1, verbose=verbose)[0]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.12g" % v
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float("%.12g" % v) if math.isfinite(v) else None
    if v == "":
        return None
    return v


def format_rows(rows, columns, fmt="csv"):
    """Serialize rows as CSV (header, LF line endings) or a JSON array."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c)) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        data = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps(data, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
