"""Built-in invariant suites run by ``sqzopto check``."""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceMatrix, assemble_cm, physicality
from .entanglement import log_negativity, residual_contangle_min
from .meanfield import build_linearized
from .moments import build_drift, evolve_moments, ode_rhs, stability, steady_moments
from .params import FIG1_PARAMS, FIG3_PARAMS, LowQualityFactorWarning, noise_params
from .pipeline import random_model

__all__ = ["SuiteResult", "SUITES", "FAULTS", "run_self_check", "tmsv_cm", "figure_models"]

FAULTS = ("drift", "cm")


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def tmsv_cm(s):
    """Two-mode squeezed vacuum on (c, b1) with b2 in vacuum."""
    ch, sh = math.cosh(2 * s) / 2, math.sinh(2 * s) / 2
    v = 0.5 * np.eye(6)
    v[:4, :4] = [[ch, 0, sh, 0], [0, ch, 0, -sh], [sh, 0, ch, 0], [0, -sh, 0, ch]]
    return CovarianceMatrix.from_matrix(v)


def figure_models():
    """Linearized models at representative figure parameter points."""
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LowQualityFactorWarning)
        for r_d, th in ((0.0, 0.0), (0.25, math.pi), (0.25, 0.0)):
            p = FIG1_PARAMS.with_changes(r_d=r_d, theta_d=th, delta_theta=math.pi, delta_r=0.0)
            out.append(build_linearized(p, direct_G=1.0))
        for dc in (0.2, 0.55, 1.0):
            for r_d, th in ((0.0, 0.0), (0.6, math.pi), (0.6, 0.0)):
                p = FIG3_PARAMS.with_changes(delta_c=dc, r_d=r_d, theta_d=th, delta_theta=math.pi, delta_r=0.0)
                out.append(build_linearized(p, direct_G=1.0))
    return out


def _models(n, seed):
    rng = np.random.default_rng(seed)
    return [random_model(rng) for _ in range(n)]


def _inject_drift(drift):
    bad = drift.copy()
    bad[12, 0] += 1e-3
    return bad


def suite_drift_ode(fault=None, n=20, seed=11):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in _models(n, seed):
        drift, drive = build_drift(m)
        if fault == "drift":
            drift = _inject_drift(drift)
        x = rng.normal(size=24) + 1j * rng.normal(size=24)
        worst = max(worst, float(np.max(np.abs(ode_rhs(x, m) - (drift @ x + drive)))))
    return worst < 1e-12, f"max |ODE - (M x + N)| = {worst:.2e}"


def suite_steady_vs_integrated(fault=None, n=5, seed=12):
    worst = 0.0
    for m in _models(n, seed):
        drift, drive = build_drift(m)
        if fault == "drift":
            drift = _inject_drift(drift)
        if not stability(drift)[0]:
            return False, "injected drift is unstable"
        st = steady_moments(drift, drive)
        norm = np.max(np.sum(np.abs(drift), axis=1))
        ev = evolve_moments(drift, drive, np.zeros(24), 50 / abs(st.spectral_abscissa), 0.05 / norm)
        ref = steady_moments(*build_drift(m)).x
        worst = max(worst, float(np.linalg.norm(ev.x - ref) / np.linalg.norm(ref)))
    return worst < 1e-8, f"max relative deviation = {worst:.2e}"


def suite_tmsv(fault=None):
    worst = 0.0
    for s in (0.1, 0.5, 1.0):
        cm = tmsv_cm(s)
        if fault == "cm":
            cm = cm.scaled(0.5)
        worst = max(worst, abs(log_negativity(cm, ("c", "b1")) - 2 * s))
    return worst < 1e-9, f"max |E_N - 2s| = {worst:.2e}"


def _figure_and_random_cms(fault, n=30, seed=13):
    for m in figure_models() + _models(n, seed):
        drift, drive = build_drift(m)
        if fault == "drift":
            drift = _inject_drift(drift)
        if not stability(drift)[0]:
            continue
        st = steady_moments(drift, drive)
        yield st


def suite_hermiticity(fault=None):
    worst = 0.0
    for st in _figure_and_random_cms(fault):
        worst = max(worst, st.hermiticity_defect() / max(1.0, float(np.max(np.abs(st.x)))))
    return worst < 1e-10, f"max relative pairing defect = {worst:.2e}"


def suite_physicality(fault=None):
    worst = math.inf
    for st in _figure_and_random_cms(fault):
        cm = assemble_cm(st, tol=math.inf)
        if fault == "cm":
            cm = cm.scaled(0.5)
        worst = min(worst, physicality(cm)[1])
    return worst >= 0.5 - 1e-9, f"min symplectic eigenvalue = {worst:.12f}"


def suite_monogamy(fault=None):
    worst = math.inf
    for st in _figure_and_random_cms(fault):
        cm = assemble_cm(st, tol=math.inf)
        if fault == "cm":
            cm = cm.scaled(0.5)
        try:
            r_min, _ = residual_contangle_min(cm, check=False)
        except ArithmeticError:
            return False, "invalid covariance matrix"
        worst = min(worst, r_min)
    return worst >= -1e-9, f"min residual contangle = {worst:.3e}"


def suite_phase_match(fault=None):
    worst = 0.0
    for r in (0.1, 0.5, 1.0):
        for th in (0.0, 1.0, math.pi):
            n_s, m_s = noise_params(r, th, r, th + math.pi)
            worst = max(worst, abs(n_s), abs(m_s))
    return worst < 1e-14, f"max(N_s, |M_s|) = {worst:.2e}"


SUITES = {
    "drift_vs_ode": suite_drift_ode,
    "steady_vs_integrated": suite_steady_vs_integrated,
    "tmsv": suite_tmsv,
    "hermiticity": suite_hermiticity,
    "physicality": suite_physicality,
    "monogamy": suite_monogamy,
    "phase_match": suite_phase_match,
}


def run_self_check(fault=None, suites=None):
    """Run the suites; ``fault`` in {None, 'drift', 'cm'} injects a defect."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    results = []
    for name in suites or SUITES:
        t0 = time.perf_counter()
        try:
            ok, detail = SUITES[name](fault=fault)
        except Exception as exc:  # a crashing suite is a failing suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(SuiteResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
