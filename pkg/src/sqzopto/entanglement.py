"""Bipartite log-negativity and residual contangle of a three-mode Gaussian state."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .covariance import MODES, mode_slice, reduce, symplectic_form
from .errors import ComplexBranch, MonogamyViolation

__all__ = [
    "EntanglementReport",
    "CLAMP",
    "pt_min_eigenvalue",
    "log_negativity",
    "one_vs_two_eta",
    "one_vs_two_contangle",
    "residual_contangle_min",
    "entanglement_report",
]

CLAMP = 1e-12
BRANCH_TOL = 1e-9
MONOGAMY_FAIL = 1e-6

_PAIR_KEYS = {("c", "b1"): "en_cb1", ("c", "b2"): "en_cb2", ("b1", "b2"): "en_b1b2"}


def _clamp(value):
    return 0.0 if value < CLAMP else value


def pt_min_eigenvalue(cm, mode_pair):
    """Smallest partially-transposed symplectic eigenvalue of a two-mode reduction.

    Uses the closed form with Sigma = det A + det B - 2 det C.
    """
    A, B, C, V4 = reduce(cm, mode_pair)
    sigma = np.linalg.det(A) + np.linalg.det(B) - 2.0 * np.linalg.det(C)
    det_v = np.linalg.det(V4)
    disc = sigma * sigma - 4.0 * det_v
    if disc < -BRANCH_TOL:
        raise ComplexBranch(f"Sigma^2 - 4 det V = {disc:.3e} < 0; covariance matrix unphysical")
    inner = sigma - math.sqrt(max(disc, 0.0))
    return math.sqrt(max(inner, 0.0) / 2.0)


def _en_from_eta(eta):
    if eta <= 0.0:
        return math.inf
    return _clamp(max(0.0, -math.log(2.0 * eta)))


def log_negativity(cm, mode_pair):
    """E_N = max(0, -ln 2 eta_-) for the two modes in ``mode_pair``."""
    return _en_from_eta(pt_min_eigenvalue(cm, mode_pair))


def one_vs_two_eta(cm, single_mode):
    """Minimum symplectic eigenvalue after transposing one mode against the other two."""
    v = np.asarray(getattr(cm, "v", cm), dtype=float)
    flip = np.ones(6)
    flip[mode_slice(single_mode)[1]] = -1.0
    vt = flip[:, None] * v * flip[None, :]
    return float(np.min(np.abs(np.linalg.eigvals(1j * symplectic_form(3) @ vt))))


def one_vs_two_contangle(cm, single_mode):
    """Contangle E_tau^{r|st}: the squared log-negativity of mode r against the rest."""
    return _en_from_eta(one_vs_two_eta(cm, single_mode)) ** 2


@dataclass(frozen=True)
class EntanglementReport:
    en_cb1: float
    en_cb2: float
    en_b1b2: float
    etau_1v2: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    r_min: float = 0.0
    eta_minus: dict = field(default_factory=dict)

    def pair(self, a, b):
        key = _PAIR_KEYS.get((a, b)) or _PAIR_KEYS[(b, a)]
        return getattr(self, key)


def residual_contangle_min(cm, check=True):
    """Minimum residual contangle over the three choices of the singled-out mode.

    Returns ``(r_min, report)``. With ``check`` set, a residual below -1e-6
    raises :class:`MonogamyViolation`.
    """
    etas = {}
    en = {}
    for (a, b), key in _PAIR_KEYS.items():
        etas[f"{a}|{b}"] = pt_min_eigenvalue(cm, (a, b))
        en[key] = _en_from_eta(etas[f"{a}|{b}"])
    etau = {}
    residuals = {}
    for r in MODES:
        s, t = [m for m in MODES if m != r]
        eta = one_vs_two_eta(cm, r)
        etas[f"{r}|{s}{t}"] = eta
        etau[r] = _en_from_eta(eta) ** 2
        e_rs = en[_PAIR_KEYS.get((r, s)) or _PAIR_KEYS[(s, r)]]
        e_rt = en[_PAIR_KEYS.get((r, t)) or _PAIR_KEYS[(t, r)]]
        residuals[r] = etau[r] - e_rs**2 - e_rt**2
    r_min = min(residuals.values())
    if check and r_min < -MONOGAMY_FAIL:
        worst = min(residuals, key=residuals.get)
        raise MonogamyViolation(
            f"residual contangle for mode {worst} is {r_min:.3e} (< -{MONOGAMY_FAIL:g})")
    report = EntanglementReport(
        en_cb1=en["en_cb1"], en_cb2=en["en_cb2"], en_b1b2=en["en_b1b2"],
        etau_1v2=etau, residuals=residuals, r_min=r_min, eta_minus=etas,
    )
    return r_min, report


def entanglement_report(cm, check=True) -> EntanglementReport:
    return residual_contangle_min(cm, check=check)[1]
