"""Second-moment dynamics dX/dt = M X + N of the linearized three-mode system.

The 24 moments are ordered (1-based, as in the component names used
throughout the package)::

    x1  c+c     x2  cc+     x3  b1+b1   x4  b1b1+   x5  b2+b2   x6  b2b2+
    x7  cc      x8  c+c+    x9  b1b1    x10 b1+b1+  x11 b2b2    x12 b2+b2+
    x13 cb1     x14 c+b1+   x15 cb1+    x16 c+b1    x17 cb2     x18 c+b2+
    x19 cb2+    x20 c+b2    x21 b1b2    x22 b1+b2+  x23 b1b2+   x24 b1+b2

The drift is assembled from a table of the scalar moment equations. An
explicit line-by-line evaluation of the same equations, :func:`ode_rhs`, is
kept as an independent oracle for it.
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SingularSystem, StepTooLarge, Unstable
from .meanfield import LinearizedModel

__all__ = [
    "MomentState",
    "MOMENT_LABELS",
    "CONJUGATE_PAIRS",
    "STABILITY_MARGIN",
    "build_drift",
    "ode_rhs",
    "stability",
    "steady_moments",
    "evolve_moments",
]

MOMENT_LABELS = (
    "c+c", "cc+", "b1+b1", "b1b1+", "b2+b2", "b2b2+",
    "cc", "c+c+", "b1b1", "b1+b1+", "b2b2", "b2+b2+",
    "cb1", "c+b1+", "cb1+", "c+b1", "cb2", "c+b2+",
    "cb2+", "c+b2", "b1b2", "b1+b2+", "b1b2+", "b1+b2",
)

# (k, l) 1-based with x_l = conj(x_k) for hermitian moments
CONJUGATE_PAIRS = ((7, 8), (9, 10), (11, 12), (13, 14), (15, 16),
                   (17, 18), (19, 20), (21, 22), (23, 24))

STABILITY_MARGIN = 1e-9
REFINE_STEPS = 3

# Off-diagonal terms. "+2L1c 13" in row r means  dx_r/dt += 2i * conj(L1) * x13.
# L = Lambda_j, em = chi e^{-i phi} (= nu), ep = chi e^{+i phi} (= nu*).
_TERMS = """
1:  +L1 14  +L1 16  -L1c 15  -L1c 13  +L2 18  +L2 20  -L2c 19  -L2c 17
2:  -L1c 13 -L1c 15 +L1 16   +L1 14   -L2c 17 -L2c 19 +L2 20   +L2 18
3:  +L1 14  +L1c 15 -L1 16   -L1c 13  -em 24  +ep 23
4:  -L1c 13 -L1 16  +L1c 15  +L1 14   +ep 23  -em 24
5:  +L2 18  +L2c 19 -L2 20   -L2c 17  +em 24  -ep 23
6:  -L2c 17 -L2 20  +L2c 19  +L2 18   -ep 23  +em 24
7:  +2L1 15  +2L1 13  +2L2 19  +2L2 17
8:  -2L1c 16 -2L1c 14 -2L2c 20 -2L2c 18
9:  +2L1 16  +2L1c 13 -2em 21
10: -2L1c 15 -2L1 14  +2ep 22
11: +2L2 20  +2L2c 17 -2ep 21
12: -2L2c 19 -2L2 18  +2em 22
13: +L1 1   +L1 4   +L1 9   +L1c 7  +L2 23  +L2 21  -em 17
14: -L1c 2  -L1c 3  -L1c 10 -L1 8   -L2c 24 -L2c 22 +ep 18
15: +L1 10  -L1 1   +L1 3   -L1c 7  +L2 22  +L2 24  +ep 19
16: -L1c 9  +L1c 2  -L1c 4  +L1 8   -L2c 21 -L2c 23 -em 20
17: +L2 1   +L2 6   +L2 11  +L2c 7  +L1 24  +L1 21  -ep 13
18: -L2c 2  -L2c 5  -L2c 12 -L2 8   -L1c 23 -L1c 22 +em 14
19: +L2 12  -L2 1   +L2 5   -L2c 7  +L1 22  +L1 23  +em 15
20: -L2c 11 +L2c 2  -L2c 6  +L2 8   -L1c 21 -L1c 24 -ep 16
21: +L1 20  +L1c 17 +L2 16  +L2c 13 -ep 9   -em 11
22: -L1c 19 -L1 18  -L2c 15 -L2 14  +em 10  +ep 12
23: +L1 18  +L1c 19 -L2 16  -L2c 13 +em 4   -em 6
24: -L1c 17 -L1 20  +L2c 15 +L2 14  -ep 3   +ep 5
"""

_TERM_RE = re.compile(r"([+-])(\d?)(L1c|L2c|L1|L2|em|ep)\s+(\d+)")


def _parse_terms(text):
    table = []
    for line in text.strip().splitlines():
        head, body = line.split(":", 1)
        row = int(head) - 1
        for sign, mult, sym, col in _TERM_RE.findall(body):
            factor = (1 if sign == "+" else -1) * (int(mult) if mult else 1)
            table.append((row, int(col) - 1, factor, sym))
    return tuple(table)


_TERM_TABLE = _parse_terms(_TERMS)


def _diagonal(m: LinearizedModel):
    """Diagonal drift entries, -(i f + d) for rows of annihilation type."""
    D, w1, w2 = m.delta_s, m.omega_m1, m.omega_m2
    k, g1, g2 = m.kappa, m.gamma_m1, m.gamma_m2
    # (frequency, decay, sign of the frequency term)
    entries = [
        (0, k, 1), (0, k, 1), (0, g1, 1), (0, g1, 1), (0, g2, 1), (0, g2, 1),
        (2 * D, k, -1), (2 * D, k, 1),
        (2 * w1, g1, -1), (2 * w1, g1, 1),
        (2 * w2, g2, -1), (2 * w2, g2, 1),
        (D + w1, (k + g1) / 2, -1), (D + w1, (k + g1) / 2, 1),
        (D - w1, (k + g1) / 2, -1), (D - w1, (k + g1) / 2, 1),
        (D + w2, (k + g2) / 2, -1), (D + w2, (k + g2) / 2, 1),
        (D - w2, (k + g2) / 2, -1), (D - w2, (k + g2) / 2, 1),
        (w1 + w2, (g1 + g2) / 2, -1), (w1 + w2, (g1 + g2) / 2, 1),
        (w1 - w2, (g1 + g2) / 2, -1), (w1 - w2, (g1 + g2) / 2, 1),
    ]
    return np.array([s * 1j * f - d for f, d, s in entries])


def build_drift(model: LinearizedModel):
    """Drift matrix M (24x24 complex) and drive vector N (24 complex)."""
    nu = complex(model.nu)
    sym = {
        "L1": complex(model.lambda_1),
        "L1c": complex(np.conj(model.lambda_1)),
        "L2": complex(model.lambda_2),
        "L2c": complex(np.conj(model.lambda_2)),
        "em": nu,
        "ep": nu.conjugate(),
    }
    drift = np.diag(_diagonal(model)).astype(complex)
    for row, col, factor, s in _TERM_TABLE:
        drift[row, col] += 1j * factor * sym[s]

    k, g1, g2 = model.kappa, model.gamma_m1, model.gamma_m2
    drive = np.zeros(24, dtype=complex)
    drive[:8] = [
        k * model.N_s, k * (model.N_s + 1),
        g1 * model.nbar_m1, g1 * (model.nbar_m1 + 1),
        g2 * model.nbar_m2, g2 * (model.nbar_m2 + 1),
        k * np.conj(model.M_s), k * model.M_s,
    ]
    return drift, drive


def ode_rhs(x, model: LinearizedModel):
    """Right-hand sides of the 24 moment equations, written out one by one.

    Independent of :func:`build_drift`; used to check it term by term.
    """
    x = np.concatenate([[0], np.asarray(x, dtype=complex)])
    I = 1j
    D, w1, w2 = model.delta_s, model.omega_m1, model.omega_m2
    k, g1, g2 = model.kappa, model.gamma_m1, model.gamma_m2
    L1, L2 = model.lambda_1, model.lambda_2
    L1c, L2c = np.conj(L1), np.conj(L2)
    em, ep = model.nu, np.conj(model.nu)
    Ns, Ms, n1, n2 = model.N_s, model.M_s, model.nbar_m1, model.nbar_m2
    d = np.zeros(25, dtype=complex)
    d[1] = (-k*x[1] + I*L1*x[14] + I*L1*x[16] - I*L1c*x[15] - I*L1c*x[13]
            + I*L2*x[18] + I*L2*x[20] - I*L2c*x[19] - I*L2c*x[17] + k*Ns)
    d[2] = (-k*x[2] - I*L1c*x[13] - I*L1c*x[15] + I*L1*x[16] + I*L1*x[14]
            - I*L2c*x[17] - I*L2c*x[19] + I*L2*x[20] + I*L2*x[18] + k*(Ns + 1))
    d[3] = (-g1*x[3] + I*L1*x[14] + I*L1c*x[15] - I*L1*x[16] - I*L1c*x[13]
            - I*em*x[24] + I*ep*x[23] + g1*n1)
    d[4] = (-g1*x[4] - I*L1c*x[13] - I*L1*x[16] + I*L1c*x[15] + I*L1*x[14]
            + I*ep*x[23] - I*em*x[24] + g1*(n1 + 1))
    d[5] = (-g2*x[5] + I*L2*x[18] + I*L2c*x[19] - I*L2*x[20] - I*L2c*x[17]
            + I*em*x[24] - I*ep*x[23] + g2*n2)
    d[6] = (-g2*x[6] - I*L2c*x[17] - I*L2*x[20] + I*L2c*x[19] + I*L2*x[18]
            - I*ep*x[23] + I*em*x[24] + g2*(n2 + 1))
    d[7] = (-(2*I*D + k)*x[7] + 2*I*L1*x[15] + 2*I*L1*x[13] + 2*I*L2*x[19]
            + 2*I*L2*x[17] + k*np.conj(Ms))
    d[8] = ((2*I*D - k)*x[8] - 2*I*L1c*x[16] - 2*I*L1c*x[14] - 2*I*L2c*x[20]
            - 2*I*L2c*x[18] + k*Ms)
    d[9] = -(2*I*w1 + g1)*x[9] + 2*I*L1*x[16] + 2*I*L1c*x[13] - 2*I*em*x[21]
    d[10] = (2*I*w1 - g1)*x[10] - 2*I*L1c*x[15] - 2*I*L1*x[14] + 2*I*ep*x[22]
    d[11] = -(2*I*w2 + g2)*x[11] + 2*I*L2*x[20] + 2*I*L2c*x[17] - 2*I*ep*x[21]
    d[12] = (2*I*w2 - g2)*x[12] - 2*I*L2c*x[19] - 2*I*L2*x[18] + 2*I*em*x[22]
    d[13] = (-(I*(D + w1) + (k + g1)/2)*x[13] + I*L1*x[1] + I*L1*x[4] + I*L1*x[9]
             + I*L1c*x[7] + I*L2*x[23] + I*L2*x[21] - I*em*x[17])
    d[14] = ((I*(D + w1) - (k + g1)/2)*x[14] - I*L1c*x[2] - I*L1c*x[3] - I*L1c*x[10]
             - I*L1*x[8] - I*L2c*x[24] - I*L2c*x[22] + I*ep*x[18])
    d[15] = (-(I*(D - w1) + (k + g1)/2)*x[15] + I*L1*x[10] - I*L1*x[1] + I*L1*x[3]
             - I*L1c*x[7] + I*L2*x[22] + I*L2*x[24] + I*ep*x[19])
    d[16] = ((I*(D - w1) - (k + g1)/2)*x[16] - I*L1c*x[9] + I*L1c*x[2] - I*L1c*x[4]
             + I*L1*x[8] - I*L2c*x[21] - I*L2c*x[23] - I*em*x[20])
    d[17] = (-(I*(D + w2) + (k + g2)/2)*x[17] + I*L2*x[1] + I*L2*x[6] + I*L2*x[11]
             + I*L2c*x[7] + I*L1*x[24] + I*L1*x[21] - I*ep*x[13])
    d[18] = ((I*(D + w2) - (k + g2)/2)*x[18] - I*L2c*x[2] - I*L2c*x[5] - I*L2c*x[12]
             - I*L2*x[8] - I*L1c*x[23] - I*L1c*x[22] + I*em*x[14])
    d[19] = (-(I*(D - w2) + (k + g2)/2)*x[19] + I*L2*x[12] - I*L2*x[1] + I*L2*x[5]
             - I*L2c*x[7] + I*L1*x[22] + I*L1*x[23] + I*em*x[15])
    d[20] = ((I*(D - w2) - (k + g2)/2)*x[20] - I*L2c*x[11] + I*L2c*x[2] - I*L2c*x[6]
             + I*L2*x[8] - I*L1c*x[21] - I*L1c*x[24] - I*ep*x[16])
    d[21] = (-(I*(w1 + w2) + (g1 + g2)/2)*x[21] + I*L1*x[20] + I*L1c*x[17]
             + I*L2*x[16] + I*L2c*x[13] - I*ep*x[9] - I*em*x[11])
    d[22] = ((I*(w1 + w2) - (g1 + g2)/2)*x[22] - I*L1c*x[19] - I*L1*x[18]
             - I*L2c*x[15] - I*L2*x[14] + I*em*x[10] + I*ep*x[12])
    d[23] = (-(I*(w1 - w2) + (g1 + g2)/2)*x[23] + I*L1*x[18] + I*L1c*x[19]
             - I*L2*x[16] - I*L2c*x[13] + I*em*x[4] - I*em*x[6])
    d[24] = ((I*(w1 - w2) - (g1 + g2)/2)*x[24] - I*L1c*x[17] - I*L1*x[20]
             + I*L2c*x[15] + I*L2*x[14] - I*ep*x[3] + I*ep*x[5])
    return d[1:]


def stability(drift, margin=STABILITY_MARGIN):
    """Return ``(stable, spectral_abscissa)``; stable iff abscissa < -margin."""
    abscissa = float(np.max(np.linalg.eigvals(drift).real))
    return abscissa < -margin, abscissa


@dataclass(frozen=True)
class MomentState:
    x: np.ndarray
    drift: np.ndarray
    drive: np.ndarray
    spectral_abscissa: float

    def __getitem__(self, k):
        """1-based access, ``state[7]`` is x7 = <cc>."""
        if not 1 <= k <= 24:
            raise IndexError(k)
        return self.x[k - 1]

    def hermiticity_defect(self):
        """Largest violation of the commutator and conjugate-pair identities."""
        x = self.x
        d = [abs(x[1] - x[0] - 1), abs(x[3] - x[2] - 1), abs(x[5] - x[4] - 1)]
        d += [abs(x[l - 1] - np.conj(x[k - 1])) for k, l in CONJUGATE_PAIRS]
        d += [abs(x[i].imag) for i in range(6)]
        return float(max(d))


def steady_moments(drift, drive, check_stability=True):
    """Solve ``drift @ x + drive = 0`` with a pivoted LU factorization.

    Raises
    ------
    Unstable
        If the spectral abscissa is not below ``-STABILITY_MARGIN``.
    SingularSystem
        If the factorization is singular, or the back-substituted residual
        exceeds ``1e-10 * ||drive||_inf``.
    """
    drift = np.asarray(drift, dtype=complex)
    drive = np.asarray(drive, dtype=complex)
    stable, abscissa = stability(drift)
    if check_stability and not stable:
        raise Unstable(f"drift not asymptotically stable (abscissa {abscissa:.3e})",
                       spectral_abscissa=abscissa)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu = scipy.linalg.lu_factor(drift, check_finite=True)
    except ValueError as exc:
        raise SingularSystem(f"drift factorization failed: {exc}") from exc
    if np.min(np.abs(np.diag(lu[0]))) == 0.0:
        raise SingularSystem("drift matrix is exactly singular")
    x = scipy.linalg.lu_solve(lu, -drive)
    # the slow mechanical modes (gamma ~ 1e-5) make the system ill-conditioned;
    # refine against a residual computed in extended precision
    m_ext = drift.astype(np.clongdouble)
    n_ext = drive.astype(np.clongdouble)
    for _ in range(REFINE_STEPS):
        r = -(m_ext @ x.astype(np.clongdouble) + n_ext)
        x = x + scipy.linalg.lu_solve(lu, r.astype(complex))
    scale = np.max(np.abs(drive))
    resid = np.max(np.abs(drift @ x + drive))
    if not np.all(np.isfinite(x)) or resid > 1e-10 * scale:
        raise SingularSystem(f"steady-state residual {resid:.3e} too large")
    return MomentState(x=x, drift=drift, drive=drive, spectral_abscissa=abscissa)


def _rk4_affine(drift, drive, h):
    """One RK4 step of x' = Mx + N written as x -> P x + q."""
    n = drift.shape[0]
    hm = h * drift
    hm2 = hm @ hm
    hm3 = hm2 @ hm
    eye = np.eye(n)
    P = eye + hm + hm2 / 2 + hm3 / 6 + hm3 @ hm / 24
    q = h * (eye + hm / 2 + hm2 / 6 + hm3 / 24) @ drive
    return P, q


def evolve_moments(drift, drive, x0, t_final, dt):
    """Fixed-step classical RK4 integration of dX/dt = drift X + drive.

    The system is linear, so one RK4 step is an affine map x -> P x + q and
    ``n = ceil(t_final / dt)`` steps are applied by binary powering of the
    augmented matrix [[P, q], [0, 1]]. The result equals stepping n times,
    at O(log n) cost. The step actually used is ``t_final / n <= dt``.
    """
    drift = np.asarray(drift, dtype=complex)
    drive = np.asarray(drive, dtype=complex)
    x0 = np.asarray(x0, dtype=complex)
    norm = np.max(np.sum(np.abs(drift), axis=1))
    if dt <= 0:
        raise StepTooLarge("dt must be positive")
    if norm > 0 and dt > 0.05 / norm:
        raise StepTooLarge(f"dt = {dt:g} exceeds 0.05/||M||_inf = {0.05 / norm:g}")
    _, abscissa = stability(drift)
    n_steps = max(1, math.ceil(t_final / dt)) if t_final > 0 else 0
    dim = drift.shape[0]
    if n_steps == 0:
        return MomentState(x=x0.copy(), drift=drift, drive=drive, spectral_abscissa=abscissa)

    P, q = _rk4_affine(drift, drive, t_final / n_steps)
    step = np.zeros((dim + 1, dim + 1), dtype=complex)
    step[:dim, :dim] = P
    step[:dim, dim] = q
    step[dim, dim] = 1.0
    acc = np.eye(dim + 1, dtype=complex)
    k = n_steps
    while k:
        if k & 1:
            acc = step @ acc
        k >>= 1
        if k:
            step = step @ step
    y = acc @ np.concatenate([x0, [1.0]])
    return MomentState(x=y[:dim], drift=drift, drive=drive, spectral_abscissa=abscissa)

