"""Quadrature covariance matrix of the three-mode Gaussian steady state.

Quadratures are ordered (X, Y, Q1, P1, Q2, P2) with X = (c + c+)/sqrt(2),
Y = i(c+ - c)/sqrt(2), and likewise for the mirrors. The vacuum has all
variances equal to 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitianMoments

__all__ = [
    "CovarianceMatrix",
    "MODES",
    "VACUUM_VARIANCE",
    "PHYSICALITY_TOL",
    "symplectic_form",
    "assemble_cm",
    "symplectic_eigenvalues",
    "physicality",
    "reduce",
    "mode_slice",
]

MODES = ("c", "b1", "b2")
VACUUM_VARIANCE = 0.5
PHYSICALITY_TOL = 1e-9
HERMITICITY_TOL = 1e-10


def symplectic_form(n_modes):
    """Block-diagonal symplectic form with blocks [[0, 1], [-1, 0]]."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(v):
    """Symplectic eigenvalues of ``v``, ascending, one per mode.

    Computed from |eig(i Omega v)|, whose values come in equal pairs.
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0] // 2
    ev = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ v)))
    return 0.5 * (ev[0::2] + ev[1::2])


@dataclass(frozen=True)
class CovarianceMatrix:
    v: np.ndarray
    min_symplectic_eigenvalue: float

    @classmethod
    def from_matrix(cls, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (6, 6):
            raise ValueError(f"expected a 6x6 matrix, got {v.shape}")
        v = 0.5 * (v + v.T)
        return cls(v=v, min_symplectic_eigenvalue=float(symplectic_eigenvalues(v)[0]))

    def scaled(self, factor):
        return CovarianceMatrix.from_matrix(factor * self.v)


def _hermiticity_check(x, tol):
    scale = max(1.0, float(np.max(np.abs(x))))
    resid = [abs(x[i].imag) for i in (0, 2, 4)]
    resid += [abs(x[1] - x[0] - 1), abs(x[3] - x[2] - 1), abs(x[5] - x[4] - 1)]
    resid += [abs(x[l] - np.conj(x[k])) for k, l in
              ((6, 7), (8, 9), (10, 11), (12, 13), (14, 15), (16, 17), (18, 19), (20, 21), (22, 23))]
    worst = max(resid)
    if worst > tol * scale:
        raise NonHermitianMoments(
            f"moment vector violates conjugate pairing by {worst:.3e} (scale {scale:.3g})")


def assemble_cm(moments, tol=HERMITICITY_TOL) -> CovarianceMatrix:
    """Covariance matrix from the moment vector.

    ``moments`` may be a :class:`~sqzopto.moments.MomentState` or a plain
    length-24 array. The hermiticity tolerance is relative to
    max(1, ||x||_inf), since thermal occupations of order 100 carry
    proportionally larger round-off.
    """
    x = np.asarray(getattr(moments, "x", moments), dtype=complex)
    if x.shape != (24,):
        raise ValueError(f"expected 24 moments, got shape {x.shape}")
    _hermiticity_check(x, tol)
    R, I = np.real, np.imag
    x1, x3, x5 = R(x[0]), R(x[2]), R(x[4])
    x7, x9, x11 = x[6], x[8], x[10]
    x13, x15, x17, x19, x21, x23 = x[12], x[14], x[16], x[18], x[20], x[22]

    V = np.zeros((6, 6))
    V[0, 0] = R(x7) + x1 + 0.5
    V[1, 1] = -R(x7) + x1 + 0.5
    V[2, 2] = R(x9) + x3 + 0.5
    V[3, 3] = -R(x9) + x3 + 0.5
    V[4, 4] = R(x11) + x5 + 0.5
    V[5, 5] = -R(x11) + x5 + 0.5
    V[0, 1] = I(x7)
    V[2, 3] = I(x9)
    V[4, 5] = I(x11)
    V[0, 2] = R(x13) + R(x15)
    V[0, 3] = I(x13) - I(x15)
    V[0, 4] = R(x17) + R(x19)
    V[0, 5] = I(x17) - I(x19)
    V[1, 2] = I(x13) + I(x15)
    V[1, 3] = -R(x13) + R(x15)
    V[1, 4] = I(x17) + I(x19)
    V[1, 5] = -R(x17) + R(x19)
    V[2, 4] = R(x21) + R(x23)
    V[2, 5] = I(x21) - I(x23)
    V[3, 4] = I(x21) + I(x23)
    V[3, 5] = -R(x21) + R(x23)
    V = np.triu(V) + np.triu(V, 1).T
    return CovarianceMatrix(v=V, min_symplectic_eigenvalue=float(symplectic_eigenvalues(V)[0]))


def physicality(cm, tol=PHYSICALITY_TOL):
    """``(ok, min_symplectic_eigenvalue)``; ok iff every value >= 1/2 - tol."""
    v = getattr(cm, "v", cm)
    nu_min = float(symplectic_eigenvalues(v)[0])
    return nu_min >= VACUUM_VARIANCE - tol, nu_min


def mode_slice(mode):
    """Quadrature indices of a mode name ('c', 'b1', 'b2') or index (0, 1, 2)."""
    i = MODES.index(mode) if isinstance(mode, str) else int(mode)
    if not 0 <= i < 3:
        raise ValueError(f"unknown mode {mode!r}")
    return [2 * i, 2 * i + 1]


def reduce(cm, mode_pair):
    """Two-mode reduced covariance matrix.

    Parameters
    ----------
    cm : CovarianceMatrix or ndarray
    mode_pair : pair of distinct mode names or indices

    Returns
    -------
    (A, B, C, V4)
        2x2 blocks of the first mode, second mode and their correlations,
        and the assembled 4x4 matrix [[A, C], [C.T, B]].
    """
    a, b = mode_pair
    ia, ib = mode_slice(a), mode_slice(b)
    if ia == ib:
        raise ValueError("mode pair must be distinct")
    v = np.asarray(getattr(cm, "v", cm))
    idx = ia + ib
    v4 = v[np.ix_(idx, idx)]
    return v4[:2, :2], v4[2:, 2:], v4[:2, 2:], v4
