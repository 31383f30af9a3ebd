"""Two-dimensional Gaussian Wigner projections and their 1/e contours.

For W(p) proportional to exp(-p^T V^-1 p / 2), the 1/e level is the ellipse
p^T V^-1 p = 2. The vacuum (V = I/2) contour is the unit circle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateProjection

__all__ = ["QUADRATURES", "Ellipse", "Gaussian2D", "project", "contour_1e", "sample_grid"]

QUADRATURES = ("X", "Y", "Q1", "P1", "Q2", "P2")
DET_FLOOR = 1e-14
SQUEEZE_TOL = 1e-9


@dataclass(frozen=True)
class Ellipse:
    a: float  # major semi-axis
    b: float  # minor semi-axis
    angle: float  # direction of the major axis, radians in (-pi/2, pi/2]
    squeezed: bool

    def to_dict(self):
        return {"a": self.a, "b": self.b, "angle_rad": self.angle, "squeezed": self.squeezed}


@dataclass(frozen=True)
class Gaussian2D:
    reduced_cm: np.ndarray
    axis_labels: tuple
    peak: float
    ellipse: Ellipse

    def __call__(self, px, py):
        inv = np.linalg.inv(self.reduced_cm)
        px, py = np.asarray(px), np.asarray(py)
        quad = inv[0, 0] * px**2 + 2 * inv[0, 1] * px * py + inv[1, 1] * py**2
        return self.peak * np.exp(-0.5 * quad)


def _index(q):
    if isinstance(q, str):
        try:
            return QUADRATURES.index(q)
        except ValueError:
            raise ValueError(f"unknown quadrature {q!r}; expected one of {QUADRATURES}") from None
    return int(q)


def contour_1e(g) -> Ellipse:
    """Semi-axes sqrt(2 lambda_i) and orientation of the 1/e contour."""
    v = np.asarray(getattr(g, "reduced_cm", g), dtype=float)
    lam, vec = np.linalg.eigh(v)
    b, a = math.sqrt(2.0 * max(lam[0], 0.0)), math.sqrt(2.0 * lam[1])
    angle = math.atan2(vec[1, 1], vec[0, 1])
    # fold to (-pi/2, pi/2]: the ellipse is symmetric under p -> -p
    if angle <= -math.pi / 2:
        angle += math.pi
    elif angle > math.pi / 2:
        angle -= math.pi
    return Ellipse(a=a, b=b, angle=angle, squeezed=b < 1.0 - SQUEEZE_TOL)


def project(cm, qi, qj) -> Gaussian2D:
    """Marginal Wigner function of quadratures ``qi``, ``qj``."""
    i, j = _index(qi), _index(qj)
    if i == j:
        raise ValueError("quadratures must differ")
    v = np.asarray(getattr(cm, "v", cm), dtype=float)
    sub = v[np.ix_([i, j], [i, j])].copy()
    det = float(np.linalg.det(sub))
    if det <= DET_FLOOR:
        raise DegenerateProjection(f"projected covariance determinant {det:.3e} <= {DET_FLOOR:g}")
    return Gaussian2D(
        reduced_cm=sub,
        axis_labels=(QUADRATURES[i], QUADRATURES[j]),
        peak=1.0 / (2.0 * math.pi * math.sqrt(det)),
        ellipse=contour_1e(sub),
    )


def sample_grid(g: Gaussian2D, half_width, n):
    """W on an n x n uniform grid over [-half_width, half_width]^2.

    Returns ``(px, py, w)`` with ``w[i, j] = W(px[i], py[j])``.
    """
    if n < 2 or half_width <= 0:
        raise ValueError("need n >= 2 and half_width > 0")
    axis = np.linspace(-half_width, half_width, int(n))
    px, py = np.meshgrid(axis, axis, indexing="ij")
    return axis, axis.copy(), g(px, py)
