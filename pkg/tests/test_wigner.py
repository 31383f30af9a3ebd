import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sqzopto.covariance import CovarianceMatrix
from sqzopto.errors import DegenerateProjection
from sqzopto.pipeline import steady_cm
from sqzopto.wigner import QUADRATURES, contour_1e, project, sample_grid

VAC = CovarianceMatrix.from_matrix(0.5 * np.eye(6))


def test_vacuum_projection():
    g = project(VAC, "Q1", "P2")
    assert np.allclose(g.reduced_cm, 0.5 * np.eye(2))
    assert g.peak == pytest.approx(1 / math.pi)
    e = g.ellipse
    assert e.a == pytest.approx(1.0) and e.b == pytest.approx(1.0)
    assert not e.squeezed
    assert g.axis_labels == ("Q1", "P2")


def test_contour_level():
    v = np.array([[0.7, 0.2], [0.2, 0.3]])
    e = contour_1e(v)
    u = np.array([math.cos(e.angle), math.sin(e.angle)])
    w = np.array([-u[1], u[0]])
    inv = np.linalg.inv(v)
    for p in (e.a * u, e.b * w, -e.a * u):
        assert p @ inv @ p == pytest.approx(2.0)


@pytest.mark.parametrize("s", [0.2, 0.8])
def test_squeezed_vacuum_axes(s):
    e = contour_1e(np.diag([0.5 * math.exp(-2 * s), 0.5 * math.exp(2 * s)]))
    assert e.b == pytest.approx(math.exp(-s))
    assert e.a == pytest.approx(math.exp(s))
    assert e.squeezed
    assert abs(abs(e.angle) - math.pi / 2) < 1e-12


@given(st.floats(-1.5, 1.5))
def test_rotation_equivariance(alpha):
    v = np.diag([0.9, 0.2])
    R = np.array([[math.cos(alpha), -math.sin(alpha)], [math.sin(alpha), math.cos(alpha)]])
    e0, e1 = contour_1e(v), contour_1e(R @ v @ R.T)
    d = (e1.angle - e0.angle - alpha) % math.pi
    assert min(d, math.pi - d) < 1e-9
    assert e1.a == pytest.approx(e0.a) and e1.b == pytest.approx(e0.b)


def test_degenerate_projection():
    v = 0.5 * np.eye(6)
    v[2, 2] = 0.0
    with pytest.raises(DegenerateProjection):
        project(CovarianceMatrix(v=v, min_symplectic_eigenvalue=0.0), "Q1", "P1")
    with pytest.raises(ValueError):
        project(VAC, "X", "X")


def test_grid_normalization_and_peak():
    g = project(VAC, "X", "Y")
    px, py, w = sample_grid(g, 6.0, 201)
    assert w[100, 100] == pytest.approx(1 / math.pi)
    h = px[1] - px[0]
    assert w.sum() * h * h == pytest.approx(1.0, abs=1e-3)
    assert np.all(w >= 0)
    with pytest.raises(ValueError):
        sample_grid(g, 1.0, 1)


def test_grid_normalization_on_steady_states(random_models):
    for m in random_models[:5]:
        g = project(steady_cm(m), "Q1", "P2")
        px, _, w = sample_grid(g, 6 * g.ellipse.a, 201)
        h = px[1] - px[0]
        assert w.sum() * h * h == pytest.approx(1.0, abs=1e-3)


def test_marginal_consistency(random_models):
    cm = steady_cm(random_models[3])
    for i, qi in enumerate(QUADRATURES):
        for j, qj in enumerate(QUADRATURES):
            if i < j:
                g = project(cm, qi, qj)
                assert g.reduced_cm[0, 0] == pytest.approx(cm.v[i, i], abs=1e-12)
                assert g.reduced_cm[1, 1] == pytest.approx(cm.v[j, j], abs=1e-12)
                lam = np.linalg.eigvalsh(g.reduced_cm)[0]
                assert g.ellipse.squeezed == (lam < 0.5 - 1e-9 * 0.5) or abs(lam - 0.5) < 1e-8
