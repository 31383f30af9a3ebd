import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sqzopto.errors import SingularSystem, StepTooLarge, Unstable
from sqzopto.meanfield import LinearizedModel, build_linearized
from sqzopto.moments import (MOMENT_LABELS, build_drift, evolve_moments, ode_rhs, stability,
                             steady_moments)
from sqzopto.params import FIG1_PARAMS
from sqzopto.pipeline import random_model

# b1 <-> b2 relabeling of the moment vector (0-based)
SWAP_MIRRORS = [0, 1, 4, 5, 2, 3, 6, 7, 10, 11, 8, 9, 16, 17, 18, 19, 12, 13, 14, 15, 20, 21, 23, 22]


def decoupled(**kw):
    base = dict(delta_s=0.8, lambda_1=0j, lambda_2=0j, nu=0j, kappa=0.9, gamma_m1=0.01,
                gamma_m2=0.02, N_s=0.0, M_s=0j, nbar_m1=100.0, nbar_m2=100.0,
                omega_m1=1.0, omega_m2=1.2)
    base.update(kw)
    return LinearizedModel(**base)


# --- independent reference constructions -------------------------------------------------

def printed_matrix(m):
    """The drift as a table of (row, col) entries, in the layout of the printed matrix."""
    I = 1j
    a, ac, b, bc = m.lambda_1, np.conj(m.lambda_1), m.lambda_2, np.conj(m.lambda_2)
    n, nc = m.nu, np.conj(m.nu)
    D, w1, w2, k, g1, g2 = m.delta_s, m.omega_m1, m.omega_m2, m.kappa, m.gamma_m1, m.gamma_m2
    O1 = lambda s: 2*I*D + s*k
    O2 = lambda s: 2*I*w1 + s*g1
    O3 = lambda s: 2*I*w2 + s*g2
    O4 = lambda s: I*(D + w1) + s*(k + g1)/2
    O5 = lambda s: I*(D - w1) + s*(k + g1)/2
    O6 = lambda s: I*(D + w2) + s*(k + g2)/2
    O7 = lambda s: I*(D - w2) + s*(k + g2)/2
    O8 = lambda s: I*(w1 + w2) + s*(g1 + g2)/2
    O9 = lambda s: I*(w1 - w2) + s*(g1 + g2)/2
    rows = {
        1: {1: -k, 13: -I*ac, 14: I*a, 15: -I*ac, 16: I*a, 17: -I*bc, 18: I*b, 19: -I*bc, 20: I*b},
        2: {2: -k, 13: -I*ac, 14: I*a, 15: -I*ac, 16: I*a, 17: -I*bc, 18: I*b, 19: -I*bc, 20: I*b},
        3: {3: -g1, 13: -I*ac, 14: I*a, 15: I*ac, 16: -I*a, 23: I*nc, 24: -I*n},
        4: {4: -g1, 13: -I*ac, 14: I*a, 15: I*ac, 16: -I*a, 23: I*nc, 24: -I*n},
        5: {5: -g2, 17: -I*bc, 18: I*b, 19: I*bc, 20: -I*b, 23: -I*nc, 24: I*n},
        6: {6: -g2, 17: -I*bc, 18: I*b, 19: I*bc, 20: -I*b, 23: -I*nc, 24: I*n},
        7: {7: -O1(1), 13: 2*I*a, 15: 2*I*a, 17: 2*I*b, 19: 2*I*b},
        8: {8: O1(-1), 14: -2*I*ac, 16: -2*I*ac, 18: -2*I*bc, 20: -2*I*bc},
        9: {9: -O2(1), 13: 2*I*ac, 16: 2*I*a, 21: -2*I*n},
        10: {10: O2(-1), 14: -2*I*a, 15: -2*I*ac, 22: 2*I*nc},
        11: {11: -O3(1), 17: 2*I*bc, 20: 2*I*b, 21: -2*I*nc},
        12: {12: O3(-1), 18: -2*I*b, 19: -2*I*bc, 22: 2*I*n},
        13: {1: I*a, 4: I*a, 7: I*ac, 9: I*a, 13: -O4(1), 17: -I*n, 21: I*b, 23: I*b},
        14: {2: -I*ac, 3: -I*ac, 8: -I*a, 10: -I*ac, 14: O4(-1), 18: I*nc, 22: -I*bc, 24: -I*bc},
        15: {1: -I*a, 3: I*a, 7: -I*ac, 10: I*a, 15: -O5(1), 19: I*nc, 22: I*b, 24: I*b},
        16: {2: I*ac, 4: -I*ac, 8: I*a, 9: -I*ac, 16: O5(-1), 20: -I*n, 21: -I*bc, 23: -I*bc},
        17: {1: I*b, 6: I*b, 7: I*bc, 11: I*b, 13: -I*nc, 17: -O6(1), 21: I*a, 24: I*a},
        18: {2: -I*bc, 5: -I*bc, 8: -I*b, 12: -I*bc, 14: I*n, 18: O6(-1), 22: -I*ac, 23: -I*ac},
        19: {1: -I*b, 5: I*b, 7: -I*bc, 12: I*b, 15: I*n, 19: -O7(1), 22: I*a, 23: I*a},
        20: {2: I*bc, 6: -I*bc, 8: I*b, 11: -I*bc, 16: -I*nc, 20: O7(-1), 21: -I*ac, 24: -I*ac},
        21: {9: -I*nc, 11: -I*n, 13: I*bc, 16: I*b, 17: I*ac, 20: I*a, 21: -O8(1)},
        22: {10: I*n, 12: I*nc, 14: -I*b, 15: -I*bc, 18: -I*a, 19: -I*ac, 22: O8(-1)},
        23: {4: I*n, 6: -I*n, 13: -I*bc, 16: -I*b, 18: I*a, 19: I*ac, 23: -O9(1)},
        24: {3: -I*nc, 5: I*nc, 14: I*b, 15: I*bc, 17: -I*ac, 20: -I*a, 24: O9(-1)},
    }
    M = np.zeros((24, 24), complex)
    for r, d in rows.items():
        for c, v in d.items():
            M[r - 1, c - 1] = v
    return M


# operator order (c, c+, b1, b1+, b2, b2+); moment x_r = <O_i O_j>
PAIRS = [(1, 0), (0, 1), (3, 2), (2, 3), (5, 4), (4, 5), (0, 0), (1, 1), (2, 2), (3, 3), (4, 4),
         (5, 5), (0, 2), (1, 3), (0, 3), (1, 2), (0, 4), (1, 5), (0, 5), (1, 4), (2, 4), (3, 5),
         (2, 5), (3, 4)]


def langevin_drift(m):
    """Moment drift derived from the linear Heisenberg-Langevin equations dO = A O."""
    L1, L2, nu = m.lambda_1, m.lambda_2, m.nu
    D, w1, w2, k, g1, g2 = m.delta_s, m.omega_m1, m.omega_m2, m.kappa, m.gamma_m1, m.gamma_m2
    A = np.zeros((6, 6), complex)
    A[0, 0] = -(1j*D + k/2); A[0, 2] = A[0, 3] = 1j*L1; A[0, 4] = A[0, 5] = 1j*L2
    A[1, 1] = 1j*D - k/2; A[1, 2] = A[1, 3] = -1j*np.conj(L1); A[1, 4] = A[1, 5] = -1j*np.conj(L2)
    A[2, 2] = -(1j*w1 + g1/2); A[2, 4] = -1j*nu; A[2, 1] = 1j*L1; A[2, 0] = 1j*np.conj(L1)
    A[3, 3] = 1j*w1 - g1/2; A[3, 5] = 1j*np.conj(nu); A[3, 1] = -1j*L1; A[3, 0] = -1j*np.conj(L1)
    A[4, 4] = -(1j*w2 + g2/2); A[4, 2] = -1j*np.conj(nu); A[4, 1] = 1j*L2; A[4, 0] = 1j*np.conj(L2)
    A[5, 5] = 1j*w2 - g2/2; A[5, 3] = 1j*nu; A[5, 1] = -1j*L2; A[5, 0] = -1j*np.conj(L2)

    def idx(i, j):
        if (i, j) in PAIRS:
            return PAIRS.index((i, j))
        return PAIRS.index((j, i))  # different modes commute

    M = np.zeros((24, 24), complex)
    for r, (i, j) in enumerate(PAIRS):
        for q in range(6):
            if A[i, q]:
                M[r, idx(q, j)] += A[i, q]
            if A[j, q]:
                M[r, idx(i, q)] += A[j, q]
    return M


# --- drift construction --------------------------------------------------------------------

def test_labels():
    assert len(MOMENT_LABELS) == 24
    assert MOMENT_LABELS[0] == "c+c" and MOMENT_LABELS[23] == "b1+b2"


def test_drift_matches_ode_oracle(random_models, rng):
    worst = 0.0
    for m in random_models:
        M, N = build_drift(m)
        x = rng.normal(size=24) + 1j * rng.normal(size=24)
        worst = max(worst, np.max(np.abs(ode_rhs(x, m) - (M @ x + N))))
    assert worst < 1e-12


def test_drift_matches_printed_matrix(random_models):
    for m in random_models[:20]:
        assert np.max(np.abs(build_drift(m)[0] - printed_matrix(m))) < 1e-15


def test_steady_state_matches_langevin_route(random_models):
    # the two drifts differ off the commutator subspace but share the steady state
    for m in random_models[:20]:
        M, N = build_drift(m)
        x = steady_moments(M, N).x
        y = np.linalg.solve(langevin_drift(m), -N)
        assert np.max(np.abs(x - y)) < 1e-9 * max(1.0, np.max(np.abs(x)))


def test_drive_vector():
    m = decoupled(N_s=0.0, M_s=0j, nbar_m1=100.0, nbar_m2=100.0, gamma_m1=0.01, gamma_m2=0.01)
    _, N = build_drift(m)
    expected = np.zeros(24)
    expected[:6] = [0, 0.9, 1.0, 1.01, 1.0, 1.01]
    assert np.allclose(N, expected, atol=1e-15)
    _, N = build_drift(decoupled(N_s=0.3, M_s=0.2 + 0.1j))
    assert N[6] == pytest.approx(0.9 * (0.2 - 0.1j))
    assert N[7] == pytest.approx(0.9 * (0.2 + 0.1j))


def test_decoupled_drift_block_diagonal():
    M, _ = build_drift(decoupled())
    assert np.allclose(np.diag(M)[:6], [-0.9, -0.9, -0.01, -0.01, -0.02, -0.02])
    off = M - np.diag(np.diag(M))
    assert np.all(off == 0)


@given(st.integers(0, 10_000))
def test_drift_superposition(seed):
    # M is affine in (Lambda_1, Lambda_2, nu): M(a + b) = M(a) + M(b) - M(0)
    rng = np.random.default_rng(seed)
    m = random_model(rng)
    z = dataclasses.replace(m, lambda_1=0j, lambda_2=0j, nu=0j)
    a = dataclasses.replace(z, lambda_1=m.lambda_1)
    b = dataclasses.replace(z, lambda_2=m.lambda_2)
    c = dataclasses.replace(z, nu=m.nu)
    M = lambda mm: build_drift(mm)[0]
    assert np.max(np.abs(M(m) - (M(a) + M(b) + M(c) - 2 * M(z)))) < 1e-12


# --- stability -----------------------------------------------------------------------------

def test_decoupled_abscissa():
    # slowest moments are the mirror populations, decaying at gamma (not gamma/2)
    ok, ab = stability(build_drift(decoupled())[0])
    assert ok
    assert ab == pytest.approx(-0.01, rel=1e-9)


def test_no_dissipation_unstable():
    ok, ab = stability(build_drift(decoupled(kappa=0.0, gamma_m1=0.0, gamma_m2=0.0))[0])
    assert not ok and ab >= -1e-12


def test_fig1_point_stable():
    p = FIG1_PARAMS.with_changes(r_d=0.25, theta_d=math.pi, delta_theta=math.pi, delta_r=0.0)
    ok, _ = stability(build_drift(build_linearized(p, direct_G=1.0))[0])
    assert ok


def test_unstable_refused():
    m = decoupled(delta_s=-1.0, lambda_1=0.4 + 0j)  # blue-detuned, strong coupling
    M, N = build_drift(m)
    assert not stability(M)[0]
    with pytest.raises(Unstable) as info:
        steady_moments(M, N)
    assert info.value.spectral_abscissa > 0


def test_singular_system():
    M = np.zeros((24, 24), complex)
    M[0, 0] = -1.0
    with pytest.raises(SingularSystem):
        steady_moments(M, np.ones(24), check_stability=False)


# --- steady state --------------------------------------------------------------------------

def test_decoupled_thermal_mirror():
    x = steady_moments(*build_drift(decoupled(nbar_m1=100.0))).x
    assert x[2] == pytest.approx(100.0, rel=1e-12)
    assert x[3] == pytest.approx(101.0, rel=1e-12)


def test_decoupled_squeezed_cavity():
    m = decoupled(N_s=0.4, M_s=0.3 - 0.5j)
    x = steady_moments(*build_drift(m)).x
    assert x[0] == pytest.approx(0.4, rel=1e-12)
    assert x[6] == pytest.approx(0.9 * np.conj(m.M_s) / (2j * 0.8 + 0.9), rel=1e-12)


def test_hermiticity_invariants(random_models):
    for m in random_models:
        st_ = steady_moments(*build_drift(m))
        assert st_.hermiticity_defect() < 1e-10 * max(1.0, np.max(np.abs(st_.x)))
        assert st_[2] == st_.x[1]


def test_conjugation_symmetry(random_models):
    # complex conjugation of the whole linear system: (Delta, omega, Lambda, nu, M_s)
    # -> (-Delta, -omega, -Lambda*, -nu*, M_s*) maps X to X*
    for m in random_models[:20]:
        x = steady_moments(*build_drift(m)).x
        c = m.conjugated()
        mm = dataclasses.replace(c, delta_s=-m.delta_s, omega_m1=-m.omega_m1,
                                 omega_m2=-m.omega_m2, lambda_1=-c.lambda_1,
                                 lambda_2=-c.lambda_2, nu=-c.nu)
        y = steady_moments(*build_drift(mm)).x
        assert np.max(np.abs(y - np.conj(x))) < 1e-10 * max(1.0, np.max(np.abs(x)))


def test_mirror_swap_symmetry(random_models):
    for m in random_models[:20]:
        x = steady_moments(*build_drift(m)).x
        z = steady_moments(*build_drift(m.swapped_mirrors())).x
        assert np.max(np.abs(z - x[SWAP_MIRRORS])) < 1e-10 * max(1.0, np.max(np.abs(x)))


# --- integration ---------------------------------------------------------------------------

def test_evolve_zero():
    M, _ = build_drift(decoupled())
    out = evolve_moments(M, np.zeros(24), np.zeros(24), 10.0, 0.01)
    assert np.all(out.x == 0)


def test_evolve_scalar_decay():
    m = decoupled(gamma_m1=0.3, nbar_m1=2.0)
    M, N = build_drift(m)
    dt = 0.05 / np.max(np.sum(np.abs(M), axis=1))
    for t in (0.5, 3.0, 10.0):
        x = evolve_moments(M, N, np.zeros(24), t, dt).x
        assert x[2] == pytest.approx(2.0 * (1 - math.exp(-0.3 * t)), rel=1e-10)


def test_evolve_step_too_large():
    M, N = build_drift(decoupled())
    with pytest.raises(StepTooLarge):
        evolve_moments(M, N, np.zeros(24), 1.0, 1.0)


def test_binary_powering_equals_stepping():
    m = random_model(np.random.default_rng(5))
    M, N = build_drift(m)
    dt = 0.05 / np.max(np.sum(np.abs(M), axis=1))
    n = 37
    x = np.zeros(24, complex)
    for _ in range(n):  # explicit classical RK4
        k1 = M @ x + N
        k2 = M @ (x + dt / 2 * k1) + N
        k3 = M @ (x + dt / 2 * k2) + N
        k4 = M @ (x + dt * k3) + N
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    y = evolve_moments(M, N, np.zeros(24), n * dt, dt).x
    assert np.max(np.abs(x - y)) < 1e-12 * max(1.0, np.max(np.abs(x)))


def test_fig1_steady_matches_integration():
    p = FIG1_PARAMS.with_changes(r_d=0.25, theta_d=math.pi, delta_theta=math.pi, delta_r=0.0)
    M, N = build_drift(build_linearized(p, direct_G=1.0))
    st_ = steady_moments(M, N)
    t = 50 / abs(st_.spectral_abscissa)  # about 5e6 mechanical periods
    dt = 0.05 / np.max(np.sum(np.abs(M), axis=1))
    ev = evolve_moments(M, N, np.zeros(24), t, dt)
    assert np.linalg.norm(ev.x - st_.x) < 1e-8 * np.linalg.norm(st_.x)
