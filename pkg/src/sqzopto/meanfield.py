"""Mean-field steady state and the linearized fluctuation model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, ZeroCoupling
from .params import PhysicalParams, SqueezedFrame, effective_frame

__all__ = [
    "MeanField",
    "LinearizedModel",
    "solve_mean_field",
    "mean_field_defect",
    "linearized_coupling",
    "enhancement_factor",
    "build_linearized",
]

DAMPING = 0.5
MAX_ITER = 10_000


@dataclass(frozen=True)
class MeanField:
    cbar_s: complex
    bbar_1: complex
    bbar_2: complex
    delta_s: float
    alpha_s: float
    beta_s: float
    beta_p: float
    A1: complex
    A2: complex
    residual: float
    iterations: int


@dataclass(frozen=True)
class LinearizedModel:
    """Coefficients of the quadratic fluctuation dynamics.

    ``G1``/``G2`` are the bare linearized couplings that ``lambda_1``/``lambda_2``
    were built from; ``beta_p_ratio`` is |beta_p|/kappa for the dropped
    two-photon term (0 in reproduction mode).
    """

    delta_s: float
    lambda_1: complex
    lambda_2: complex
    nu: complex
    kappa: float
    gamma_m1: float
    gamma_m2: float
    N_s: float
    M_s: complex
    nbar_m1: float
    nbar_m2: float
    omega_m1: float
    omega_m2: float
    G1: complex = 0.0
    G2: complex = 0.0
    beta_p_ratio: float = 0.0

    def conjugated(self):
        """Model with every complex coefficient conjugated."""
        return LinearizedModel(
            delta_s=self.delta_s,
            lambda_1=np.conj(self.lambda_1),
            lambda_2=np.conj(self.lambda_2),
            nu=np.conj(self.nu),
            kappa=self.kappa,
            gamma_m1=self.gamma_m1,
            gamma_m2=self.gamma_m2,
            N_s=self.N_s,
            M_s=np.conj(self.M_s),
            nbar_m1=self.nbar_m1,
            nbar_m2=self.nbar_m2,
            omega_m1=self.omega_m1,
            omega_m2=self.omega_m2,
            G1=np.conj(self.G1),
            G2=np.conj(self.G2),
            beta_p_ratio=self.beta_p_ratio,
        )

    def swapped_mirrors(self):
        """Relabel b1 <-> b2 (the hopping amplitude becomes nu*)."""
        return LinearizedModel(
            delta_s=self.delta_s,
            lambda_1=self.lambda_2,
            lambda_2=self.lambda_1,
            nu=np.conj(self.nu),
            kappa=self.kappa,
            gamma_m1=self.gamma_m2,
            gamma_m2=self.gamma_m1,
            N_s=self.N_s,
            M_s=self.M_s,
            nbar_m1=self.nbar_m2,
            nbar_m2=self.nbar_m1,
            omega_m1=self.omega_m2,
            omega_m2=self.omega_m1,
            G1=self.G2,
            G2=self.G1,
            beta_p_ratio=self.beta_p_ratio,
        )


def _drive_coefficients(r_d, theta_d):
    A1 = math.cosh(r_d) + math.sinh(r_d) * np.exp(-1j * theta_d)
    A2 = math.cosh(r_d) * np.exp(-1j * theta_d) + math.sinh(r_d)
    return complex(A1), complex(A2)


def _auxiliaries(c, b1, b2, frame: SqueezedFrame):
    alpha = (np.exp(-1j * frame.theta_d) * np.conj(c) ** 2
             + np.exp(1j * frame.theta_d) * c**2).real
    x1, x2 = 2.0 * b1.real, 2.0 * b2.real
    beta_s = frame.zeta_s1 * x1 + frame.zeta_s2 * x2
    beta_p = frame.zeta_p1 * x1 + frame.zeta_p2 * x2
    return alpha, beta_s, beta_p


def _cavity_update(b1, b2, params, frame, A1, A2):
    _, beta_s, beta_p = _auxiliaries(0j, b1, b2, frame)
    delta_s = frame.omega_s - beta_s
    num = (1j * delta_s - 0.5 * params.kappa) * A1 + 1j * A2 * beta_p
    den = (delta_s**2 + 0.25 * params.kappa**2) - beta_p**2
    return -num / den * params.drive_amp


def _mirror_solve(c, params, frame):
    # (b1, b2) at fixed cavity amplitude: the mirror lines are linear in b
    alpha, _, _ = _auxiliaries(c, 0j, 0j, frame)
    n = abs(c) ** 2
    nu = params.chi * np.exp(-1j * params.phi)
    mat = np.array([
        [1j * params.omega_m1 + 0.5 * params.gamma_m1, 1j * nu],
        [1j * np.conj(nu), 1j * params.omega_m2 + 0.5 * params.gamma_m2],
    ])
    rhs = np.array([
        1j * frame.zeta_s1 * n - 0.5j * frame.zeta_p1 * alpha,
        1j * frame.zeta_s2 * n - 0.5j * frame.zeta_p2 * alpha,
    ])
    b1, b2 = np.linalg.solve(mat, rhs)
    return complex(b1), complex(b2)


def mean_field_defect(c, b1, b2, params: PhysicalParams, frame: SqueezedFrame | None = None):
    """Largest absolute defect of the three steady-state mean-field equations."""
    frame = effective_frame(params) if frame is None else frame
    A1, A2 = _drive_coefficients(frame.r_d, frame.theta_d)
    alpha, _, _ = _auxiliaries(c, b1, b2, frame)
    n = abs(c) ** 2
    nu = params.chi * np.exp(-1j * params.phi)
    d_c = c - _cavity_update(b1, b2, params, frame, A1, A2)
    d_b1 = b1 - (1j * frame.zeta_s1 * n - 0.5j * frame.zeta_p1 * alpha - 1j * nu * b2) / (
        1j * params.omega_m1 + 0.5 * params.gamma_m1)
    d_b2 = b2 - (1j * frame.zeta_s2 * n - 0.5j * frame.zeta_p2 * alpha - 1j * np.conj(nu) * b1) / (
        1j * params.omega_m2 + 0.5 * params.gamma_m2)
    return float(max(abs(d_c), abs(d_b1), abs(d_b2)))


def solve_mean_field(params: PhysicalParams, frame: SqueezedFrame | None = None,
                     max_iter=MAX_ITER, damping=DAMPING) -> MeanField:
    """Self-consistent mean amplitudes (cbar_s, bbar_1, bbar_2).

    The outer loop is a damped fixed-point update of the cavity amplitude; for
    each cavity amplitude the mirror amplitudes are obtained exactly from
    their 2x2 linear system. Starts from the uncoupled cavity solution.
    """
    frame = effective_frame(params) if frame is None else frame
    A1, A2 = _drive_coefficients(frame.r_d, frame.theta_d)
    tol = 1e-10 * (1.0 + abs(params.drive_amp))

    c = _cavity_update(0j, 0j, params, frame, A1, A2)
    b1, b2 = _mirror_solve(c, params, frame)
    residual = mean_field_defect(c, b1, b2, params, frame)
    it = 0
    history = []
    while residual >= tol:
        if it >= max_iter:
            raise NonConvergence(
                f"mean field not converged after {it} iterations (defect {residual:.3e})",
                iterations=it, residual=residual)
        c_new = _cavity_update(b1, b2, params, frame, A1, A2)
        if not np.isfinite(c_new):
            raise NonConvergence("mean-field iteration diverged", iterations=it, residual=residual)
        c = (1.0 - damping) * c + damping * c_new
        b1, b2 = _mirror_solve(c, params, frame)
        residual = mean_field_defect(c, b1, b2, params, frame)
        it += 1
        history.append(residual)
        if it >= 200 and min(history[-100:]) >= 0.999 * min(history[-200:-100]):
            raise NonConvergence(
                f"mean-field defect stagnated at {residual:.3e}", iterations=it, residual=residual)

    alpha, beta_s, beta_p = _auxiliaries(c, b1, b2, frame)
    return MeanField(
        cbar_s=complex(c), bbar_1=b1, bbar_2=b2,
        delta_s=float(frame.omega_s - beta_s),
        alpha_s=float(alpha), beta_s=float(beta_s), beta_p=float(beta_p),
        A1=A1, A2=A2, residual=residual, iterations=it,
    )


def linearized_coupling(G, r_d, theta_d):
    """Effective coupling Lambda = G cosh 2r_d - G* sinh 2r_d e^{-i theta_d}."""
    return complex(G * math.cosh(2.0 * r_d)
                   - np.conj(G) * math.sinh(2.0 * r_d) * np.exp(-1j * theta_d))


def enhancement_factor(lam, G):
    """eta = |Lambda / G|."""
    if G == 0:
        raise ZeroCoupling("enhancement factor undefined for G = 0")
    return abs(lam / G)


def build_linearized(params: PhysicalParams, frame: SqueezedFrame | None = None,
                     meanfield: MeanField | None = None, direct_G=None) -> LinearizedModel:
    """Assemble the linearized model.

    Exactly one of ``meanfield`` (first-principles mode: G_j = g_j cbar_s,
    detuning shifted by beta_s) or ``direct_G`` (reproduction mode: real
    G_j = direct_G * g_j, detuning omega_s) must be given. ``direct_G`` is a
    dimensionless scale on the single-photon couplings; 1.0 means G_j = g_j.
    """
    if (meanfield is None) == (direct_G is None):
        raise ValueError("give exactly one of meanfield or direct_G")
    frame = effective_frame(params) if frame is None else frame
    if meanfield is not None:
        G1 = params.g1 * meanfield.cbar_s
        G2 = params.g2 * meanfield.cbar_s
        delta_s = meanfield.delta_s
        bp_ratio = abs(meanfield.beta_p) / params.kappa if params.kappa > 0 else math.inf
    else:
        G1 = complex(params.g1 * float(direct_G))
        G2 = complex(params.g2 * float(direct_G))
        delta_s = frame.omega_s
        bp_ratio = 0.0
    return LinearizedModel(
        delta_s=float(delta_s),
        lambda_1=linearized_coupling(G1, frame.r_d, frame.theta_d),
        lambda_2=linearized_coupling(G2, frame.r_d, frame.theta_d),
        nu=complex(params.chi * np.exp(-1j * params.phi)),
        kappa=params.kappa,
        gamma_m1=params.gamma_m1,
        gamma_m2=params.gamma_m2,
        N_s=frame.N_s,
        M_s=frame.M_s,
        nbar_m1=params.nbar_m1,
        nbar_m2=params.nbar_m2,
        omega_m1=params.omega_m1,
        omega_m2=params.omega_m2,
        G1=complex(G1),
        G2=complex(G2),
        beta_p_ratio=float(bp_ratio),
    )
