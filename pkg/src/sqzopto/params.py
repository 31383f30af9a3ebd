"""Physical parameters and the closed-form squeezed-frame transforms.

All frequencies, rates and couplings are dimensionless ratios to the reference
mechanical frequency omega_m. Nothing in the package converts units.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import ThresholdExceeded

__all__ = [
    "PhysicalParams",
    "SqueezedFrame",
    "LowQualityFactorWarning",
    "squeezing_from_opa",
    "opa_from_squeezing",
    "effective_frame",
    "noise_params",
    "noise_params_equal_squeezing",
    "drive_amplitude",
    "drive_power",
    "FIG1_PARAMS",
    "FIG3_PARAMS",
    "PRESETS",
]

QUALITY_FACTOR_WARN = 10.0


class LowQualityFactorWarning(UserWarning):
    """Mechanical quality factor below the Markov-regime guideline."""


def squeezing_from_opa(delta_c, opa_pump):
    """Intracavity squeezing strength r_d produced by an OPA pump.

    ``r_d = ln[(delta_c + 2 Xi) / (delta_c - 2 Xi)] / 4``, equivalently
    ``tanh(2 r_d) = 2 Xi / delta_c``.

    An undriven OPA (``opa_pump == 0``) gives ``r_d = 0`` for any detuning,
    including ``delta_c == 0``.
    """
    if opa_pump == 0.0 and delta_c >= 0.0:
        return 0.0
    if delta_c <= 0.0 or abs(2.0 * opa_pump) >= delta_c:
        raise ThresholdExceeded(
            f"|2*opa_pump| = {abs(2.0 * opa_pump):g} must be below delta_c = {delta_c:g}"
        )
    # atanh form is the same function as the log ratio, better conditioned near 0
    return 0.5 * math.atanh(2.0 * opa_pump / delta_c)


def opa_from_squeezing(delta_c, r_d):
    """Inverse of :func:`squeezing_from_opa`: Xi_d = delta_c * tanh(2 r_d) / 2."""
    if not math.isfinite(r_d):
        raise ThresholdExceeded("r_d must be finite")
    return 0.5 * delta_c * math.tanh(2.0 * r_d)


def drive_amplitude(power, kappa, omega_d):
    """Optical drive amplitude eps_d = sqrt(2 kappa P_d / omega_d) (hbar = 1)."""
    if power < 0 or kappa <= 0 or omega_d <= 0:
        raise ValueError("need power >= 0, kappa > 0, omega_d > 0")
    return math.sqrt(2.0 * kappa * power / omega_d)


def drive_power(epsilon_d, kappa, omega_d):
    """Laser power P_d giving drive amplitude ``epsilon_d``."""
    if kappa <= 0 or omega_d <= 0:
        raise ValueError("need kappa > 0, omega_d > 0")
    return epsilon_d**2 * omega_d / (2.0 * kappa)


def noise_params(r_d, theta_d, r_e, theta_e):
    """Effective reservoir noise (N_s, M_s) seen by the squeezed cavity mode.

    Parameters
    ----------
    r_d, theta_d : float
        Intracavity squeezing strength and reference angle.
    r_e, theta_e : float
        Squeezing degree and phase of the injected squeezed-vacuum reservoir.

    Returns
    -------
    (N_s, M_s) : (float, complex)
        Effective thermal occupation and two-photon correlation.
    """
    dth = theta_e - theta_d
    chd, shd = math.cosh(r_d), math.sinh(r_d)
    che, she = math.cosh(r_e), math.sinh(r_e)
    n_s = (
        shd**2 * che**2
        + chd**2 * she**2
        + 0.5 * math.cos(dth) * math.sinh(2.0 * r_d) * math.sinh(2.0 * r_e)
    )
    m_s = (
        np.exp(1j * theta_d)
        * (chd * che + np.exp(-1j * dth) * shd * she)
        * (shd * che + np.exp(1j * dth) * chd * she)
    )
    return float(n_s), complex(m_s)


def noise_params_equal_squeezing(r, theta_d, delta_theta):
    """Reduced form of :func:`noise_params` for r_d = r_e = r."""
    n_s = 0.5 * math.sinh(2.0 * r) ** 2 * (1.0 + math.cos(delta_theta))
    m_s = (
        0.5
        * np.exp(1j * theta_d)
        * math.sinh(2.0 * r)
        * (1.0 + np.exp(1j * delta_theta))
        * (math.cosh(r) ** 2 + np.exp(-1j * delta_theta) * math.sinh(r) ** 2)
    )
    return float(n_s), complex(m_s)


@dataclass(frozen=True)
class PhysicalParams:
    """Full parameter set of the two-mirror squeezed optomechanical system.

    Defaults are the light-mirror figure set (omega_m,j = 1, kappa = 0.9,
    gamma = 1e-5, g = 0.2, chi = 0.1, nbar = 100) at delta_c = 1 and
    phi = pi/2, without squeezing.

    The OPA may be specified through ``opa_pump`` (Xi_d) or directly through
    the squeezing strength ``r_d``; after construction both are stored and
    consistent. Give at most one of them a non-default value.
    """

    omega_m1: float = 1.0
    omega_m2: float = 1.0
    kappa: float = 0.9
    gamma_m1: float = 1e-5
    gamma_m2: float = 1e-5
    g1: float = 0.2
    g2: float = 0.2
    chi: float = 0.1
    phi: float = math.pi / 2
    delta_c: float = 1.0
    opa_pump: float | None = None
    theta_d: float = 0.0
    drive_amp: float = 0.0
    r_e: float = 0.0
    theta_e: float = 0.0
    nbar_m1: float = 100.0
    nbar_m2: float = 100.0
    r_d: float | None = None
    low_quality_factor: bool = field(default=False, compare=False)

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "low_quality_factor" or v is None:
                continue
            if not math.isfinite(v):
                raise ValueError(f"{f.name} must be finite, got {v!r}")
        nonneg = ("omega_m1", "omega_m2", "kappa", "gamma_m1", "gamma_m2",
                  "chi", "delta_c", "drive_amp", "r_e", "nbar_m1", "nbar_m2")
        for name in nonneg:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

        if self.r_d is not None and self.opa_pump is not None:
            expected = opa_from_squeezing(self.delta_c, self.r_d)
            if not math.isclose(expected, self.opa_pump, rel_tol=1e-9, abs_tol=1e-15):
                raise ValueError("opa_pump and r_d both given and inconsistent")
        if self.r_d is not None:
            if self.r_d < 0:
                raise ValueError("r_d must be >= 0")
            object.__setattr__(self, "opa_pump", opa_from_squeezing(self.delta_c, self.r_d))
        else:
            pump = 0.0 if self.opa_pump is None else self.opa_pump
            object.__setattr__(self, "opa_pump", pump)
            object.__setattr__(self, "r_d", squeezing_from_opa(self.delta_c, pump))

        low_q = any(
            g > 0 and w / g < QUALITY_FACTOR_WARN
            for w, g in ((self.omega_m1, self.gamma_m1), (self.omega_m2, self.gamma_m2))
        )
        object.__setattr__(self, "low_quality_factor", low_q)
        if low_q:
            warnings.warn(
                "mechanical quality factor below 10; the Markovian bath model is marginal",
                LowQualityFactorWarning,
                stacklevel=3,
            )

    @property
    def delta_r(self):
        return self.r_e - self.r_d

    @property
    def delta_theta(self):
        return self.theta_e - self.theta_d

    def with_changes(self, **changes):
        """Copy with some fields replaced.

        Changing ``delta_c`` or ``r_d`` keeps r_d fixed and recomputes the OPA
        pump; changing ``opa_pump`` recomputes r_d. ``delta_r`` and
        ``delta_theta`` set the reservoir relative to the (new) intracavity
        squeezing.
        """
        changes = dict(changes)
        delta_r = changes.pop("delta_r", None)
        delta_theta = changes.pop("delta_theta", None)
        if "opa_pump" in changes:
            changes.setdefault("r_d", None)
        else:
            changes.setdefault("r_d", self.r_d)
            changes["opa_pump"] = None
        new = replace(self, **changes)
        extra = {}
        if delta_r is not None:
            extra["r_e"] = new.r_d + delta_r
        if delta_theta is not None:
            extra["theta_e"] = new.theta_d + delta_theta
        if extra:
            new = replace(new, r_d=new.r_d, opa_pump=None, **extra)
        return new


@dataclass(frozen=True)
class SqueezedFrame:
    """Coefficients of the system rewritten in the squeezed cavity basis."""

    r_d: float
    theta_d: float
    omega_s: float
    zeta_s1: float
    zeta_s2: float
    zeta_p1: float
    zeta_p2: float
    N_s: float
    M_s: complex
    F1: float
    F2: float
    delta_r: float
    delta_theta: float


def effective_frame(params: PhysicalParams) -> SqueezedFrame:
    """Bogoliubov-frame quantities for ``params``.

    omega_s = (delta_c - 2 Xi_d) e^{2 r_d}, zeta_s = g cosh 2r_d,
    zeta_p = g sinh 2r_d, F_j = g_j sinh^2 r_d.
    """
    r = squeezing_from_opa(params.delta_c, params.opa_pump)
    ch2, sh2 = math.cosh(2.0 * r), math.sinh(2.0 * r)
    n_s, m_s = noise_params(r, params.theta_d, params.r_e, params.theta_e)
    return SqueezedFrame(
        r_d=r,
        theta_d=params.theta_d,
        omega_s=(params.delta_c - 2.0 * params.opa_pump) * math.exp(2.0 * r),
        zeta_s1=params.g1 * ch2,
        zeta_s2=params.g2 * ch2,
        zeta_p1=params.g1 * sh2,
        zeta_p2=params.g2 * sh2,
        N_s=n_s,
        M_s=m_s,
        F1=params.g1 * math.sinh(r) ** 2,
        F2=params.g2 * math.sinh(r) ** 2,
        delta_r=params.r_e - r,
        delta_theta=params.theta_e - params.theta_d,
    )


FIG1_PARAMS = PhysicalParams()
with warnings.catch_warnings():
    # Q = 5 for this set; the warning belongs to user-constructed instances
    warnings.simplefilter("ignore", LowQualityFactorWarning)
    FIG3_PARAMS = replace(FIG1_PARAMS, gamma_m1=0.2, gamma_m2=0.2, g1=0.1, g2=0.1,
                          nbar_m1=0.05, nbar_m2=0.05, r_d=0.0, opa_pump=None)
PRESETS = {"fig1": FIG1_PARAMS, "fig3": FIG3_PARAMS}
