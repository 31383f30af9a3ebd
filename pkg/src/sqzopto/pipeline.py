"""Full evaluation chain: params -> mean field -> moments -> CM -> entanglement."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceMatrix, assemble_cm
from .entanglement import EntanglementReport, entanglement_report
from .errors import NumericalError, SqzOptoError, StageError, Unstable
from .meanfield import (LinearizedModel, MeanField, build_linearized, enhancement_factor,
                        solve_mean_field)
from .moments import MomentState, build_drift, stability, steady_moments
from .params import PhysicalParams, SqueezedFrame, effective_frame, noise_params

__all__ = ["PointResult", "evaluate", "random_model", "steady_cm", "MODES_OF_OPERATION"]

MODES_OF_OPERATION = ("reproduction", "first_principles")


@dataclass(frozen=True)
class PointResult:
    params: PhysicalParams
    frame: SqueezedFrame
    model: LinearizedModel
    stable: bool
    spectral_abscissa: float
    eta: float
    meanfield: MeanField | None = None
    moments: MomentState | None = None
    cm: CovarianceMatrix | None = None
    report: EntanglementReport | None = None


def _stage(name, fn, *args, **kwargs):
    try:
        out = fn(*args, **kwargs)
    except SqzOptoError as exc:
        raise StageError(name, exc) from exc
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise StageError(name, exc) from exc
    return out


def _finite(stage, *values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise StageError(stage, NumericalError("non-finite intermediate value"))


def evaluate(params: PhysicalParams, mode="reproduction", g_scale=1.0) -> PointResult:
    """Run the whole pipeline at one parameter point.

    An unstable linear system is not an error: the result carries
    ``stable=False`` and no moments, CM or report. Every other failure is
    raised as :class:`StageError` naming the stage.
    """
    if mode not in MODES_OF_OPERATION:
        raise ValueError(f"mode must be one of {MODES_OF_OPERATION}")
    frame = _stage("params", effective_frame, params)
    _finite("params", frame.omega_s, frame.N_s, frame.M_s)
    mf = None
    if mode == "first_principles":
        mf = _stage("meanfield", solve_mean_field, params, frame)
        model = _stage("meanfield", build_linearized, params, frame, meanfield=mf)
    else:
        model = _stage("meanfield", build_linearized, params, frame, direct_G=g_scale)
    _finite("meanfield", model.delta_s, model.lambda_1, model.lambda_2)

    if model.G1 != 0:
        eta = enhancement_factor(model.lambda_1, model.G1)
    else:
        eta = float("nan")

    drift, drive = build_drift(model)
    stable, abscissa = _stage("moments", stability, drift)
    if not stable:
        return PointResult(params, frame, model, False, abscissa, eta, meanfield=mf)
    try:
        state = steady_moments(drift, drive)
    except Unstable:
        return PointResult(params, frame, model, False, abscissa, eta, meanfield=mf)
    except SqzOptoError as exc:
        raise StageError("moments", exc) from exc
    _finite("moments", state.x)
    cm = _stage("covariance", assemble_cm, state)
    report = _stage("entanglement", entanglement_report, cm)
    return PointResult(params, frame, model, True, abscissa, eta, meanfield=mf,
                       moments=state, cm=cm, report=report)


def steady_cm(model: LinearizedModel) -> CovarianceMatrix:
    """Steady-state CM of a linearized model (raises Unstable if none)."""
    drift, drive = build_drift(model)
    return assemble_cm(steady_moments(drift, drive))


def random_model(rng: np.random.Generator, max_tries=1000) -> LinearizedModel:
    """Draw a random asymptotically stable linearized model.

    Rates, couplings and noise are drawn over ranges that cover both the
    weak- and moderate-coupling regimes; unstable draws are rejected.
    """
    for _ in range(max_tries):
        r_d, r_e = rng.uniform(0, 0.8), rng.uniform(0, 0.8)
        th_d, th_e = rng.uniform(0, 2 * np.pi, size=2)
        n_s, m_s = noise_params(r_d, th_d, r_e, th_e)
        lam = rng.uniform(0, 0.35, size=2) * np.exp(1j * rng.uniform(0, 2 * np.pi, size=2))
        model = LinearizedModel(
            delta_s=rng.uniform(-2.0, 2.0),
            lambda_1=complex(lam[0]),
            lambda_2=complex(lam[1]),
            nu=complex(rng.uniform(0, 0.3) * np.exp(-1j * rng.uniform(0, 2 * np.pi))),
            kappa=rng.uniform(0.1, 1.5),
            gamma_m1=10 ** rng.uniform(-3, -0.5),
            gamma_m2=10 ** rng.uniform(-3, -0.5),
            N_s=n_s,
            M_s=m_s,
            nbar_m1=10 ** rng.uniform(-3, 0.5),
            nbar_m2=10 ** rng.uniform(-3, 0.5),
            omega_m1=rng.uniform(0.5, 1.5),
            omega_m2=rng.uniform(0.5, 1.5),
        )
        stable, _ = stability(build_drift(model)[0])
        if stable:
            return model
    raise RuntimeError("no stable model drawn")
