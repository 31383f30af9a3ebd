"""Steady-state Gaussian correlations of a squeezed cavity with two mechanical mirrors."""

from .covariance import CovarianceMatrix, assemble_cm, physicality, reduce, symplectic_eigenvalues
from .entanglement import (EntanglementReport, log_negativity, one_vs_two_contangle,
                           residual_contangle_min)
from .errors import (ComplexBranch, ConfigError, DegenerateProjection, MonogamyViolation,
                     NonConvergence, NonHermitianMoments, NumericalError, SingularSystem,
                     SqzOptoError, StageError, StepTooLarge, ThresholdExceeded, Unstable,
                     ZeroCoupling)
from .meanfield import (LinearizedModel, MeanField, build_linearized, enhancement_factor,
                        linearized_coupling, solve_mean_field)
from .moments import MomentState, build_drift, evolve_moments, stability, steady_moments
from .params import (FIG1_PARAMS, FIG3_PARAMS, PhysicalParams, SqueezedFrame, effective_frame,
                     noise_params, opa_from_squeezing, squeezing_from_opa)
from .pipeline import evaluate
from .wigner import contour_1e, project, sample_grid

__version__ = "0.1.0"
