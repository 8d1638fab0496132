"""Generalized robustness of non-Gaussianity for continuous-variable states.

Dense numerics on truncated Fock spaces: Gaussian state synthesis, the
max-relative-entropy robustness and its lower bounds, multi-copy witnesses
and the channel-discrimination tasks they induce.
"""
from ._kernels import BACKEND
from .errors import (
    CVRLError,
    CutoffTooSmallError,
    IndistinguishableError,
    InvalidDimensionError,
    InvalidStateError,
    NoFeasibleGaussianError,
    ResourceLimitError,
    WitnessViolationError,
)
from .fock import DensityState, FockOperator, fock_state, thermal_state
from .gaussian import GaussianParams, MomentForm, synthesize
from .optimize import OptimizerConfig
from .robustness import RobustnessResult, dmax, robustness_gaussian

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CVRLError",
    "CutoffTooSmallError",
    "IndistinguishableError",
    "InvalidDimensionError",
    "InvalidStateError",
    "NoFeasibleGaussianError",
    "ResourceLimitError",
    "WitnessViolationError",
    "DensityState",
    "FockOperator",
    "fock_state",
    "thermal_state",
    "GaussianParams",
    "MomentForm",
    "synthesize",
    "OptimizerConfig",
    "RobustnessResult",
    "dmax",
    "robustness_gaussian",
]
