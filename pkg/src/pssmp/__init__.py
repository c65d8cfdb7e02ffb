"""Simulation and statistical verification toolkit for positive self-similar
Markov processes driven by killed finite-activity Lévy processes."""

from .entrance import WeightedEmpiricalMeasure, ssel_estimate
from .expfunc import ExpFunctionalSample, IntegratorControl, sample_I, sample_I_batch
from .lamperti import PssmpPath, classify, lamperti_forward, lamperti_inverse, ou_transform
from .levy import (
    CramerKind,
    DomainError,
    LevyPath,
    LevyTriplet,
    PreconditionError,
    cramer_index,
    dual,
    esscher_tilt,
    laplace_exponent,
    replica_rng,
    sample_path,
)

__all__ = [
    "LevyTriplet",
    "LevyPath",
    "laplace_exponent",
    "cramer_index",
    "CramerKind",
    "esscher_tilt",
    "dual",
    "sample_path",
    "replica_rng",
    "DomainError",
    "PreconditionError",
    "PssmpPath",
    "lamperti_forward",
    "lamperti_inverse",
    "classify",
    "ou_transform",
    "IntegratorControl",
    "ExpFunctionalSample",
    "sample_I",
    "sample_I_batch",
    "WeightedEmpiricalMeasure",
    "ssel_estimate",
]

__version__ = "0.1.0"
