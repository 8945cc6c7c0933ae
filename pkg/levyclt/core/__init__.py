"""
Core package for LevyCLT.

Contains the exponent model, quadrature engines, simulators, local-time
estimators and the experiment harness.
"""

from levyclt.core.density import DensityEvaluator
from levyclt.core.exponent import LevyExponent, parse_exponent
from levyclt.core.localtime import GridSpec, LocalTimeField
from levyclt.core.simulate import PathConfig, SamplePath

__all__ = [
    "DensityEvaluator",
    "LevyExponent",
    "parse_exponent",
    "GridSpec",
    "LocalTimeField",
    "PathConfig",
    "SamplePath",
]
