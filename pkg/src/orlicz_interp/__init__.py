"""Numerical toolkit for complex interpolation of Orlicz sequence-space families."""

from .functions import (
    OrliczFunction,
    Delta2Report,
    ValidationReport,
    conjugate,
    delta2_probe,
    make_function,
    phi0,
    phi1,
    phi2,
    power,
    power_log,
    psi1,
    psi2,
    tabulated,
    validate,
)

__version__ = "0.1.0"
