"""Meromorphic Jacobi forms given as theta quotients: evaluation, finite/polar
decomposition, non-holomorphic completions and numerical verification."""

from .errors import JMFError
from .formspec import ThetaQuotientForm, eval_form, kac_wakimoto, load_form, make_form, parse_form, shifted_pole_form
from .numerics import DEFAULT_PRECISION, Precision, TorsionPoint

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRECISION",
    "JMFError",
    "Precision",
    "ThetaQuotientForm",
    "TorsionPoint",
    "eval_form",
    "kac_wakimoto",
    "load_form",
    "make_form",
    "parse_form",
    "shifted_pole_form",
]
