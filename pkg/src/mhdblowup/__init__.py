"""Exact and numeric verification of explicit blowup solutions of 3D incompressible MHD."""

from .catalog import FamilyParams, family, family_one, family_two, initial_data, nse_family
from .errors import DomainError, FrameError, MHDBlowupError, NoSolution, ParamError, UnsupportedField
from .fields import AffineExp, SymField, diff, evaluate, freeze_time, from_text, laplacian, to_text
from .polys import ParamRational, parse_param
from .residuals import SolutionBundle, VecField3

__version__ = "0.1.0"

__all__ = [
    "FamilyParams", "family", "family_one", "family_two", "initial_data", "nse_family",
    "DomainError", "FrameError", "MHDBlowupError", "NoSolution", "ParamError", "UnsupportedField",
    "AffineExp", "SymField", "diff", "evaluate", "freeze_time", "from_text", "laplacian", "to_text",
    "ParamRational", "parse_param", "SolutionBundle", "VecField3",
]
