"""Support data on finite spaces, their convolution calculus, and the
t-structures they induce on complexes of sheaves."""
from .complexes import ChainComplex, ChainMap, cohomology_dims, injective_replacement, r_gamma, rhom
from .errors import CertificateFailure, TStructError
from .linalg import F2, QQ, Field
from .sheaves import Sheaf, SheafMorphism
from .space import SpaceModel, validate_space
from .supports import (
    NoSolution,
    SupportDatum,
    check_t_criterion,
    convolve,
    dual_star,
    residuate,
    standard_S,
    standard_T,
)
from .tstructure import heart_cohomology, in_geq, in_leq, truncate

__all__ = [
    "CertificateFailure",
    "ChainComplex",
    "ChainMap",
    "F2",
    "Field",
    "NoSolution",
    "QQ",
    "Sheaf",
    "SheafMorphism",
    "SpaceModel",
    "SupportDatum",
    "TStructError",
    "check_t_criterion",
    "cohomology_dims",
    "convolve",
    "dual_star",
    "heart_cohomology",
    "in_geq",
    "in_leq",
    "injective_replacement",
    "r_gamma",
    "residuate",
    "rhom",
    "standard_S",
    "standard_T",
    "truncate",
    "validate_space",
]
