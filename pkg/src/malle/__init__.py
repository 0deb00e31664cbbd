"""Specialization counting for regular Galois covers of the projective line."""

__version__ = "0.1.0"

from .cover import CoverModel, build_model, load_model, prime_frame
from .models import irrational_branch_model, quadratic_model, s3_model
from .polyalg import BiPoly, UniPoly, parse_bipoly

__all__ = [
    "BiPoly", "CoverModel", "UniPoly", "__version__", "build_model", "irrational_branch_model",
    "load_model", "parse_bipoly", "prime_frame", "quadratic_model", "s3_model",
]
