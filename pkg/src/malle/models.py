"""Ready-made covers used throughout the tests and the CLI examples."""
from __future__ import annotations

from .cover import ConjClass, CoverModel, build_model
from .polyalg import parse_bipoly

C2_CLASSES = (
    ConjClass("1A", 1, 1, (1, 1)),
    ConjClass("2A", 1, 2, (2,)),
)

# S3 acting on the three roots of the cubic
S3_CLASSES = (
    ConjClass("1A", 1, 1, (1, 1, 1)),
    ConjClass("2A", 3, 2, (1, 2)),
    ConjClass("3A", 2, 3, (3,)),
)


def quadratic_model() -> CoverModel:
    """Y^2 = T^2 - T: group Z/2, branch points 0 and 1, genus 0."""
    return build_model(parse_bipoly("Y^2 - T^2 + T"), None, 2, C2_CLASSES, genus=0,
                       branch_count=2, name="quadratic")


def s3_model() -> CoverModel:
    """Splitting field of Y^3 + T*Y + T over Q(T), group S3.

    P is the sextic whose roots are the pairwise differences of the cubic's
    roots, a primitive element of the Galois closure; the cubic itself is the
    observation polynomial.  Branch points 0, -27/4 and infinity; genus 0.
    """
    P = parse_bipoly("Y^6 + 6*T*Y^4 + 9*T^2*Y^2 + 4*T^3 + 27*T^2")
    Q = parse_bipoly("Y^3 + T*Y + T")
    return build_model(P, Q, 6, S3_CLASSES, genus=0, branch_count=3, name="s3_cubic")


def irrational_branch_model() -> CoverModel:
    """Y^2 = T^2 + 1: branch points +-i, so no rational branch point."""
    return build_model(parse_bipoly("Y^2 - T^2 - 1"), None, 2, C2_CLASSES, genus=0,
                       branch_count=2, name="irrational")
