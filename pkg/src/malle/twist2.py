"""Quadratic twists d*y^2 = f(t): rational and mod-p points versus square classes.

Points at infinity of the smooth model of d*y^2 = f(t), deg f = k, lc(f) = a:

    k odd             1 point
    k even, (a*d/p)=1 2 points
    k even, (a*d/p)=-1 0 points
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import is_prime, legendre
from .cover import genus_hyperelliptic
from .polyalg import UniPoly, discriminant, squarefree_kernel, squarefree_part, value_kernels


class TwistError(ValueError):
    """Invalid twist data, a branch point, or a bad prime."""


class TwistViolation(AssertionError):
    """The two sides of the twisting equivalence disagree."""


@dataclass(frozen=True)
class QuadTwist:
    f: UniPoly
    d: int

    def __post_init__(self):
        f = self.f
        if not isinstance(f, UniPoly):
            f = UniPoly(tuple(f))
            object.__setattr__(self, "f", f)
        if f.degree < 1 or not f.is_integral():
            raise TwistError("f must be a nonconstant integer polynomial")
        if squarefree_part(f).degree != f.degree:
            raise TwistError("f must be squarefree")
        if self.d == 0 or squarefree_kernel(self.d) != self.d:
            raise TwistError(f"d = {self.d} must be a nonzero squarefree integer")

    @property
    def genus(self) -> int:
        return genus_hyperelliptic(self.f)

    def genus_of_twist(self) -> int:
        # d*y^2 = f is Y^2 = d*f(t) with Y = d*y
        return genus_hyperelliptic(self.f * self.d)


def _rational_point(d: int, v: int):
    """y >= 0 with d*y^2 = v when one exists (y is then an integer/|d| fraction)."""
    w = d * v
    if w < 0:
        return None
    r = math.isqrt(w)
    if r * r != w:
        return None
    return r, abs(d)  # y = r/|d|


def verify_global(tw: QuadTwist, t0: int, kernel: int | None = None) -> bool:
    """Square class of f(t0) equals that of d  <=>  d*y^2 = f(t0) has a rational point."""
    v = int(tw.f(t0))
    if v == 0:
        raise TwistError(f"t0 = {t0} is a branch point")
    k = squarefree_kernel(v) if kernel is None else kernel
    same_class = k == tw.d
    has_point = _rational_point(tw.d, v) is not None
    if same_class != has_point:
        raise TwistViolation(f"t0={t0}, d={tw.d}: kernel test {same_class}, point test {has_point}")
    return same_class


def _check_prime(tw: QuadTwist, p: int) -> None:
    if p == 2 or not is_prime(p):
        raise TwistError(f"{p} is not an odd prime")
    if tw.d % p == 0 or int(tw.f.lc) % p == 0 or int(discriminant(tw.f)) % p == 0:
        raise TwistError(f"{p} is a bad prime for this twist")


def local_point_residues(tw: QuadTwist, p: int) -> list[int]:
    """Residues t0 mod p with f(t0) != 0 and a point d*y^2 = f(t0) over F_p (brute force)."""
    _check_prime(tw, p)
    values = {tw.d * y * y % p for y in range(1, p)}
    out = []
    for t in range(p):
        v = int(tw.f(t)) % p
        if v and v in values:
            out.append(t)
    return out


def verify_local(tw: QuadTwist, p: int) -> bool:
    """(f(t0)/p) = (d/p)  <=>  d*y^2 = f(t0) is solvable in F_p, for every t0 off the branch locus."""
    _check_prime(tw, p)
    values = {tw.d * y * y % p for y in range(1, p)}
    chi_d = legendre(tw.d, p)
    for t in range(p):
        v = int(tw.f(t)) % p
        if v == 0:
            continue
        if (legendre(v, p) == chi_d) != (v in values):
            return False
    return True


@dataclass(frozen=True)
class PointCount:
    p: int
    affine: int
    at_infinity: int
    total: int
    genus: int
    within: bool


def lang_weil_on_twist(tw: QuadTwist, p: int) -> PointCount:
    """Brute-force F_p-point count of the smooth model, checked against p+1 +- 2g sqrt(p)."""
    _check_prime(tw, p)
    count = {}
    for y in range(p):
        a = tw.d * y * y % p
        count[a] = count.get(a, 0) + 1
    affine = sum(count.get(int(tw.f(t)) % p, 0) for t in range(p))
    k = tw.f.degree
    if k % 2:
        inf = 1
    else:
        inf = 2 if legendre(int(tw.f.lc) * tw.d, p) == 1 else 0
    total = affine + inf
    g = tw.genus
    dev = total - (p + 1)
    return PointCount(p, affine, inf, total, g, dev * dev <= 4 * g * g * p)


@dataclass
class GridReport:
    global_checked: int = 0
    global_true: int = 0
    local_checked: int = 0
    point_counts_checked: int = 0
    violations: list = None

    def to_json(self) -> dict:
        return {
            "global_checked": self.global_checked,
            "global_true": self.global_true,
            "local_checked": self.local_checked,
            "point_counts_checked": self.point_counts_checked,
            "violations": self.violations,
        }


def verify_grid(f: UniPoly, ds, t_range: tuple[int, int] | None, primes) -> GridReport:
    """Run both equivalences over every d, every t0 in t_range and every valid prime."""
    rep = GridReport(violations=[])
    kernels = None
    if t_range is not None:
        lo, hi = t_range
        kernels = value_kernels(f, lo, hi + 1)
    for d in ds:
        tw = QuadTwist(f, d)
        if kernels is not None:
            for t, k in zip(range(lo, hi + 1), kernels):
                if k == 0:
                    continue
                rep.global_checked += 1
                try:
                    rep.global_true += verify_global(tw, t, kernel=k)
                except TwistViolation as exc:
                    rep.violations.append(str(exc))
        for p in primes:
            try:
                _check_prime(tw, p)
            except TwistError:
                continue
            rep.local_checked += 1
            if not verify_local(tw, p):
                rep.violations.append(f"local equivalence fails at p={p}, d={d}")
            rep.point_counts_checked += 1
            if not lang_weil_on_twist(tw, p).within:
                rep.violations.append(f"point count outside the Lang-Weil window at p={p}, d={d}")
    return rep
