"""Integral points on F(T, Y) = 0: brute counts, Liouville bounds, exponent selection.

All bound evaluations use mpmath interval arithmetic and return the upper
endpoint, so reported bounds are never below the true value.
"""
from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv, mp, mpf
from sympy import integer_nthroot

from .polyalg import BiPoly, discriminant_y, integer_roots, substitute_shift

PRECISION = 128
MAX_PRECISION = 1 << 14
_iv_lock = threading.RLock()


class DiophantineError(ValueError):
    pass


@contextmanager
def _ivprec(bits: int):
    with _iv_lock:
        old = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = old


def _hplus(H: int):
    # e^e ~ 15.154, so every integer H >= 16 is its own H+
    return iv.mpf(H) if H >= 16 else iv.exp(iv.e)


def _ceil_hi(x) -> int:
    return int(mp.ceil(x.b))


@dataclass(frozen=True)
class WalkowiakInstance:
    F: BiPoly
    m: int
    n: int
    D: int
    H: int
    H_plus: mpf = field(repr=False)
    L1: mpf = field(repr=False)
    L2: mpf = field(repr=False)


def instance(F: BiPoly, H: int | None = None) -> WalkowiakInstance:
    """Statement-level data of F; ``H`` overrides the height (for what-if runs)."""
    if F.deg_y < 2:
        raise DiophantineError("need deg_Y F >= 2")
    if discriminant_y(F).is_zero():
        raise DiophantineError("F has a repeated factor in Y (zero discriminant)")
    H = F_height(F) if H is None else int(H)
    if H < 1:
        raise DiophantineError("height must be >= 1")
    with _ivprec(PRECISION):
        hp = _hplus(H)
        l1 = iv.log(hp)
        l2 = iv.log(l1)
        return WalkowiakInstance(F, F.deg_t, F.deg_y, F.total_degree, H,
                                 mpf(hp.mid), mpf(l1.mid), mpf(l2.mid))


def F_height(F: BiPoly) -> int:
    return max(abs(c) for row in F.coeffs for c in row)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def liouville_bound(F: BiPoly, B: int, E: int | None = None, H: int | None = None) -> int:
    """ceil(2(m+1) H+ B^m), or with B^E in place of B^m when E is given."""
    if B < 1:
        raise DiophantineError("B must be >= 1")
    m = F.deg_t
    H = F_height(F) if H is None else H
    with _ivprec(PRECISION):
        val = 2 * (m + 1) * _hplus(H) * iv.mpf(B) ** (m if E is None else E)
        return _ceil_hi(val)


@dataclass(frozen=True)
class CaseSelection:
    case: int
    E: int | None
    ratio: float
    L1: float
    L2: float
    precision: int


def case_select(F: BiPoly, H: int | None = None) -> CaseSelection:
    """Case 1 iff m n L1/L2 <= D, else Case 2 with E = floor(m n L1/L2) + 1.

    The comparison and the floor are decided on an interval enclosure; the
    precision doubles until the enclosure no longer straddles D or an integer.
    """
    m, n, D = F.deg_t, F.deg_y, F.total_degree
    H = F_height(F) if H is None else int(H)
    bits = PRECISION
    while bits <= MAX_PRECISION:
        with _ivprec(bits):
            l1 = iv.log(_hplus(H))
            l2 = iv.log(l1)
            x = m * n * l1 / l2
            lo, hi = x.a, x.b
            info = dict(ratio=float(x.mid), L1=float(l1.mid), L2=float(l2.mid), precision=bits)
            if hi <= D:
                return CaseSelection(1, None, **info)
            if lo > D:
                f_lo, f_hi = int(mp.floor(lo)), int(mp.floor(hi))
                if f_lo == f_hi:
                    return CaseSelection(2, f_lo + 1, **info)
        bits *= 2
    raise DiophantineError("m n L1/L2 could not be separated from D or from an integer")


def central_bound(D: int, B: int):
    """2^36 D^5 log^3(1250 D^11 B^(5D-1)) log^2(B) B^(1/D), upper endpoint.

    The inner factor is written with D, reading the lower-case d of the
    source formula as the total degree.
    """
    if D < 1:
        raise DiophantineError("D must be >= 1")
    if B < 2:
        raise DiophantineError("B must be >= 2")
    with _ivprec(PRECISION):
        lb = iv.log(iv.mpf(B))
        inner = iv.log(iv.mpf(1250)) + 11 * iv.log(iv.mpf(D)) + (5 * D - 1) * lb
        val = iv.mpf(2) ** 36 * iv.mpf(D) ** 5 * inner**3 * lb**2 * iv.exp(lb / D)
        return mpf(val.b)


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------


@dataclass
class ZCount:
    B: int
    count: int
    points: list  # (t0, y) with F(t0, y) = 0, 1 <= t0 <= B
    method: str
    y_bound: int


def _root_bound(F: BiPoly, B: int) -> int:
    """Bound on |y| for integer roots of F(t, Y), 1 <= t <= B (Fujiwara)."""
    n = F.deg_y
    best = 0
    for j in range(n):
        a = sum(abs(c) * B**i for i, c in enumerate(F.y_coeff(j).coeffs))
        if a == 0:
            continue
        r, exact = integer_nthroot(a, n - j)
        best = max(best, r if exact else r + 1)
    return 2 * best


def brute_Z(F: BiPoly, B: int, method: str = "auto") -> ZCount:
    """Count t0 in [1, B] such that F(t0, Y) has an integer root.

    Sweeps t when B is small and sweeps y (solving for t) when the root
    bound is smaller than B.  Every root is checked against the Liouville
    bound.
    """
    if B < 1:
        raise DiophantineError("B must be >= 1")
    if not F.is_monic_in_y():
        raise DiophantineError("F must be monic in Y")
    ymax = _root_bound(F, B)
    if method == "auto":
        method = "y" if 2 * ymax + 1 < B else "t"
    points = []
    if method == "t":
        for t in range(1, B + 1):
            for y in integer_roots(F.eval_t(t)):
                points.append((t, y))
    elif method == "y":
        for y in range(-ymax, ymax + 1):
            g = F.eval_y(y)
            if g.is_zero():
                points.extend((t, y) for t in range(1, B + 1))
                continue
            if g.degree < 1:
                continue
            for t in integer_roots(g):
                if 1 <= t <= B:
                    points.append((t, y))
        points.sort()
    else:
        raise DiophantineError(f"unknown method {method!r}")
    lb = liouville_bound(F, B)
    for t, y in points:
        if abs(y) > lb:
            raise AssertionError(f"root y={y} at t0={t} exceeds the Liouville bound {lb}")
    return ZCount(B, len({t for t, _ in points}), points, method, ymax)


def lattice_count(F: BiPoly, B: int) -> int:
    """N(F, B): points (t, y) in Z^2 with max(|t|, |y|) <= B on F = 0."""
    total = 0
    for t in range(-B, B + 1):
        g = F.eval_t(t)
        if g.is_zero():
            total += 2 * B + 1
            continue
        total += sum(1 for y in integer_roots(g) if abs(y) <= B)
    return total


def shift_consistency(F: BiPoly, B: int, points, E: int) -> list:
    """Points where G = F(T, T^E + Y) fails to vanish at y - t^E or breaks B''."""
    G = substitute_shift(F, E)
    bound = liouville_bound(F, B, E=E)
    bad = []
    for t, y in points:
        y2 = y - t**E
        if G(t, y2) != 0 or abs(y2) > bound:
            bad.append((t, y))
    return bad


def _identify(x, max_den: int = 1000) -> Fraction | None:
    cand = Fraction(int(mp.nint(x * 10**12)), 10**12).limit_denominator(max_den)
    if abs(x - mpf(cand.numerator) / cand.denominator) < mpf(10) ** -40:
        return cand
    return None


def loglog_slope(xs, ys) -> tuple[float, Fraction | None]:
    """Least-squares slope of log y against log x, plus an exact value when recognizable."""
    with mp.workdps(60):
        lx = [mp.log(mpf(v)) for v in xs]
        ly = [mp.log(mpf(v)) for v in ys]
        k = len(lx)
        mx, my = sum(lx) / k, sum(ly) / k
        num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
        den = sum((a - mx) ** 2 for a in lx)
        theta = num / den
        return float(theta), _identify(theta)


def scaling_experiment(F: BiPoly, B_grid) -> dict:
    """theta = slope of log brute_Z against log B; pass iff theta <= 1/n + 0.1."""
    grid = sorted(int(b) for b in B_grid)
    if len(grid) < 3 or len(set(grid)) != len(grid) or grid[-1] < 100 * grid[0]:
        raise DiophantineError("need >= 3 distinct grid values spanning >= 2 decades")
    counts = [brute_Z(F, b).count for b in grid]
    if min(counts) < 1:
        raise DiophantineError("a grid point has no solution; the log-log fit is undefined")
    theta, exact = loglog_slope(grid, counts)
    n = F.deg_y
    return {
        "B_grid": grid,
        "counts": counts,
        "theta": theta,
        "theta_exact": str(exact) if exact is not None else None,
        "target": 1 / n,
        "pass": theta <= 1 / n + 0.1,
    }


def report(F: BiPoly, B_grid, lattice: bool = False) -> dict:
    """The CLI report: counts, theta, case, E and bounds per grid value."""
    sel = case_select(F)
    out = scaling_experiment(F, B_grid)
    out["case"] = sel.case
    out["E"] = sel.E
    out["ratio_mnL1_over_L2"] = sel.ratio
    out["D"] = F.total_degree
    out["bounds"] = [
        {
            "B": b,
            "liouville": liouville_bound(F, b),
            "central": mp.nstr(central_bound(F.total_degree, b), 12) if b >= 2 else None,
        }
        for b in out["B_grid"]
    ]
    if lattice:
        out["lattice"] = [{"B": b, "N": lattice_count(F, b)} for b in out["B_grid"]]
    out["notes"] = ["central bound evaluated with d read as the total degree D"]
    return out
