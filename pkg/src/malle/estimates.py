"""Closed-form exponents and bounds, and the totally-split density experiment."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from mpmath import mp, mpf

from .arith import prime_pi, primes_between, primorial, prod_set, smallest_prime_divisor
from .cover import CoverModel, prime_frame
from .frobenius import local_scan


class EstimateError(ValueError):
    pass


def pi(x) -> int:
    return prime_pi(x)


def Pi(x) -> int:
    return primorial(x)


def Pi_S(S) -> int:
    return prod_set(S)


def a_of_G(order: int) -> Fraction:
    """(|G| (1 - 1/l))^-1 with l the smallest prime dividing |G|."""
    ell = smallest_prime_divisor(order)
    return Fraction(ell, order * (ell - 1))


def alpha(order: int, delta) -> Fraction:
    delta = Fraction(delta)
    if delta <= 0:
        raise EstimateError("delta must be positive")
    return (1 - Fraction(1, order)) / delta


@dataclass(frozen=True)
class ExponentReport:
    group_order: int
    smallest_prime_divisor: int
    a_G: Fraction
    inverse_a_G: Fraction
    delta: Fraction
    alpha: Fraction
    delta_P: int
    branching_bounds: tuple
    delta_P_at_least_inverse_a: bool
    notes: tuple

    def to_json(self) -> dict:
        d = asdict(self)
        for k in ("a_G", "inverse_a_G", "delta", "alpha"):
            d[k] = str(d[k])
        d["branching_bounds"] = [float(b) for b in self.branching_bounds]
        d["notes"] = list(self.notes)
        return d


def exponents(model: CoverModel, delta=None) -> ExponentReport:
    """a(G), alpha(G, delta), and the two branching-index upper bounds.

    ``delta`` defaults to delta_P.  The flag checks delta_P >= |G|(1 - 1/l),
    i.e. a(G) >= 1/delta_P.
    """
    G, g, r = model.group_order, model.genus, model.branch_count
    delta = Fraction(model.delta_P if delta is None else delta)
    ell = smallest_prime_divisor(G)
    a = a_of_G(G)
    with mp.workdps(40):
        lg = mp.log(G)
        bounds = (mpf(3 * (2 * g + 1) * G * G) * lg, mpf(3 * r * G**3) * lg)
    return ExponentReport(
        group_order=G, smallest_prime_divisor=ell, a_G=a, inverse_a_G=1 / a, delta=delta,
        alpha=alpha(G, delta), delta_P=model.delta_P, branching_bounds=bounds,
        delta_P_at_least_inverse_a=model.delta_P >= 1 / a,
        notes=("the branching-index chain compares delta_P with |G|(1-1/l) = 1/a(G)",),
    )


@dataclass(frozen=True)
class Constants:
    C1: float = 1.0
    C2: float = 1.0
    C3: float = 1.0
    C4: float = 1.0
    C5: float = 1.0
    C6: float = 1.0
    C7: float = 1.0


def lower_bound_rhs(model: CoverModel, x, S=(), chi=None, constants: Constants | None = None) -> dict:
    """Right-hand sides of the unconditional and conditional lower bounds.

    ``chi`` defaults to 1 (no Frobenius condition on S_x).  Values are not
    clamped at zero.
    """
    c = constants or Constants()
    frame = prime_frame(model)
    if not x > frame.p0:
        raise EstimateError(f"x = {x} must exceed p_0 = {frame.p0}")
    chi = Fraction(1) if chi is None else Fraction(chi)
    G = model.group_order
    with mp.workdps(50):
        big = mpf(Pi(x))
        n = pi(x)
        lead = mpf(chi.numerator) / chi.denominator / mpf(Pi_S(S)) ** 2
        unc = c.C1 * lead * big ** (1 - mpf(1) / G) / (mp.log(big) ** c.C2 * mpf(c.C3) ** n) - c.C4
        cond = c.C5 * lead * big / mpf(c.C6) ** n - c.C7
        return {"x": x, "pi_x": n, "Pi_x": str(Pi(x)), "chi": str(chi),
                "lower_unconditional": mp.nstr(unc, 20), "lower_conditional": mp.nstr(cond, 20)}


@dataclass(frozen=True)
class DensityRow:
    x: float
    sx_size: int
    exact_density: Fraction
    observed: int
    N: int
    frequency: float
    sigma: float
    within_3sigma: bool
    corollary_bound: Fraction
    small_sample: bool

    def to_row(self) -> dict:
        return {
            "x": self.x, "Sx_size": self.sx_size, "exact_density": str(self.exact_density),
            "exact_density_float": float(self.exact_density), "observed": self.observed, "N": self.N,
            "frequency": self.frequency, "sigma": self.sigma, "within_3sigma": int(self.within_3sigma),
            "corollary_bound": float(self.corollary_bound), "small_sample": int(self.small_sample),
        }


def split_mask(model: CoverModel, primes, N: int) -> np.ndarray:
    """Boolean mask over t0 = 1..N: trivial Frobenius class at every prime."""
    t = np.arange(1, N + 1, dtype=np.int64)
    mask = np.ones(N, dtype=bool)
    triv = model.trivial_class.id
    for p in primes:
        table = np.zeros(p, dtype=bool)
        table[list(local_scan(model, p).class_residues[triv])] = True
        mask &= table[t % p]
    return mask


def density_experiment(model: CoverModel, x_grid, N: int) -> list[DensityRow]:
    """Exact CRT density of totally split t0 on S_x against the observed frequency in [1, N]."""
    frame = prime_frame(model)
    G, r = model.group_order, model.branch_count
    lam = Fraction(r * G - 1, r * r * G * G)
    beta = prod_set(frame.s0_primes)
    triv = model.trivial_class.id
    rows = []
    for x in x_grid:
        Sx = primes_between(frame.p0, x)
        dens = Fraction(1)
        for p in Sx:
            dens *= Fraction(local_scan(model, p).nu[triv], p)
        hits = int(split_mask(model, Sx, N).sum())
        d = float(dens)
        sigma = math.sqrt(d * (1 - d) / N)
        freq = hits / N
        rows.append(DensityRow(
            x=x, sx_size=len(Sx), exact_density=dens, observed=hits, N=N, frequency=freq,
            sigma=sigma, within_3sigma=abs(freq - d) <= 3 * sigma + 1e-15,
            corollary_bound=Fraction(1, beta) * ((2 - lam) / G) ** len(Sx),
            small_sample=N < 10 * prod_set(Sx),
        ))
    return rows


def log_primorial_ratio(x) -> float:
    """log Pi(x) / x."""
    return float(mp.log(mpf(Pi(x))) / x) if x >= 2 else float("nan")
