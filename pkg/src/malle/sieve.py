"""Globalization: CRT sets of integers with prescribed Frobenius data."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator

from .arith import primes_between, primorial, prod_set, valuation
from .cover import CoverModel, ModelError, bad_primes, prime_frame
from .frobenius import EXCLUDED, frobenius_class, local_scan
from .polyalg import discriminant, squarefree_kernel

WILDCARD = "*"


class SieveError(ValueError):
    """Inconsistent plan input or a CRT self-check failure."""


@dataclass(frozen=True)
class FrobeniusData:
    """Admissible classes per prime; ``None`` marks an unconstrained prime."""

    classes: dict

    def constrained(self) -> list[int]:
        return sorted(p for p, c in self.classes.items() if c is not None)

    def chi(self, model: CoverModel) -> Fraction:
        out = Fraction(1)
        for p in self.constrained():
            size = sum(model.get_class(cid).size for cid in self.classes[p])
            out *= Fraction(size, model.group_order)
        return out


def load_frobenius(path) -> dict:
    """Read {"p": ["2A", ...] | "*"} into {p: frozenset | None}."""
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SieveError(f"cannot read Frobenius data {path}: {exc}") from exc
    return parse_frobenius(obj)


def parse_frobenius(obj: dict) -> dict:
    out = {}
    for k, v in obj.items():
        p = int(k)
        if v == WILDCARD or v == [WILDCARD]:
            out[p] = None
        else:
            if isinstance(v, str):
                v = [v]
            if not v:
                raise SieveError(f"empty class set at p={p}")
            out[p] = frozenset(str(c) for c in v)
    return out


@dataclass(frozen=True)
class SievePlan:
    model: CoverModel
    x: float
    S: tuple
    S0: dict
    Sx: tuple
    frobenius: FrobeniusData
    t1: int | None
    beta: int
    Bx: int
    rho_x: int
    chi: Fraction
    expected_count: int
    nu: dict = field(repr=False)

    @property
    def sieve_primes(self) -> list[int]:
        return sorted(self.frobenius.classes)

    def allowed(self, p: int):
        return self.frobenius.classes[p]

    @property
    def density(self) -> Fraction:
        return Fraction(self.expected_count, self.Bx)

    def summary(self) -> dict:
        return {
            "x": self.x,
            "S": list(self.S),
            "S0": {str(p): c for p, c in sorted(self.S0.items())},
            "Sx": list(self.Sx),
            "frobenius": {
                str(p): (sorted(c) if c is not None else WILDCARD)
                for p, c in sorted(self.frobenius.classes.items())
            },
            "t1": self.t1,
            "beta": self.beta,
            "B_x": self.Bx,
            "rho_x": str(self.rho_x),
            "chi": str(self.chi),
            "expected_count": self.expected_count,
        }


def rho(model: CoverModel, x, S=()) -> int:
    """(1 + delta_P) H(Delta_P) (Pi(S) Pi(x))^delta_P, exactly."""
    return (1 + model.delta_P) * model.height_disc * (prod_set(S) * primorial(x)) ** model.delta_P


def _check_S(model: CoverModel, S, t1, frame) -> None:
    if not S:
        return
    if t1 is None:
        raise SieveError("S must be empty: the model has no integer branch point")
    bad = bad_primes(model)
    for p in S:
        if p in bad:
            raise SieveError(f"S contains the bad prime {p}")
        if frame.p_minus1 < p <= frame.p0:
            raise SieveError(f"S prime {p} lies in ]p_-1, p_0]")
        if t1 % p == 0:
            hint = " (t1 = 0: translate T to move the branch point off 0)" if t1 == 0 else ""
            raise SieveError(f"S prime {p} divides t1 = {t1}{hint}")


def plan(model: CoverModel, x, S=(), frobenius: dict | None = None, t1: int | None = None,
         constrain_s0: bool = True) -> SievePlan:
    """Build the globalization data for primes up to x.

    ``frobenius`` maps primes of ]p_0, x] to class-id sets, or to ``None``
    or "*" for no condition; primes of ]p_0, x] it omits are unconstrained.
    """
    frame = prime_frame(model)
    if not x > frame.p0:
        raise SieveError(f"x = {x} must exceed p_0 = {frame.p0}")
    S = tuple(sorted(set(int(p) for p in S)))
    if t1 is None:
        t1 = model.t1
    elif int(t1) not in model.integer_branch_points:
        raise SieveError(f"t1 = {t1} is not an integer branch point")
    _check_S(model, S, t1, frame)

    frobenius = parse_frobenius({str(k): (WILDCARD if v is None else sorted(v) if not isinstance(v, str) else v)
                                 for k, v in (frobenius or {}).items()})
    Sx = tuple(p for p in primes_between(frame.p0, x) if p not in S)
    for p, cls in frobenius.items():
        if p not in Sx:
            raise SieveError(f"Frobenius datum at p={p} outside S_x")
        for cid in cls or ():
            try:
                model.get_class(cid)
            except ModelError as exc:
                raise SieveError(str(exc)) from exc
    nontriv = model.nontrivial_classes
    S0 = {p: c.id for p, c in zip(frame.s0_primes, nontriv)}
    table = {p: (frozenset([S0[p]]) if constrain_s0 else None) for p in frame.s0_primes}
    for p in Sx:
        table[p] = frozenset(frobenius[p]) if frobenius.get(p) is not None else None
    fd = FrobeniusData(table)

    nu = {}
    for p, cls in table.items():
        if cls is None:
            nu[p] = p
        else:
            scan = local_scan(model, p)
            nu[p] = sum(scan.nu[c] for c in cls)
    beta = prod_set(frame.s0_primes)
    return SievePlan(
        model=model, x=x, S=S, S0=S0, Sx=Sx, frobenius=fd, t1=t1,
        beta=beta, Bx=beta * prod_set(S) ** 2 * prod_set(Sx), rho_x=rho(model, x, S),
        chi=fd.chi(model), expected_count=math.prod(nu.values()), nu=nu,
    )


# ---------------------------------------------------------------------------
# CRT enumeration
# ---------------------------------------------------------------------------


def _crt_merge(A: list[int], M: int, R, q: int) -> list[int]:
    """All t mod M*q with t mod M in A and t mod q in R, sorted."""
    inv = pow(M, -1, q)
    out = [a + M * ((r - a) * inv % q) for r in R for a in A]
    out.sort()
    return out


def _constraints(plan: SievePlan) -> tuple[list[tuple[int, list[int]]], int]:
    cons, wild = [], 1
    for p in plan.sieve_primes:
        cls = plan.allowed(p)
        if cls is None:
            wild *= p
            continue
        try:
            res = local_scan(plan.model, p).residues_for(sorted(cls))
        except KeyError as exc:
            raise SieveError(f"missing local data at p={p}") from exc
        cons.append((p, res))
    for p in plan.S:
        cons.append((p * p, [(plan.t1 + p) % (p * p)]))
    return cons, wild


def assemble(plan: SievePlan) -> Iterator[int]:
    """Lazily yield the CRT set in ascending order within [1, B(x)].

    Unconstrained primes are stepped over as whole blocks; the largest
    constrained modulus is filtered on the fly instead of being materialized.
    """
    cons, wild = _constraints(plan)
    cons.sort(key=lambda c: c[0])
    q, rs = 1, None
    if len(cons) > 1:
        q, R = cons.pop()
        rs = set(R)
    A, M = [0], 1
    for m, R in cons:
        A = _crt_merge(A, M, R, m)
        M *= m
    Mc = M * q
    zero_seen = False
    for w in range(wild):
        base = Mc * w
        if rs is None:
            stream = (base + a for a in A)
        else:
            stream = (base + t for j in range(q) for t in (a + M * j for a in A) if t % q in rs)
        for t in stream:
            if t == 0:
                # 0 and B(x) are the same class; keep the output inside [1, B(x)]
                zero_seen = True
                continue
            yield t
    if zero_seen:
        yield plan.Bx


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecializationRecord:
    t0: int
    disc_multiple: int
    class_hits: dict
    ram_hits: dict
    full_group_certified: bool
    within_rho: bool
    flags: tuple = ()

    def to_row(self) -> dict:
        return {
            "t0": self.t0,
            "disc_multiple": self.disc_multiple,
            "class_hits": ";".join(f"{p}:{c}" for p, c in sorted(self.class_hits.items())),
            "ram_hits": ";".join(f"{p}:{int(v)}" for p, v in sorted(self.ram_hits.items())),
            "full_group_certified": int(self.full_group_certified),
            "within_rho": int(self.within_rho),
        }


RECORD_FIELDS = ["t0", "disc_multiple", "class_hits", "ram_hits", "full_group_certified", "within_rho"]


def obs_discriminant(model: CoverModel, t0: int) -> int:
    """Discriminant of the integer polynomial Q(t0, Y)."""
    return int(discriminant(model.Q.eval_t(t0)))


def ramification_witness(model: CoverModel, p: int, t0: int) -> tuple[bool, bool]:
    """(witness, conclusive): v_p(disc Q(t0,Y)) > 0, exact for |G| = 2 and odd p."""
    d = obs_discriminant(model, t0)
    if d == 0:
        return False, False
    if model.Q.deg_y == 2 and p != 2:
        return squarefree_kernel(d) % p == 0, True
    return valuation(d, p) > 0, valuation(d, p) % 2 == 1


def certify(t0: int, plan: SievePlan) -> SpecializationRecord:
    """Independently re-derive the local behaviour of t0 and certify it."""
    model = plan.model
    hits = {}
    for p in plan.sieve_primes:
        cid = frobenius_class(model, p, t0)
        allowed = plan.allowed(p)
        if allowed is not None and cid not in allowed:
            raise SieveError(f"t0={t0}: class {cid} at p={p} contradicts the plan {sorted(allowed)}")
        hits[p] = cid
    flags = []
    ram = {}
    for p in plan.S:
        coset = (t0 - plan.t1 - p) % (p * p) == 0
        witness, conclusive = ramification_witness(model, p, t0)
        if not conclusive:
            flags.append(f"ram-inconclusive:{p}")
        ram[p] = coset and witness
    seen = {c for c in hits.values() if c != EXCLUDED}
    # Jordan: a subgroup meeting every conjugacy class is the whole group
    nontriv = {c.id for c in model.nontrivial_classes}
    full = nontriv <= seen
    d = abs(model.disc(t0))
    return SpecializationRecord(
        t0=t0, disc_multiple=int(d), class_hits=hits, ram_hits=ram,
        full_group_certified=full, within_rho=d <= plan.rho_x, flags=tuple(flags),
    )


def disc_bound(plan: SievePlan) -> int:
    """(1 + delta_P) H(Delta_P) B(x)^delta_P."""
    m = plan.model
    return (1 + m.delta_P) * m.height_disc * plan.Bx ** m.delta_P


def _member(plan: SievePlan, t0: int) -> bool:
    for p in plan.S:
        if (t0 - plan.t1 - p) % (p * p):
            return False
    for p in plan.sieve_primes:
        allowed = plan.allowed(p)
        if allowed is not None and frobenius_class(plan.model, p, t0) not in allowed:
            return False
    return True


def brute_force_cross_check(plan: SievePlan, limit: int = 10**7) -> bool:
    """Compare assemble() with a direct membership loop over [1, min(B, limit)]."""
    if limit > 10**7:
        raise SieveError("limit must be <= 10^7")
    top = min(plan.Bx, limit)
    direct = [t for t in range(1, top + 1) if _member(plan, t)]
    crt = []
    for t in assemble(plan):
        if t > top:
            break
        crt.append(t)
    return direct == sorted(crt)


def ramification_coset_check(model: CoverModel, p: int, limit: int, t1: int | None = None) -> dict:
    """Ramification witness v_p(disc Q(t0,Y)) >= 2 over the coset t1 + p mod p^2."""
    t1 = model.t1 if t1 is None else t1
    if t1 is None:
        raise SieveError("no integer branch point")
    start = (t1 + p) % (p * p) or p * p
    checked, failures = 0, []
    for t0 in range(start, limit + 1, p * p):
        d = obs_discriminant(model, t0)
        checked += 1
        if d == 0 or valuation(d, p) < 2:
            failures.append(t0)
    return {"p": p, "t1": t1, "checked": checked, "failures": failures}


# ---------------------------------------------------------------------------
# upper bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UpperBoundReport:
    exact: int
    chi: Fraction
    lam: Fraction
    bound: Fraction
    bound_without_beta: Fraction
    sx_size: int
    passed: bool | None
    passed_without_beta: bool | None


def upper_bound_check(model: CoverModel, x, classes=None) -> UpperBoundReport:
    """Exact N(empty, F_x) = prod nu against chi Pi(S_x)/beta (2 - lambda)^|S_x|.

    ``classes`` is the admissible set used at every prime of S_x (default
    the trivial class, i.e. totally split).
    """
    classes = frozenset(classes or [model.trivial_class.id])
    frame = prime_frame(model)
    Sx = primes_between(frame.p0, x)
    r, G = model.branch_count, model.group_order
    lam = Fraction(r * G - 1, r * r * G * G)
    if r >= 2 and not 0 < lam <= Fraction(1, 4):
        raise ModelError(f"lambda = {lam} outside ]0, 1/4]")
    exact = 1
    for p in Sx:
        data = local_scan(model, p)
        exact *= sum(data.nu[c] for c in classes)
    size = sum(model.get_class(c).size for c in classes)
    chi = Fraction(size, G) ** len(Sx)
    beta = prod_set(frame.s0_primes)
    core = chi * prod_set(Sx) * (2 - lam) ** len(Sx)
    bound = core / beta
    asserted = bool(Sx)
    return UpperBoundReport(
        exact=exact, chi=chi, lam=lam, bound=bound, bound_without_beta=core, sx_size=len(Sx),
        passed=(exact <= bound) if asserted else None,
        passed_without_beta=(exact <= core) if asserted else None,
    )
