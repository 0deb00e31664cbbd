"""Regular Galois covers given by an integral affine model plus group data."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .arith import is_prime, next_prime, prev_prime, prime_factors
from .polyalg import (
    BiPoly,
    UniPoly,
    discriminant,
    discriminant_y,
    height,
    rational_roots,
    squarefree_part,
)


class ModelError(ValueError):
    """The model data is inconsistent."""


@dataclass(frozen=True)
class ConjClass:
    id: str
    size: int
    order: int
    cycle_type: tuple

    def __post_init__(self):
        object.__setattr__(self, "cycle_type", tuple(sorted(int(c) for c in self.cycle_type)))
        if self.size < 1 or self.order < 1 or not self.cycle_type or min(self.cycle_type) < 1:
            raise ModelError(f"invalid conjugacy class {self.id!r}")

    @property
    def is_trivial(self) -> bool:
        return self.order == 1


@dataclass(frozen=True)
class CoverModel:
    """Validated cover model; build it with :func:`build_model`.

    ``Q`` is the observation polynomial whose factorization type mod p reads
    off the Frobenius class (``Q = P`` is allowed).
    """

    P: BiPoly
    Q: BiPoly
    group_order: int
    classes: tuple
    genus: int
    branch_count: int
    disc: UniPoly
    disc_q: UniPoly
    rad_disc: UniPoly
    delta_P: int
    height_disc: int
    rational_branch_points: tuple
    name: str = ""
    _by_type: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def class_ids(self) -> list[str]:
        return [c.id for c in self.classes]

    @property
    def trivial_class(self) -> ConjClass:
        return next(c for c in self.classes if c.is_trivial)

    @property
    def nontrivial_classes(self) -> list[ConjClass]:
        return sorted((c for c in self.classes if not c.is_trivial), key=lambda c: c.id)

    def get_class(self, cid: str) -> ConjClass:
        for c in self.classes:
            if c.id == cid:
                return c
        raise ModelError(f"unknown class {cid!r}")

    def class_for_type(self, ftype: tuple):
        return self._by_type.get(tuple(ftype))

    @property
    def integer_branch_points(self) -> list[int]:
        return [int(t) for t in self.rational_branch_points if t.denominator == 1]

    @property
    def t1(self) -> int | None:
        """Designated integer branch point: nonzero ones first, smallest |t|."""
        pts = self.integer_branch_points
        if not pts:
            return None
        return min(pts, key=lambda t: (t == 0, abs(t), t < 0))

    def to_json(self) -> dict:
        return {
            "P": self.P.to_json(),
            "Q": self.Q.to_json(),
            "group": {
                "order": self.group_order,
                "classes": [
                    {"id": c.id, "size": c.size, "order": c.order, "cycle_type": list(c.cycle_type)}
                    for c in self.classes
                ],
            },
            "genus": self.genus,
            "branch_count": self.branch_count,
        }

    @property
    def model_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def build_model(P: BiPoly, Q: BiPoly | None, group_order: int, classes, genus: int,
                branch_count: int, name: str = "") -> CoverModel:
    """Validate a model and compute its discriminant data."""
    Q = P if Q is None else Q
    classes = tuple(c if isinstance(c, ConjClass) else ConjClass(**c) for c in classes)
    if not P.is_monic_in_y():
        raise ModelError("P must be monic in Y")
    if not P.is_primitive():
        raise ModelError("P must be primitive")
    if P.deg_y != group_order:
        raise ModelError(f"deg_Y(P) = {P.deg_y} but |G| = {group_order}")
    if not Q.is_monic_in_y() or Q.deg_y < 1:
        raise ModelError("Q must be monic in Y of positive degree")
    if group_order < 2:
        raise ModelError("the group must be nontrivial")
    if sum(c.size for c in classes) != group_order:
        raise ModelError("class sizes do not sum to |G|")
    if len({c.id for c in classes}) != len(classes):
        raise ModelError("duplicate class ids")
    types = [c.cycle_type for c in classes]
    if len(set(types)) != len(types):
        raise ModelError("cycle types do not separate the conjugacy classes")
    for c in classes:
        if sum(c.cycle_type) != Q.deg_y:
            raise ModelError(f"cycle type of {c.id} does not sum to deg_Y(Q)")
        if c.order != math.lcm(*c.cycle_type):
            raise ModelError(f"order of {c.id} incompatible with its cycle type")
    trivial = [c for c in classes if c.is_trivial]
    if len(trivial) != 1 or trivial[0].size != 1 or set(trivial[0].cycle_type) != {1}:
        raise ModelError("exactly one trivial class of size 1 with cycle type (1,...,1) required")
    if genus < 0 or branch_count < 1:
        raise ModelError("genus must be >= 0 and branch_count >= 1")

    disc = discriminant_y(P)
    if disc.is_zero():
        raise ModelError("P is not separable in Y (zero discriminant)")
    disc_q = discriminant_y(Q)
    if disc_q.is_zero():
        raise ModelError("Q is not separable in Y (zero discriminant)")
    delta = disc.degree
    if not delta < 2 * group_order * P.deg_t:
        raise ModelError(f"delta_P = {delta} violates delta_P < 2|G|deg_T(P)")
    rad = squarefree_part(disc)
    branch = tuple(rational_roots(rad))

    if group_order == 2:
        # hyperelliptic cross-check: genus of Y^2 = disc/4
        g2 = max((rad.degree - 1) // 2, 0)
        if g2 != genus:
            raise ModelError(f"genus metadata {genus} but Y^2 model has genus {g2}")

    return CoverModel(
        P=P, Q=Q, group_order=group_order, classes=classes, genus=genus,
        branch_count=branch_count, disc=disc, disc_q=disc_q, rad_disc=rad,
        delta_P=delta, height_disc=height(disc), rational_branch_points=branch,
        name=name, _by_type={c.cycle_type: c.id for c in classes},
    )


def model_from_json(obj: dict, name: str = "") -> CoverModel:
    P = BiPoly.from_json(obj["P"])
    Q = BiPoly.from_json(obj["Q"]) if obj.get("Q") else None
    grp = obj["group"]
    classes = [
        ConjClass(id=str(c["id"]), size=int(c["size"]), order=int(c["order"]),
                  cycle_type=tuple(c["cycle_type"]))
        for c in grp["classes"]
    ]
    return build_model(P, Q, int(grp["order"]), classes, int(obj["genus"]),
                       int(obj["branch_count"]), name=name)


def load_model(path) -> CoverModel:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot read model {path}: {exc}") from exc
    try:
        return model_from_json(obj, name=path.stem)
    except KeyError as exc:
        raise ModelError(f"model file {path} lacks field {exc}") from exc


def translate_model(model: CoverModel, c: int) -> CoverModel:
    """The same cover after T -> T + c; branch points move by -c."""
    return build_model(model.P.shift_t(c), model.Q.shift_t(c), model.group_order, model.classes,
                       model.genus, model.branch_count, name=f"{model.name}@T+{c}")


def bad_primes(model: CoverModel) -> frozenset:
    """A certified superset of the bad primes.

    Union of the primes dividing |G|, and, for both the model discriminant
    and the observation discriminant: the leading coefficient, the content,
    and the discriminant of the squarefree part.
    """
    out = set(prime_factors(model.group_order))
    for d in (model.disc, model.disc_q):
        out.update(prime_factors(int(d.lc)))
        out.update(prime_factors(int(d.content())))
        rad = squarefree_part(d)
        if rad.degree >= 1:
            out.update(prime_factors(int(discriminant(rad))))
    return frozenset(out)


@dataclass(frozen=True)
class PrimeFrame:
    bad_primes: frozenset
    p_minus1: int
    p0: int
    s0_primes: tuple


def prime_frame(model: CoverModel) -> PrimeFrame:
    bad = bad_primes(model)
    bound = model.branch_count**2 * model.group_order**2
    p_minus1 = max([*bad, prev_prime(bound) or 2])
    k = len(model.classes) - 1
    s0 = []
    p = p_minus1
    for _ in range(k):
        p = next_prime(p)
        s0.append(p)
    assert all(is_prime(q) for q in s0)
    return PrimeFrame(bad, p_minus1, s0[-1] if s0 else p_minus1, tuple(s0))


def genus_hyperelliptic(f: UniPoly) -> int:
    """Genus of the smooth model of y^2 = f(t) for nonconstant f."""
    return max((squarefree_part(f).degree - 1) // 2, 0)


__all__ = [
    "ConjClass", "CoverModel", "ModelError", "PrimeFrame", "bad_primes", "build_model",
    "genus_hyperelliptic", "load_model", "model_from_json", "prime_frame", "translate_model",
]
