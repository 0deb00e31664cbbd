"""Certified lower bounds on the number of distinct specialized fields.

Two specializations whose Frobenius cycle types differ at a prime where both
are unramified generate non-isomorphic fields.  Records are grouped by
signature, groups that are not provably different are merged, and the number
of merged parts is a lower bound for the number of distinct fields.  For
|G| = 2 the squarefree kernel of the discriminant is an exact key.
"""
from __future__ import annotations

import hashlib
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .arith import primes_upto
from .cover import CoverModel
from .frobenius import _bad, frobenius_class, local_scan
from .polyalg import squarefree_kernel, squarefree_kernels, value_kernels

RAMIFIED = "R"
EXCLUDED_SYM = "X"
DEFAULT_PMAX = 1000


class DistinctError(ValueError):
    pass


@dataclass(frozen=True)
class Fingerprint:
    window: tuple
    signature: tuple

    def digest(self) -> str:
        blob = ",".join(f"{p}:{s}" for p, s in zip(self.window, self.signature))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class FieldKey:
    kind: str  # "Exact" or "FingerprintClass"
    value: object

    def __str__(self):
        return f"{'k' if self.kind == 'Exact' else 'fp'}:{self.value}"


def window(model: CoverModel, P_max: int = DEFAULT_PMAX) -> tuple:
    bad = _bad(model)
    return tuple(p for p in primes_upto(P_max) if p not in bad)


def _quadratic(model: CoverModel) -> bool:
    return model.Q.deg_y == 2


def _symbol(model: CoverModel, p: int, t0: int) -> str:
    if _quadratic(model):
        # exact: p ramifies in Q(sqrt k) iff p | k (p odd); otherwise (k/p) decides
        k = squarefree_kernel(int(model.disc_q(t0)))
        if k % p == 0:
            return RAMIFIED
        ids = {c.cycle_type: c.id for c in model.classes}
        return ids[(1, 1)] if pow(k % p, (p - 1) // 2, p) == 1 else ids[(2,)]
    if model.disc_q(t0) % p == 0:
        return RAMIFIED
    cid = frobenius_class(model, p, t0)
    return EXCLUDED_SYM if cid == "Excluded" else cid


def fingerprint(model: CoverModel, t0: int, P_max: int = DEFAULT_PMAX, seed: int = 0) -> Fingerprint:
    """Frobenius signature of t0 over the good primes <= P_max.

    ``seed`` is accepted for interface symmetry; signatures use only
    factorization types, which do not depend on it.
    """
    if model.disc(t0) == 0 or model.disc_q(t0) == 0:
        raise DistinctError(f"t0 = {t0} is a branch point")
    w = window(model, P_max)
    return Fingerprint(w, tuple(_symbol(model, p, t0) for p in w))


def field_key(model: CoverModel, t0: int) -> FieldKey:
    if model.group_order == 2:
        d = int(model.disc_q(t0))
        if d == 0:
            raise DistinctError(f"t0 = {t0} is a branch point")
        return FieldKey("Exact", squarefree_kernel(d))
    return FieldKey("FingerprintClass", fingerprint(model, t0).digest())


# ---------------------------------------------------------------------------
# batch signatures
# ---------------------------------------------------------------------------


def _symbols(model: CoverModel) -> list[str]:
    return [*model.class_ids, RAMIFIED, EXCLUDED_SYM]


def _eval_mod(coeffs, ts, p):
    acc = np.zeros_like(ts)
    for c in reversed(coeffs):
        acc = (acc * ts + int(c) % p) % p
    return acc


def _kernels(model: CoverModel, ts) -> list[int]:
    """Squarefree kernels of disc Q(t, Y); 0 at branch points."""
    ts = [int(t) for t in ts]
    if not ts:
        return []
    vals = [int(model.disc_q(t)) for t in ts]
    lo, hi = min(ts), max(ts)
    if max(abs(v) for v in vals) >= 1 << 62 and hi - lo < 4 * len(ts) + 1000:
        table = value_kernels(model.disc_q, lo, hi + 1)
        return [table[t - lo] for t in ts]
    it = iter(squarefree_kernels([v for v in vals if v]))
    return [next(it) if v else 0 for v in vals]


def signature_matrix(model: CoverModel, t0s, P_max: int = DEFAULT_PMAX) -> tuple[tuple, np.ndarray]:
    """Signatures of many t0 at once, as codes into ``_symbols(model)``."""
    w = window(model, P_max)
    ids = model.class_ids
    n_cls = len(ids)
    ts = list(t0s)
    out = np.empty((len(ts), len(w)), dtype=np.int8)
    if _quadratic(model):
        by_type = {c.cycle_type: k for k, c in enumerate(model.classes)}
        split, inert = by_type[(1, 1)], by_type[(2,)]
        ks = _kernels(model, ts)
        for j, p in enumerate(w):
            qr = np.full(p, inert, dtype=np.int8)
            qr[np.unique(np.arange(1, p, dtype=np.int64) ** 2 % p)] = split
            qr[0] = n_cls
            out[:, j] = qr[np.array([k % p for k in ks], dtype=np.int64)]
        return w, out
    for j, p in enumerate(w):
        red = np.array([int(t) % p for t in ts], dtype=np.int64)
        data = local_scan(model, p)
        table = np.full(p, n_cls + 1, dtype=np.int8)
        for k, cid in enumerate(ids):
            table[list(data.class_residues[cid])] = k
        ram = _eval_mod(model.disc_q.coeffs, np.arange(p, dtype=np.int64), p) == 0
        table[ram] = n_cls
        out[:, j] = table[red]
    return w, out


# ---------------------------------------------------------------------------
# partition
# ---------------------------------------------------------------------------


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            if b < a:
                a, b = b, a
            self.parent[b] = a


def _bitrows(flags: np.ndarray) -> list[int]:
    packed = np.packbits(flags, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _all_masks(sigs: np.ndarray, n_cls: int) -> list[tuple]:
    per_cls = [_bitrows(sigs == c) for c in range(n_cls)]
    wild = _bitrows(sigs >= n_cls)
    return [([pc[i] for pc in per_cls], wild[i]) for i in range(sigs.shape[0])]


def _compatible(a, b) -> bool:
    ca, wa = a
    cb, wb = b
    keep = ~(wa | wb)
    return all(((x ^ y) & keep) == 0 for x, y in zip(ca, cb))


def _merge_groups(sigs: np.ndarray, n_cls: int, block: int = 16) -> list[int]:
    """Union groups that no window prime certifies as different.

    Candidate pairs come from buckets on blocks of positions free of wildcards
    in both rows; any compatible pair whose wildcards meet fewer blocks than
    exist shares such a clean block.  Rows with many wildcards are compared
    against every row with enough wildcards to escape the blocks.
    """
    G, L = sigs.shape
    masks = _all_masks(sigs, n_cls)
    dsu = _DSU(G)
    if G <= 1 or L == 0:
        for i in range(1, G):
            dsu.union(0, i)
        return [dsu.find(i) for i in range(G)]
    nb = max(1, L // block)
    cuts = [L * i // nb for i in range(nb + 1)]
    blocks = list(zip(cuts, cuts[1:]))
    wild = sigs >= n_cls
    for s, e in blocks:
        clean = ~wild[:, s:e].any(axis=1)
        buckets = defaultdict(list)
        for i in np.nonzero(clean)[0].tolist():
            buckets[sigs[i, s:e].tobytes()].append(i)
        for members in buckets.values():
            for x in range(len(members)):
                for y in range(x + 1, len(members)):
                    i, k = members[x], members[y]
                    if dsu.find(i) != dsu.find(k) and _compatible(masks[i], masks[k]):
                        dsu.union(i, k)
    # pairs touching every block through their wildcards
    touched = np.stack([wild[:, s:e].any(axis=1) for s, e in blocks], axis=1).sum(axis=1)
    order = np.argsort(-touched, kind="stable").tolist()
    for i in order:
        if 2 * touched[i] < nb:
            break
        for k in np.nonzero(touched + touched[i] >= nb)[0].tolist():
            if k != i and dsu.find(i) != dsu.find(k) and _compatible(masks[i], masks[k]):
                dsu.union(i, k)
    return [dsu.find(i) for i in range(G)]


@dataclass
class DistinctResult:
    lower_bound: int
    exact: bool
    parts: list  # sorted lists of t0
    keys: list  # FieldKey per part
    fingerprint_count: int | None = None
    dropped: tuple = ()

    def rows(self) -> list[dict]:
        return [
            {"field_key": str(k), "representative_t0": part[0], "multiplicity": len(part)}
            for k, part in zip(self.keys, self.parts)
        ]


def fingerprint_partition(model: CoverModel, t0s, P_max: int = DEFAULT_PMAX,
                          with_keys: bool = False):
    """Parts of the fingerprint partition, each sorted, ordered by smallest t0.

    With ``with_keys`` also returns the fingerprint digest of each part's
    smallest member.
    """
    t0s = sorted(set(int(t) for t in t0s))
    if not t0s:
        return ([], []) if with_keys else []
    w, sigs = signature_matrix(model, t0s, P_max)
    uniq, inverse = np.unique(sigs, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    roots = _merge_groups(uniq, len(model.class_ids))
    parts = defaultdict(list)
    first = {}
    for t, g in zip(t0s, inverse.tolist()):
        parts[roots[g]].append(t)
        first.setdefault(roots[g], g)
    order = sorted(parts, key=lambda r: parts[r][0])
    out = [parts[r] for r in order]
    if not with_keys:
        return out
    syms = _symbols(model)
    keys = [Fingerprint(w, tuple(syms[c] for c in uniq[first[r]].tolist())).digest() for r in order]
    return out, keys


def kernel_partition(model: CoverModel, t0s) -> dict:
    """Exact quadratic keys: squarefree kernel -> sorted t0 list."""
    if model.group_order != 2:
        raise DistinctError("kernel keys need |G| = 2")
    ts = sorted(set(int(t) for t in t0s))
    out = defaultdict(list)
    for t, k in zip(ts, _kernels(model, ts)):
        if k == 0:
            raise DistinctError(f"t0 = {t} is a branch point")
        out[k].append(t)
    return dict(out)


def _clean(model: CoverModel, t0s):
    ts = sorted(set(int(getattr(t, "t0", t)) for t in t0s))
    ks = _kernels(model, ts) if model.group_order == 2 else [None] * len(ts)
    keep, dropped = [], []
    for t, k in zip(ts, ks):
        # branch points and split (degenerate) quadratic specializations
        if k in (0, 1) or model.disc(t) == 0 or model.disc_q(t) == 0:
            dropped.append(t)
        else:
            keep.append(t)
    return keep, tuple(dropped)


def count_distinct(records, model: CoverModel, P_max: int = DEFAULT_PMAX,
                   with_fingerprints: bool | None = None) -> DistinctResult:
    """Lower bound on the number of distinct fields among the records.

    Exact (kernel keys) for |G| = 2; otherwise the fingerprint partition.
    """
    t0s, dropped = _clean(model, records)
    if with_fingerprints is None:
        with_fingerprints = model.group_order != 2
    fp_parts, fp_keys = (fingerprint_partition(model, t0s, P_max, with_keys=True)
                         if with_fingerprints else (None, None))
    if model.group_order == 2:
        kp = kernel_partition(model, t0s)
        items = sorted(kp.items(), key=lambda kv: kv[1][0])
        return DistinctResult(
            lower_bound=len(items), exact=True, parts=[v for _, v in items],
            keys=[FieldKey("Exact", k) for k, _ in items],
            fingerprint_count=len(fp_parts) if fp_parts is not None else None, dropped=dropped,
        )
    keys = [FieldKey("FingerprintClass", k) for k in fp_keys]
    return DistinctResult(lower_bound=len(fp_parts), exact=False, parts=fp_parts, keys=keys,
                          fingerprint_count=len(fp_parts), dropped=dropped)


def separation_witness(model: CoverModel, t_a: int, t_b: int, P_max: int = DEFAULT_PMAX):
    """A window prime where both are unramified with different classes, else None."""
    fa, fb = fingerprint(model, t_a, P_max), fingerprint(model, t_b, P_max)
    special = (RAMIFIED, EXCLUDED_SYM)
    for p, a, b in zip(fa.window, fa.signature, fb.signature):
        if a not in special and b not in special and a != b:
            return p
    return None


def growth_fit(model: CoverModel, B_grid, P_max: int = DEFAULT_PMAX, start: int = 1) -> dict:
    """Least-squares slope of log(distinct count among t0 <= B) against log B."""
    grid = [int(b) for b in B_grid]
    if len(grid) < 3 or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 2:
        raise DistinctError("growth_fit needs >= 3 strictly increasing bounds >= 2")
    counts = []
    keys: set = set()
    t = start
    for B in grid:
        if model.group_order == 2:
            ts = range(t, B + 1)
            for s, k in zip(ts, _kernels(model, ts)):
                if k not in (0, 1) and model.disc(s) != 0:
                    keys.add(k)
            t = B + 1
            counts.append(len(keys))
        else:
            counts.append(count_distinct(range(start, B + 1), model, P_max).lower_bound)
    xs = [math.log(b) for b in grid]
    ys = [math.log(c) if c > 0 else float("-inf") for c in counts]
    if any(math.isinf(y) for y in ys):
        raise DistinctError("a grid point has no distinct field")
    theta = float(np.polyfit(xs, ys, 1)[0])
    floor = 1 - 1 / model.group_order
    return {
        "B_grid": grid,
        "counts": counts,
        "theta": theta,
        "floor_exponent": floor,
        "above_floor": [c > b**floor for b, c in zip(grid, counts)],
    }
