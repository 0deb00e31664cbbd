"""Residues t0 mod p classified by the Frobenius class of the specialization."""
from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .cover import CoverModel, ModelError, bad_primes
from .polyalg import factorization_type, gf_from, gf_gcd, gf_sub, gf_trim

EXCLUDED = "Excluded"
BAD_PRIME = "BadPrime"

_memo: dict = {}


class BadPrimeError(ValueError):
    pass


@lru_cache(maxsize=64)
def _bad(model: CoverModel) -> frozenset:
    return bad_primes(model)


@lru_cache(maxsize=4096)
def _discs_mod(model: CoverModel, p: int) -> tuple:
    return tuple(gf_from(model.disc, p)), tuple(gf_from(model.disc_q, p))


def _horner_mod(cs, t, p):
    acc = 0
    for c in reversed(cs):
        acc = (acc * t + c) % p
    return acc


def _classify(model: CoverModel, p: int, t: int, dp, dq) -> str:
    if _horner_mod(dp, t, p) == 0 or _horner_mod(dq, t, p) == 0:
        return EXCLUDED
    ftype = factorization_type(model.Q.eval_t_mod(t, p), p)
    cid = model.class_for_type(ftype)
    if cid is None:
        raise ModelError(f"factorization type {ftype} at p={p}, t0={t} matches no class")
    return cid


def frobenius_class(model: CoverModel, p: int, t0: int) -> str:
    """Class id of Frob_p at the specialization t0, or EXCLUDED / BAD_PRIME.

    t0 is excluded when it meets a branch point mod p, i.e. when the model
    (or observation) discriminant vanishes at t0 mod p.
    """
    if p in _bad(model):
        return BAD_PRIME
    return _classify(model, p, t0 % p, *_discs_mod(model, p))


@dataclass(frozen=True)
class LocalCosetData:
    p: int
    excluded: frozenset
    class_residues: dict
    nu: dict

    def residues_for(self, class_ids) -> list[int]:
        out = []
        for cid in class_ids:
            out.extend(self.class_residues[cid])
        return sorted(out)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "excluded": sorted(self.excluded),
            "class_residues": {k: list(v) for k, v in sorted(self.class_residues.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LocalCosetData":
        cr = {k: tuple(v) for k, v in obj["class_residues"].items()}
        return cls(int(obj["p"]), frozenset(obj["excluded"]), cr, {k: len(v) for k, v in cr.items()})


def cache_dir() -> Path:
    return Path(os.environ.get("MALLE_CACHE", ".malle-cache"))


def _mulmod_batch(a, b, q, p):
    # a, b: (N, n) residues mod the monic rows of q (N, n+1)
    N, n = a.shape
    c = np.zeros((N, 2 * n - 1), dtype=np.int64)
    for i in range(n):
        ai = a[:, i : i + 1]
        c[:, i : i + n] = (c[:, i : i + n] + ai * b) % p
    for k in range(2 * n - 2, n - 1, -1):
        lead = c[:, k : k + 1]
        c[:, k - n : k] = (c[:, k - n : k] - lead * q[:, :n]) % p
    return c[:, :n]


def _powmod_batch(base, e, q, p):
    N, n = base.shape
    out = np.zeros((N, n), dtype=np.int64)
    out[:, 0] = 1
    while e:
        if e & 1:
            out = _mulmod_batch(out, base, q, p)
        e >>= 1
        if e:
            base = _mulmod_batch(base, base, q, p)
    return out


def _eval_rows(coeffs, ts, p):
    acc = np.zeros_like(ts)
    for c in reversed(coeffs):
        acc = (acc * ts + c % p) % p
    return acc


def _types_batch(model: CoverModel, p: int, ts: np.ndarray) -> list[tuple]:
    """Factorization types of the squarefree Q(t, Y) mod p for all t in ts."""
    n = model.Q.deg_y
    q = np.stack([_eval_rows(model.Q.y_coeff(j).coeffs, ts, p) for j in range(n + 1)], axis=1)
    if n == 1:
        return [(1,)] * len(ts)
    if n == 2 and p != 2:
        disc = (q[:, 1] * q[:, 1] - 4 * q[:, 0]) % p
        chi = [pow(int(d), (p - 1) // 2, p) for d in disc]
        return [(1, 1) if c == 1 else (2,) for c in chi]
    # deg gcd(Q_t, Y^(p^k) - Y) = sum over d | k of d * (number of degree-d factors)
    y = np.zeros((len(ts), n), dtype=np.int64)
    y[:, 1] = 1
    xs, x = [], y
    for _ in range(n // 2):
        x = _powmod_batch(x, p, q, p)
        xs.append(x.tolist())
    qrows = q.tolist()
    out = []
    for idx, row in enumerate(qrows):
        counts = {}
        used = 0
        for k in range(1, n // 2 + 1):
            g = gf_gcd(row, gf_sub(gf_trim(list(xs[k - 1][idx])), [0, 1], p), p)
            e = len(g) - 1 - sum(d * counts.get(d, 0) for d in range(1, k) if k % d == 0)
            counts[k] = e // k
            used += e
        ftype = []
        for d, c in counts.items():
            ftype.extend([d] * c)
        if used < n:
            ftype.append(n - used)
        out.append(tuple(sorted(ftype)))
    return out


def _compute_scan(model: CoverModel, p: int) -> LocalCosetData:
    if p >= 2**31:
        return _compute_scan_slow(model, p)
    ts = np.arange(p, dtype=np.int64)
    dp = _eval_rows(model.disc.coeffs, ts, p)
    dq = _eval_rows(model.disc_q.coeffs, ts, p)
    bad = (dp == 0) | (dq == 0)
    good_ts = ts[~bad]
    types = _types_batch(model, p, good_ts) if len(good_ts) else []
    residues: dict = {cid: [] for cid in model.class_ids}
    for t, ftype in zip(good_ts.tolist(), types):
        cid = model.class_for_type(ftype)
        if cid is None:
            raise ModelError(f"factorization type {ftype} at p={p}, t0={t} matches no class")
        residues[cid].append(t)
    cr = {k: tuple(v) for k, v in residues.items()}
    excluded = frozenset(ts[bad].tolist())
    return LocalCosetData(p, excluded, cr, {k: len(v) for k, v in cr.items()})


def _compute_scan_slow(model: CoverModel, p: int) -> LocalCosetData:
    dp, dq = gf_from(model.disc, p), gf_from(model.disc_q, p)
    residues: dict = {cid: [] for cid in model.class_ids}
    excluded = []
    for t in range(p):
        cid = _classify(model, p, t, dp, dq)
        if cid == EXCLUDED:
            excluded.append(t)
        else:
            residues[cid].append(t)
    cr = {k: tuple(v) for k, v in residues.items()}
    return LocalCosetData(p, frozenset(excluded), cr, {k: len(v) for k, v in cr.items()})


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def local_scan(model: CoverModel, p: int, use_cache: bool = True) -> LocalCosetData:
    """Classify every residue mod a good prime p.

    Results are memoized in-process and, when ``use_cache`` is set, stored
    under ``$MALLE_CACHE/<model-hash>/<p>.json``.
    """
    if p in _bad(model):
        raise BadPrimeError(f"{p} is a bad prime for this model")
    key = (model.model_hash, p)
    if key in _memo:
        return _memo[key]
    path = cache_dir() / model.model_hash / f"{p}.json"
    data = None
    if use_cache and path.exists():
        try:
            data = LocalCosetData.from_json(json.loads(path.read_text()))
        except (ValueError, KeyError):
            data = None
    if data is None:
        data = _compute_scan(model, p)
        if use_cache:
            _write_atomic(path, json.dumps(data.to_json(), separators=(",", ":")))
    _memo[key] = data
    return data


def _scan_worker(args):
    model, p, use_cache = args
    return local_scan(model, p, use_cache)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("MALLE_THREADS", "1")))
    except ValueError:
        return 1


def scan_primes(model: CoverModel, primes, workers: int | None = None,
                use_cache: bool = True) -> list[LocalCosetData]:
    """local_scan over many good primes, returned in ascending p."""
    primes = sorted(p for p in primes if p not in _bad(model))
    workers = default_workers() if workers is None else workers
    todo = [p for p in primes if (model.model_hash, p) not in _memo]
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for data in ex.map(_scan_worker, [(model, p, use_cache) for p in todo]):
                _memo[(model.model_hash, data.p)] = data
    return [local_scan(model, p, use_cache) for p in primes]


# ---------------------------------------------------------------------------
# Lang-Weil window for nu
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LangWeilRow:
    class_id: str
    nu: int
    lower: Fraction
    upper: Fraction
    passed: bool
    lower_positive: bool
    in_frame: bool


def _sqrt_hi(n: int, scale: int = 10**6) -> Fraction:
    """Rational upper approximation of sqrt(n), exact for perfect squares."""
    r = math.isqrt(n)
    if r * r == n:
        return Fraction(r)
    return Fraction(math.isqrt(n * scale * scale) + 1, scale)


def _within(a: Fraction, g: int, p: int) -> bool:
    # a >= -2g*sqrt(p), decided without floating point
    return a >= 0 or a * a <= 4 * g * g * p


def check_prop41(data: LocalCosetData, model: CoverModel) -> dict:
    """Compare each nu(C) with (|C|/|G|)(p+1 -+ 2g sqrt(p) ...) exactly.

    ``lower``/``upper`` are rational outer approximations of the irrational
    bounds (exact when g = 0); ``passed`` is decided exactly by squaring.
    """
    p, G, g, r = data.p, model.group_order, model.genus, model.branch_count
    s_hi = _sqrt_hi(4 * g * g * p)
    out = {}
    for cls in model.classes:
        nu = data.nu[cls.id]
        w = Fraction(cls.size, G)
        scaled = Fraction(nu * G, cls.size) - (p + 1)
        ok_lo = _within(scaled + G * (r + 1), g, p)
        ok_hi = _within(-scaled, g, p)
        c = p + 1 - G * (r + 1)
        positive = c > 0 and c * c > 4 * g * g * p
        out[cls.id] = LangWeilRow(
            class_id=cls.id, nu=nu,
            lower=w * (p + 1 - G * (r + 1) - s_hi),
            upper=w * (p + 1 + s_hi),
            passed=ok_lo and ok_hi,
            lower_positive=positive,
            in_frame=p >= r * r * G * G,
        )
    return out


def lang_weil_violations(report: dict) -> list[LangWeilRow]:
    """Rows that break the bound, or a non-positive lower bound, at p >= r^2|G|^2."""
    return [row for row in report.values() if row.in_frame and not (row.passed and row.lower_positive)]
