"""Acceptance criteria, one test each.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
one PASS/FAIL line per criterion.  ``python tests/test_acceptance.py`` runs
the same checks without pytest.
"""
import json
import math
import random
import sys
import time
from fractions import Fraction

import sympy

from malle import parse_bipoly, quadratic_model, s3_model
from malle.arith import primes_between
from malle.cli import main as cli_main
from malle.cover import bad_primes
from malle.diophantine import case_select, scaling_experiment
from malle.distinct import fingerprint_partition, growth_fit, kernel_partition
from malle.estimates import density_experiment
from malle.frobenius import check_prop41, local_scan, lang_weil_violations
from malle.polyalg import BiPoly, UniPoly, squarefree_kernel, substitute_shift
from malle.sieve import assemble, brute_force_cross_check, certify, plan, ramification_coset_check
from malle.twist2 import verify_grid

INERT_X30 = {19: ["2A"], 23: ["2A"], 29: ["2A"]}


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def test_01_lang_weil_window():
    quad = quadratic_model()

    def run():
        primes = [p for p in primes_between(16, 997) if p not in bad_primes(quad)]
        bad = []
        for p in primes:
            rep = check_prop41(local_scan(quad, p), quad)
            bad += [(p, r.class_id) for r in rep.values() if not r.passed]
            bad += [(p, r.class_id) for r in lang_weil_violations(rep)]
        return primes, bad

    (primes, bad), dt = _timed(run)
    assert primes[0] == 17 and primes[-1] == 997
    assert bad == []
    d17 = local_scan(quad, 17)
    assert d17.nu["2A"] == 8 and d17.nu["1A"] == 7
    # exhaustive residue oracle at 17
    split = sum(1 for t in range(17) if (t * t - t) % 17 and pow(t * t - t, 8, 17) == 1)
    assert split == d17.nu["1A"]
    assert dt < 10, f"{dt:.1f} s"


def test_02_crt_exactness():
    quad = quadratic_model()

    def run():
        pl = plan(quad, 30, frobenius=INERT_X30)
        out = list(assemble(pl))
        return pl, out, brute_force_cross_check(pl, limit=pl.Bx)

    (pl, out, agrees), dt = _timed(run)
    expected = math.prod(local_scan(quad, p).nu["2A"] for p in (17, 19, 23, 29))
    assert pl.Bx == 215441
    assert pl.expected_count == expected == len(out) == len(set(out))
    assert out == sorted(out) and 1 <= out[0] and out[-1] <= pl.Bx
    assert agrees
    assert dt < 30, f"{dt:.1f} s"


def _is_s3_exact(t0: int) -> bool:
    y = sympy.Symbol("y")
    f = sympy.Poly(y**3 + t0 * y + t0, y, domain="QQ")
    disc = int(sympy.discriminant(f.as_expr(), y))
    nonsquare = disc < 0 or math.isqrt(disc) ** 2 != disc
    return f.is_irreducible and nonsquare


def test_03_jordan_certificate_s3():
    s3 = s3_model()
    pl = plan(s3, 340)
    recs = []
    for t0 in assemble(pl):
        recs.append(certify(t0, pl))
        if len(recs) == 200:
            break
    assert len(recs) == 200
    mismatches = [r.t0 for r in recs if r.full_group_certified != _is_s3_exact(r.t0)]
    assert all(r.full_group_certified for r in recs)
    assert mismatches == []


def test_04_discriminant_within_rho():
    quad, s3 = quadratic_model(), s3_model()
    pl = plan(quad, 30, frobenius=INERT_X30)
    for t0 in assemble(pl):
        rec = certify(t0, pl)
        d = abs(4 * t0 * t0 - 4 * t0)
        assert rec.disc_multiple == d
        assert rec.within_rho and d <= pl.rho_x
        k = squarefree_kernel(t0 * t0 - t0)
        d_field = k if k % 4 == 1 else 4 * k
        assert d % d_field == 0
    pl3 = plan(s3, 340)
    for i, t0 in enumerate(assemble(pl3)):
        if i == 200:
            break
        rec = certify(t0, pl3)
        assert rec.within_rho and abs(s3.disc(t0)) <= pl3.rho_x


def test_05_ramification_coset():
    rep = ramification_coset_check(s3_model(), 7, 10**4, t1=0)
    assert rep["checked"] == len(range(7, 10**4 + 1, 49))
    assert rep["failures"] == []


def test_06_twisting_lemma():
    f = UniPoly((0, -1, 1))
    ds = [-3, -2, -1, 2, 3, 5, 6]
    rep, dt = _timed(lambda: verify_grid(f, ds, (-10**4, 10**4), primes_between(2, 500)))
    assert rep.violations == []
    assert rep.global_checked == len(ds) * (2 * 10**4 + 1 - 2)
    assert rep.local_checked > 0
    assert dt < 60, f"{dt:.1f} s"


def test_07_distinct_field_growth():
    quad = quadratic_model()
    fit = growth_fit(quad, [10**3, 10**4, 10**5], P_max=1000)
    for B, c in zip(fit["B_grid"], fit["counts"]):
        assert c > B ** 0.5
    ts = range(2, 10**5 + 1)
    fp = fingerprint_partition(quad, ts, P_max=1000)
    kp = sorted(kernel_partition(quad, ts).values())
    # kernel 1 (split specializations) never occurs for t0 >= 2
    assert sorted(fp) == kp


def test_08_walkowiak_exponent():
    sq = scaling_experiment(parse_bipoly("Y^2 - T"), [10**2, 10**4, 10**6])
    cu = scaling_experiment(parse_bipoly("Y^3 - T"), [10**3, 10**6, 10**9])
    assert sq["theta_exact"] == "1/2" and sq["pass"]
    assert cu["theta_exact"] == "1/3" and cu["pass"]
    sel = case_select(parse_bipoly("Y^2 - T"))
    assert (sel.case, sel.E) == (2, 6)
    rng = random.Random(2024)
    for _ in range(100):
        n, m = rng.randint(2, 4), rng.randint(0, 3)
        terms = {(0, n): 1}
        for i in range(m + 1):
            for j in range(n):
                if rng.random() < 0.5:
                    terms[(i, j)] = rng.randint(-9, 9)
        terms[(m, 0)] = rng.choice([-3, -2, -1, 1, 2, 3])
        F = BiPoly.from_terms(terms)
        E = rng.randint(1, 6)
        G = substitute_shift(F, E)
        assert G.deg_y == F.deg_y
        assert n * E <= G.total_degree <= n * E + F.deg_t


def test_09_totally_split_density():
    rows = density_experiment(quadratic_model(), [19, 24, 30], 10**6)
    dens = [r.exact_density for r in rows]
    assert dens[0] > dens[1] > dens[2]
    assert dens[2] == Fraction(13 * 10 * 8, 29 * 23 * 19)
    for r in rows:
        assert abs(r.frequency - float(r.exact_density)) <= 3 * r.sigma


def test_10_run_determinism(tmp_path):
    cfg = {
        "model": "builtin:quadratic", "log_y": 75, "delta": 3,
        "frobenius": {str(p): v for p, v in INERT_X30.items()}, "seed": 7,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for tag in ("a", "b"):
        d = tmp_path / tag
        assert cli_main(["run", "--config", str(path), "--out-dir", str(d)]) == 0
        outs.append({f: (d / f).read_bytes() for f in ("records.csv", "fields.csv", "summary.json")})
    assert outs[0] == outs[1]
    summary = json.loads(outs[0]["summary.json"])
    assert summary["x"] == 30.0 and summary["N_lower"] >= 1 and summary["cross_foot_ok"]


if __name__ == "__main__":
    import inspect
    import tempfile
    from pathlib import Path

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_") or not callable(fn):
            continue
        args = [Path(tempfile.mkdtemp())] if inspect.signature(fn).parameters else []
        t = time.perf_counter()
        try:
            fn(*args)
            verdict = "PASS"
        except AssertionError as exc:
            verdict, failed = f"FAIL ({exc})", failed + 1
        print(f"{name}: {verdict}  [{time.perf_counter() - t:.2f} s]")
    sys.exit(1 if failed else 0)
