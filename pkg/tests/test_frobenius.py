import json
import math

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from malle.arith import primes_between
from malle.cover import bad_primes
from malle.frobenius import (
    BAD_PRIME, EXCLUDED, BadPrimeError, LocalCosetData, _compute_scan, _compute_scan_slow, cache_dir,
    check_prop41, frobenius_class, local_scan, lang_weil_violations, scan_primes,
)

Yv = sympy.Symbol("Y")


def sympy_type(model, p, t0):
    expr = sum(int(c) * Yv**j for j, c in enumerate(model.Q.eval_t(t0).coeffs))
    _, facs = sympy.Poly(expr, Yv, modulus=p).factor_list()
    return tuple(sorted(g.degree() for g, e in facs for _ in range(e)))


def test_examples(quad, s3):
    assert frobenius_class(quad, 17, 3) == "2A"
    assert frobenius_class(quad, 17, 18) == EXCLUDED
    assert frobenius_class(s3, 7, 3) == "2A"
    assert frobenius_class(quad, 2, 5) == BAD_PRIME


def test_scan_examples(quad, s3):
    d = local_scan(quad, 17)
    assert (d.nu["1A"], d.nu["2A"], set(d.excluded)) == (7, 8, {0, 1})
    d = local_scan(s3, 7)
    assert (d.nu["1A"], d.nu["2A"], d.nu["3A"], set(d.excluded)) == (0, 3, 2, {0, 2})
    d = local_scan(quad, 3)
    assert sum(d.nu.values()) + len(d.excluded) == 3


def test_scan_rejects_bad_prime(s3):
    with pytest.raises(BadPrimeError):
        local_scan(s3, 3)


def test_check_prop41_examples(quad):
    rep = check_prop41(local_scan(quad, 17), quad)
    for cid in ("1A", "2A"):
        assert (rep[cid].lower, rep[cid].upper) == (6, 9)
        assert rep[cid].passed and rep[cid].lower_positive
    assert lang_weil_violations(rep) == []


def test_quadratic_character_sum(quad):
    for p in primes_between(2, 500):
        if p in bad_primes(quad):
            continue
        d = local_scan(quad, p)
        assert d.nu["2A"] - d.nu["1A"] == 1


def test_partition_invariant(quad, s3):
    for model in (quad, s3):
        for p in primes_between(4, 120):
            if p in bad_primes(model):
                continue
            d = local_scan(model, p)
            parts = [set(d.excluded)] + [set(r) for r in d.class_residues.values()]
            assert sum(len(x) for x in parts) == p
            assert set().union(*parts) == set(range(p))
            assert all(d.nu[c] == len(d.class_residues[c]) for c in d.nu)


def test_batch_scan_matches_slow_path(s3, quad):
    for model in (s3, quad):
        for p in (5, 7, 11, 101, 337, 1009):
            if p in bad_primes(model):
                continue
            fast, slow = _compute_scan(model, p), _compute_scan_slow(model, p)
            assert fast == slow


def test_types_match_sympy_oracle(s3):
    for p in (5, 7, 13):
        for t in range(p):
            cid = frobenius_class(s3, p, t)
            if cid == EXCLUDED:
                continue
            assert s3.get_class(cid).cycle_type == sympy_type(s3, p, t)


def test_cache_round_trip(quad):
    d = local_scan(quad, 101)
    path = cache_dir() / quad.model_hash / "101.json"
    assert path.exists()
    again = LocalCosetData.from_json(json.loads(path.read_text()))
    assert again == d
    assert json.dumps(again.to_json(), sort_keys=True) == json.dumps(d.to_json(), sort_keys=True)


def test_scan_primes_parallel_equals_serial(s3):
    primes = primes_between(340, 420)
    serial = scan_primes(s3, primes, workers=1, use_cache=False)
    parallel = scan_primes(s3, primes, workers=2, use_cache=False)
    assert [d.p for d in serial] == sorted(primes)
    assert serial == parallel


@pytest.mark.parametrize("name", ["quad", "s3"])
def test_chebotarev_frequencies(name, request):
    model = request.getfixturevalue(name)
    counts = {c.id: 0 for c in model.classes}
    total = 0
    for d in scan_primes(model, primes_between(5, 2000)):
        for cid, n in d.nu.items():
            counts[cid] += n
        total += sum(d.nu.values())
    for c in model.classes:
        q = c.size / model.group_order
        sigma = math.sqrt(q * (1 - q) / total)
        assert abs(counts[c.id] / total - q) <= 3 * sigma + 0.01


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([5, 7, 11, 13, 17, 19, 23, 337]), st.integers(-10**6, 10**6))
def test_coset_well_defined(p, t0):
    from malle import s3_model
    model = s3_model()
    assert frobenius_class(model, p, t0) == frobenius_class(model, p, t0 + p)
    assert frobenius_class(model, p, t0) == frobenius_class(model, p, t0 % p)
