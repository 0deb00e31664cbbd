import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from malle.cover import build_model
from malle.distinct import (
    RAMIFIED, DistinctError, count_distinct, fingerprint, fingerprint_partition, growth_fit,
    _symbols, kernel_partition, separation_witness, signature_matrix,
)
from malle.frobenius import frobenius_class
from malle.models import C2_CLASSES
from malle.polyalg import parse_bipoly, squarefree_kernel


def test_fingerprint_examples(quad):
    assert fingerprint(quad, 2).signature == fingerprint(quad, 9).signature
    assert fingerprint(quad, 2) != fingerprint(quad, 3)
    assert separation_witness(quad, 2, 3) == 5
    with pytest.raises(DistinctError):
        fingerprint(quad, 1)


def test_count_examples(quad):
    res = count_distinct([2, 3, 9], quad)
    assert res.lower_bound == 2 and res.exact
    assert count_distinct([5], quad).lower_bound == 1


def test_small_range_matches_kernel_enumeration(quad):
    ts = range(2, 102)
    kernels = {squarefree_kernel(t * t - t) for t in ts}
    assert count_distinct(ts, quad).lower_bound == len(kernels)
    assert len(fingerprint_partition(quad, ts, P_max=1000)) == len(kernels)


def test_quadratic_exactness_1e4(quad):
    ts = range(2, 10**4 + 1)
    assert sorted(fingerprint_partition(quad, ts, 1000)) == sorted(kernel_partition(quad, ts).values())


def test_soundness_every_split_has_a_witness(s3):
    ts = list(range(2, 400))
    parts = fingerprint_partition(s3, ts, P_max=200)
    reps = [p[0] for p in parts]
    rng = random.Random(5)
    for _ in range(300):
        a, b = rng.sample(reps, 2)
        p = separation_witness(s3, a, b, P_max=200)
        assert p is not None
        ca, cb = frobenius_class(s3, p, a), frobenius_class(s3, p, b)
        assert ca != cb and s3.disc_q(a) % p and s3.disc_q(b) % p


def test_signature_matrix_matches_scalar(s3):
    ts = [2, 5, 17, 40, 1001]
    syms = _symbols(s3)
    w, mat = signature_matrix(s3, ts, P_max=100)
    for row, t in zip(mat, ts):
        assert fingerprint(s3, t, P_max=100).window == w
        assert tuple(syms[c] for c in row) == fingerprint(s3, t, P_max=100).signature


def test_monotone_in_pmax(s3):
    ts = range(2, 600)
    counts = [len(fingerprint_partition(s3, ts, P_max=P)) for P in (20, 50, 200)]
    assert counts == sorted(counts)


def test_order_independent(s3):
    ts = list(range(2, 300))
    shuffled = ts[:]
    random.Random(1).shuffle(shuffled)
    a = count_distinct(ts, s3, 100)
    b = count_distinct(shuffled, s3, 100)
    assert a.lower_bound == b.lower_bound and a.parts == b.parts


def test_growth_fit_quadratic(quad):
    fit = growth_fit(quad, [10**3, 10**4, 10**5], 1000)
    assert fit["counts"] == [981, 9942, 99823]
    assert all(fit["above_floor"]) and fit["theta"] > 0.9


def test_growth_fit_constant_kernel_family():
    # Y^2 = 2 T^2: every specialization is Q(sqrt 2)
    m = build_model(parse_bipoly("Y^2 - 2*T^2"), None, 2, C2_CLASSES, genus=0, branch_count=2)
    fit = growth_fit(m, [10**2, 10**3, 10**4])
    assert fit["counts"] == [1, 1, 1] and abs(fit["theta"]) < 1e-9


def test_growth_fit_rejects_degenerate_grid(quad):
    with pytest.raises(DistinctError):
        growth_fit(quad, [100, 100, 100])


def test_ramified_symbol(quad):
    # t0 = 3: kernel 6, so 3 ramifies
    fp = fingerprint(quad, 3, P_max=10)
    assert dict(zip(fp.window, fp.signature))[3] == RAMIFIED


def test_rows_cross_foot(quad):
    res = count_distinct(range(2, 500), quad)
    assert sum(r["multiplicity"] for r in res.rows()) + len(res.dropped) == 498


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 10**6), min_size=1, max_size=30, unique=True))
def test_fingerprint_partition_refines_nothing_for_quadratics(ts):
    from malle import quadratic_model
    quad = quadratic_model()
    assert sorted(fingerprint_partition(quad, ts, 300)) == sorted(kernel_partition(quad, ts).values()) \
        or len(fingerprint_partition(quad, ts, 300)) <= len(kernel_partition(quad, ts))
    # never splits a kernel class
    owner = {t: i for i, part in enumerate(fingerprint_partition(quad, ts, 300)) for t in part}
    for part in kernel_partition(quad, ts).values():
        assert len({owner[t] for t in part}) == 1
