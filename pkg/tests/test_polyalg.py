import json
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from malle.polyalg import (
    BiPoly, PolyError, UniPoly, discriminant, discriminant_y, factor_mod_p, factorization_type,
    gf_from, gf_mul, height, integer_roots, parse_bipoly, rational_roots, resultant,
    squarefree_kernel, squarefree_kernels, squarefree_part, substitute_shift, value_kernels,
)

T, Y = sympy.symbols("T Y")
MODELS = ["Y^2 - T^2 + T", "Y^3 + T*Y + T", "Y^6 + 6*T*Y^4 + 9*T^2*Y^2 + 4*T^3 + 27*T^2"]


def to_sympy(P: BiPoly):
    return sum(c * T**i * Y**j for (i, j), c in P.terms().items())


def uni_sympy(f: UniPoly, x=T):
    return sum(sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * x**i
               for i, c in enumerate(f.coeffs))


# --- oracles frozen from hand or sympy computation ---------------------------------


def test_discriminant_examples():
    assert discriminant_y(parse_bipoly("Y^2 - T^2 + T")) == UniPoly((0, -4, 4))
    assert discriminant_y(parse_bipoly("Y^2 - 1")) == UniPoly((4,))
    assert discriminant_y(parse_bipoly("Y^3 + T*Y + T")) == UniPoly((0, 0, -27, -4))


def test_height_examples():
    assert height(UniPoly((0, -4, 4))) == 4
    assert height(parse_bipoly("Y^3 + T*Y + T")) == 1
    assert height(UniPoly((0, 0, -27, -4))) == 27
    assert height(UniPoly()) == 0


def test_factor_mod_p_examples():
    assert factor_mod_p(UniPoly((1, 1, 0, 1)), 7).ftype == (3,)
    assert factor_mod_p(UniPoly((3, 3, 0, 1)), 7).ftype == (1, 2)
    assert factor_mod_p(UniPoly((-2, 0, 1)), 17).ftype == (1, 1)


def test_squarefree_part_examples():
    assert squarefree_part(UniPoly((0, -4, 4))) == UniPoly((0, -1, 1))
    assert squarefree_part(UniPoly((0, 0, -27, -4))) == UniPoly((0, 27, 4))
    assert squarefree_part(UniPoly.from_roots([1, 1, 1, 1])) == UniPoly((-1, 1))


def test_substitute_shift_examples():
    assert substitute_shift(parse_bipoly("Y^2 - T"), 2) == parse_bipoly("Y^2 + 2*T^2*Y + T^4 - T")
    assert substitute_shift(parse_bipoly("Y - T"), 1) == parse_bipoly("Y")
    assert substitute_shift(parse_bipoly("Y^2 - T"), 6) == parse_bipoly("Y^2 + 2*T^6*Y + T^12 - T")


def test_substitute_shift_cancels_when_E_le_m():
    G = substitute_shift(parse_bipoly("Y^2 - T^3*Y"), 3)
    assert G == parse_bipoly("Y^2 + T^3*Y") and G.total_degree == 4


def test_errors():
    with pytest.raises(PolyError):
        factor_mod_p(UniPoly((7, 14)), 7)
    with pytest.raises(PolyError):
        factor_mod_p(UniPoly((1, 1)), 9)
    with pytest.raises(PolyError):
        squarefree_kernel(0)
    with pytest.raises(PolyError):
        squarefree_part(UniPoly())


def test_discriminant_matches_sympy_on_models():
    for text in MODELS:
        P = parse_bipoly(text)
        ours = uni_sympy(discriminant_y(P))
        ref = sympy.discriminant(to_sympy(P), Y)
        assert sympy.expand(ours - ref) == 0


def test_bipoly_json_round_trip_is_bit_exact():
    P = parse_bipoly("Y^3 - 123456789012345678901234567890*T^4*Y + 7")
    blob = json.dumps(P.to_json())
    assert BiPoly.from_json(json.loads(blob)) == P
    assert json.dumps(BiPoly.from_json(json.loads(blob)).to_json()) == blob


def test_integer_roots_with_huge_constant():
    r = 10**40 + 7
    f = UniPoly.from_roots([r, -3, 5]) * UniPoly((1, 0, 1))
    assert integer_roots(f) == [-3, 5, r]
    assert rational_roots(UniPoly((-1, 0, 4))) == [Fraction(-1, 2), Fraction(1, 2)]


def test_value_kernels_match_factorint():
    for f in (UniPoly((0, -1, 1)), UniPoly((0, 0, -27, -4)), UniPoly((-3, 0, -6)), UniPoly((1, 1, 1))):
        got = value_kernels(f, -300, 300)
        want = [squarefree_kernel(int(f(t))) if f(t) else 0 for t in range(-300, 300)]
        assert got == want


# --- properties ------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(MODELS), st.integers(-10**6, 10**6))
def test_disc_specializes(text, t0):
    P = parse_bipoly(text)
    assert discriminant_y(P)(t0) == discriminant(P.eval_t(t0))


small_polys = st.lists(st.integers(-20, 20), min_size=2, max_size=7).filter(lambda c: c[-1] != 0)
primes = st.sampled_from([2, 3, 5, 7, 11, 13, 17, 101, 997])


@settings(max_examples=150, deadline=None)
@given(small_polys, primes)
def test_factor_mod_p_product_and_type(coeffs, p):
    f = UniPoly(tuple(coeffs))
    if not any(c % p for c in coeffs):
        return
    types = {factor_mod_p(f, p, seed=s).ftype for s in range(10)}
    assert len(types) == 1
    fac = factor_mod_p(f, p, seed=3)
    assert fac.product() == gf_from(f, p)
    # sympy oracle for the factorization type
    lc, facs = sympy.Poly(uni_sympy(f), T, modulus=p).factor_list()
    ref = tuple(sorted(g.degree() for g, e in facs for _ in range(e)))
    assert fac.ftype == ref


@settings(max_examples=100, deadline=None)
@given(small_polys)
def test_squarefree_part_properties(coeffs):
    f = UniPoly(tuple(coeffs))
    r = squarefree_part(f)
    assert (f % r).is_zero()
    g = sympy.gcd(uni_sympy(r), sympy.diff(uni_sympy(r), T))
    assert sympy.Poly(g, T).degree() == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3), st.integers(1, 6), st.randoms(use_true_random=False))
def test_substitute_shift_degrees(n, m, dE, rnd):
    # the lower degree bound needs E > m; case selection always yields that
    E = m + dE
    terms = {(0, n): 1, (m, 0): rnd.choice([-2, -1, 1, 2])}
    for i in range(m + 1):
        for j in range(n):
            if rnd.random() < 0.4:
                terms[(i, j)] = rnd.randint(-5, 5)
    F = BiPoly.from_terms(terms)
    G = substitute_shift(F, E)
    assert G.deg_y == F.deg_y
    assert n * E <= G.total_degree <= n * E + F.deg_t
    t0, y0 = rnd.randint(-5, 5), rnd.randint(-5, 5)
    assert G(t0, y0) == F(t0, t0**E + y0)


@settings(max_examples=200, deadline=None)
@given(st.integers(-10**9, 10**9).filter(bool), st.integers(1, 10**4))
def test_squarefree_kernel_square_class(n, m):
    k = squarefree_kernel(n)
    assert squarefree_kernel(n * m * m) == k
    assert (k > 0) == (n > 0)
    assert all(e == 1 for e in sympy.factorint(abs(k)).values())
    q, r = divmod(n, k)
    assert r == 0 and sympy.sqrt(q) == int(sympy.sqrt(q))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-(10**15), 10**15).filter(bool), min_size=1, max_size=40))
def test_squarefree_kernels_batch(values):
    assert squarefree_kernels(values) == [squarefree_kernel(v) for v in values]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=4), st.integers(1, 5))
def test_integer_roots_recovered(roots, k):
    f = UniPoly.from_roots(roots) * UniPoly((k, 0, 1))
    assert integer_roots(f) == sorted(set(roots))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(MODELS), st.integers(-30, 30))
def test_resultant_consistent_with_sympy(text, t0):
    P = parse_bipoly(text)
    ours = resultant(P, P.diff_y(), "Y")(t0)
    ref = sympy.resultant(to_sympy(P), sympy.diff(to_sympy(P), Y), Y).subs(T, t0)
    assert ours == ref


def test_gf_mul_random():
    rng = random.Random(0)
    for _ in range(50):
        p = rng.choice([3, 7, 101])
        a = [rng.randrange(p) for _ in range(rng.randint(1, 6))]
        b = [rng.randrange(p) for _ in range(rng.randint(1, 6))]
        ref = sympy.Poly(sum(c * T**i for i, c in enumerate(a)), T, modulus=p) * \
            sympy.Poly(sum(c * T**i for i, c in enumerate(b)), T, modulus=p)
        want = [int(c) % p for c in reversed(ref.all_coeffs())] if not ref.is_zero else []
        got = gf_mul(a, b, p)
        assert got[: len(want)] == want and not any(got[len(want):])


def test_factorization_type_list_input():
    assert factorization_type([3, 3, 0, 1], 7) == (1, 2)
