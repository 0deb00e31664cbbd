import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from malle.estimates import (
    Constants, EstimateError, Pi, Pi_S, a_of_G, alpha, density_experiment, exponents,
    log_primorial_ratio, pi, lower_bound_rhs,
)


def test_exponents(quad, s3):
    rep = exponents(quad, 3)
    assert rep.a_G == 1 and rep.alpha == Fraction(1, 6)
    assert abs(float(rep.branching_bounds[0]) - 12 * math.log(2)) < 1e-12
    assert rep.delta_P_at_least_inverse_a
    assert exponents(s3).a_G == Fraction(1, 3)
    with pytest.raises(EstimateError):
        alpha(2, 0)


def test_counting_functions():
    assert pi(30) == 10 and Pi(17) == 510510 and Pi_S([]) == 1


@given(st.integers(2, 10**4), st.fractions(min_value=Fraction(1, 100), max_value=100))
def test_alpha_identity(order, delta):
    assert alpha(order, delta) * delta + Fraction(1, order) == 1


def test_a_of_G_values():
    assert a_of_G(2) == 1 and a_of_G(6) == Fraction(1, 3) and a_of_G(9) == Fraction(1, 6)


def test_lower_bound_rhs(quad):
    out = lower_bound_rhs(quad, 30, chi=Fraction(1, 8))
    want = 0.125 * 6469693230**0.5 / math.log(6469693230) - 1
    assert abs(float(out["lower_unconditional"]) - want) < 1e-9 * want
    edge = lower_bound_rhs(quad, 18)
    assert abs(float(edge["lower_unconditional"]) - (510510**0.5 / math.log(510510) - 1)) < 1e-9
    neg = lower_bound_rhs(quad, 30, constants=Constants(C4=1e30))
    assert float(neg["lower_unconditional"]) < 0


def test_density(quad):
    rows = density_experiment(quad, [18, 19, 24, 30], 10**5)
    assert rows[0].exact_density == 1
    dens = [r.exact_density for r in rows]
    assert all(a > b for a, b in zip(dens, dens[1:]))
    assert all(0 < d <= 1 for d in dens)
    assert rows[-1].small_sample


def test_log_primorial_sanity():
    err = [abs(log_primorial_ratio(x) - 1) for x in (100, 200, 400, 800, 1600, 3200, 6400, 10**4)]
    assert err[-1] < err[0]
