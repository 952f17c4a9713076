import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from exaloglog.params import Params, exponent, rho, sigma

from helpers import rho_fraction, sigma_brute


def test_derived_sizes():
    params = Params(2, 20, 8)
    assert params.m == 256
    assert params.register_bits == 28
    assert params.u_max == (65 - 8 - 2) * 4
    assert params.register_cap == (params.u_max << 20) + (1 << 20) - 1


@pytest.mark.parametrize("t,d,p", [(-1, 0, 2), (0, -1, 2), (0, 0, 1),
                                   (0, 0, 64), (3, 0, 61), (0, 59, 2)])
def test_rejects_bad_parameters(t, d, p):
    with pytest.raises(ValueError):
        Params(t, d, p)


def test_wide_t_needs_override():
    with pytest.raises(ValueError):
        Params(4, 0, 2)
    wide = Params(4, 0, 2, allow_wide_t=True)
    assert wide.register_bits == 10


def test_rho_geometric_base_case():
    # t=0 reduces to the plain halving distribution
    assert rho(1, Params(0, 0, 2)) == 0.5


def test_rho_staircase_value():
    # e(5) = min(2 + 1 + floor(4/4), 62) = 4
    assert rho(5, Params(2, 0, 2)) == 1 / 16


def test_rho_total_mass_exact():
    params = Params(2, 0, 2)
    total = sum(rho_fraction(u, params) for u in range(1, params.u_max + 1))
    assert total == 1
    # float evaluation carries the same exactness
    assert math.fsum(rho(u, params) for u in range(1, params.u_max + 1)) == 1.0


def test_rho_domain():
    params = Params(2, 0, 2)
    for u in (0, -3, params.u_max + 1):
        with pytest.raises(ValueError):
            rho(u, params)


def test_sigma_boundaries():
    for t in range(4):
        for p in (2, 5, 13):
            params = Params(t, 0, p)
            assert sigma(params.u_max, params) == 0.0
            assert sigma(0, params) == 1.0


def test_sigma_half():
    # tail above k=4 at t=2: values 5.. carry the other half of the mass
    params = Params(2, 0, 2)
    assert sigma(4, params) == 0.5
    assert sigma_brute(4, params) == Fraction(1, 2)


@pytest.mark.parametrize("t", [0, 1, 2, 3])
@pytest.mark.parametrize("p", [2, 4, 11])
def test_sigma_matches_brute_force_everywhere(t, p):
    # closed form == direct summation for every possible maximum
    params = Params(t, 0, p)
    for k in range(params.u_max + 1):
        assert Fraction(sigma(k, params)) == sigma_brute(k, params)


def test_sigma_domain():
    params = Params(1, 0, 3)
    with pytest.raises(ValueError):
        sigma(-1, params)
    with pytest.raises(ValueError):
        sigma(params.u_max + 1, params)


@given(st.integers(min_value=0, max_value=3), st.integers(min_value=2, max_value=20),
       st.integers(min_value=1, max_value=500))
def test_exponent_is_clamped(t, p, u):
    params = Params(t, 0, p)
    e = exponent(min(u, params.u_max), params)
    assert t + 1 <= e <= 64 - p
