import math

import pytest
import scipy.special
from hypothesis import given, strategies as st

from exaloglog.theory import (
    TheoryConfig,
    hurwitz_zeta,
    mvp_grid_argmin,
    mvp_martingale,
    mvp_ml,
    theoretical_rmse,
)


def test_config_derived_base():
    cfg = TheoryConfig(2, 20)
    assert cfg.base == 2 ** 0.25
    assert cfg.max_field_bits == 8
    with pytest.raises(ValueError):
        TheoryConfig(-1, 0)


def test_zeta_closed_forms():
    assert hurwitz_zeta(2, 1) == pytest.approx(math.pi ** 2 / 6, abs=1e-12)
    assert hurwitz_zeta(2, 2) == pytest.approx(math.pi ** 2 / 6 - 1, abs=1e-12)
    assert hurwitz_zeta(2, 0.5) == pytest.approx(math.pi ** 2 / 2, abs=1e-11)


def test_zeta_matches_scipy():
    for s in (2.0, 3.0, 2.5, 4.0):
        for q in (0.25, 1.0, 1.1652, 2.0, 7.5):
            assert hurwitz_zeta(s, q) == pytest.approx(
                float(scipy.special.zeta(s, q)), rel=1e-13)


@given(st.sampled_from([2.0, 2.5, 3.0]),
       st.floats(min_value=0.1, max_value=50.0, allow_nan=False))
def test_zeta_recurrence(s, q):
    assert hurwitz_zeta(s, q) == pytest.approx(
        hurwitz_zeta(s, q + 1) + q ** -s, rel=1e-12)


def test_zeta_domain():
    with pytest.raises(ValueError):
        hurwitz_zeta(1.0, 1.0)
    with pytest.raises(ValueError):
        hurwitz_zeta(2.0, 0.0)


def test_mvp_reference_values():
    assert abs(mvp_ml(2, 20) - 3.67) < 0.005
    assert abs(mvp_ml(2, 24) - 3.78) < 0.005
    assert abs(mvp_ml(1, 9) - 3.90) < 0.005
    assert abs(mvp_martingale(2, 16) - 2.77) < 0.005


def test_mvp_plain_hll_case():
    # 6-bit registers, no staircase, no indicators
    assert mvp_ml(0, 0) == pytest.approx(
        6 * math.log(2) / (math.pi ** 2 / 6 - 1), rel=1e-12)
    assert abs(mvp_ml(0, 0) - 6.449) < 0.001


def test_martingale_always_cheaper():
    for t in range(4):
        for d in range(33):
            assert mvp_martingale(t, d) < mvp_ml(t, d)


def test_martingale_mvp_large_d_limit():
    # tail factor approaches 1
    t, d = 2, 200
    expected = (6 + t + d) * math.log(2 ** 0.25) / 2
    assert mvp_martingale(t, d) == pytest.approx(expected, rel=1e-12)


def test_grid_argmins():
    assert mvp_grid_argmin("ml")[:2] == (2, 20)
    assert mvp_grid_argmin("martingale")[:2] == (2, 16)


def test_theoretical_rmse_values():
    assert theoretical_rmse(3.67, 2, 20, 8) == pytest.approx(
        math.sqrt(3.67 / (28 * 256)), rel=1e-12)
    assert abs(theoretical_rmse(3.67, 2, 20, 8) - 0.02263) < 5e-5
    assert abs(theoretical_rmse(2.77, 2, 16, 8) - 0.02124) < 5e-5


def test_theoretical_rmse_precision_scaling():
    for p in (4, 8, 12):
        assert theoretical_rmse(3.67, 2, 20, p + 2) == pytest.approx(
            theoretical_rmse(3.67, 2, 20, p) / 2, rel=1e-12)
