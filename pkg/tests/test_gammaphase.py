"""Product and asymptotic Gamma-phase routes, cross-checked against mpmath."""

import math

import mpmath as mp
import numpy as np
import pytest

from lphase import gammaphase as gp
from lphase.arith import SPoint
from lphase.errors import DomainError

mp.mp.dps = 30


def _loggamma_phase(t, eps, alpha):
    return float(mp.im(mp.loggamma((0.5 + eps + alpha + 1j * t) / 2)))


# --------------------------------------------------------------------------
# product route
# --------------------------------------------------------------------------

def test_gw_phase_vanishes_at_t0():
    for alpha in (0, 1, 2):
        for eps in (-0.2, 0.0, 0.3):
            assert gp.gw_log_gamma_phase(SPoint(eps, 0.0), alpha, 10 ** 4) == 0.0


def test_gw_phase_odd_in_t():
    for t in (0.3, 2.0, 17.5):
        plus = gp.gw_log_gamma_phase(SPoint(0.1, t), 1, 10 ** 5)
        minus = gp.gw_log_gamma_phase(SPoint(0.1, -t), 1, 10 ** 5)
        assert plus == pytest.approx(-minus, abs=1e-14)


def test_gw_phase_truncation_within_estimate():
    for t, alpha in ((5.0, 1), (40.0, 0), (15.0, 2)):
        s = SPoint(0.0, t)
        exact = _loggamma_phase(t, 0.0, alpha)
        for n in (10 ** 4, 10 ** 5):
            err = abs(gp.gw_log_gamma_phase(s, alpha, n) - exact)
            assert err <= gp.gw_phase_tail_estimate(s, alpha, n)


def test_gamma_phase_limit_matches_mpmath():
    for t in (0.0, 0.7, 5.0, 33.0, 90.0):
        for eps in (-0.2, 0.0, 0.2):
            for alpha in (0, 1, 2):
                got = gp.gamma_phase(t, eps, alpha)
                ref = _loggamma_phase(t, eps, alpha)
                assert got == pytest.approx(ref, abs=1e-11 * (1 + abs(ref)))


def test_gamma_log_abs_matches_mpmath():
    for t in (0.0, 1.0, 12.0, 70.0):
        for alpha in (0, 1):
            got = gp.gamma_log_abs(t, 0.1, alpha)
            ref = float(mp.re(mp.loggamma((0.6 + alpha + 1j * t) / 2)))
            assert got == pytest.approx(ref, abs=1e-11 * (1 + abs(ref)))


def test_gw_dphase_t0_reduction():
    # at t = 0 each summand loses its arctan factor; compare with the direct series
    n_terms = 10 ** 4
    got = gp.gw_dphase_dt(SPoint(0.0, 0.0), 1, n_terms)
    direct = -gp.EULER_GAMMA / 2.0 - 1.0 / 1.5
    for n in range(1, n_terms + 1):
        direct += 1.0 / (2 * n) - 1.0 / (2 * n + 1.5)
    assert got == pytest.approx(direct, abs=1e-11)


def test_gw_dphase_even_in_t():
    for t in (0.5, 4.0, 22.0):
        a = gp.gw_dphase_dt(SPoint(0.05, t), 1, 10 ** 5)
        b = gp.gw_dphase_dt(SPoint(0.05, -t), 1, 10 ** 5)
        assert a == pytest.approx(b, abs=1e-14)


def test_gw_dphase_large_t_asymptote():
    # prefactor derivative approaches log sqrt(t q / 2 pi) for large t
    t, q = 50.0, 3
    val = gp.prefactor_dphase_dt(SPoint(0.0, t), gp.PrefactorParams.for_alpha(1, q), 10 ** 6)
    assert abs(val - 0.5 * math.log(t * q / (2 * math.pi))) < 1e-3


def test_gw_dphase_matches_digamma():
    for t, eps, alpha in ((3.0, 0.0, 1), (11.0, -0.2, 0), (27.0, 0.2, 2)):
        ref = float(0.5 * mp.re(mp.digamma((0.5 + eps + alpha + 1j * t) / 2)))
        got, last = gp.gw_dphase_dt(SPoint(eps, t), alpha, 10 ** 6, return_last_term=True)
        assert got == pytest.approx(ref, abs=3e-6)
        assert 0 < last < 1e-11
        lim = gp.gamma_dphase_dt(t, eps, alpha)
        assert lim == pytest.approx(ref, abs=1e-12)


def test_gw_domain_guard():
    with pytest.raises(DomainError):
        gp.gw_log_gamma_phase(SPoint(-0.5, 1.0), 0, 100)  # a = 0


# --------------------------------------------------------------------------
# prefactor derivative roots
# --------------------------------------------------------------------------

def test_prefactor_root_locations():
    # frozen from a high-precision digamma root solve
    expected = {3: 2.1062054, 5: 1.2116358, 9: 0.2266757}
    for q, ref in expected.items():
        t = gp.find_t_cross(gp.PrefactorParams.for_alpha(1, q), n_terms=2 * 10 ** 5)
        assert t == pytest.approx(ref, abs=5e-4)


def test_prefactor_positive_for_large_q():
    params = gp.PrefactorParams.for_alpha(1, 11)
    assert gp.find_t_cross(params, n_terms=10 ** 5) is None
    for t in (0.01, 0.5, 3.0, 40.0, 100.0):
        assert gp.prefactor_dphase_dt(SPoint(0.0, t), params, 10 ** 5) > 0


def test_even_prefactor_sign_pattern():
    # alpha = 0: negative near t = 0 for q = 5, positive everywhere once
    # log(q/pi)/2 exceeds -psi(1/4)/2, i.e. for q >= 220
    q5 = gp.PrefactorParams.for_alpha(0, 5)
    assert gp.prefactor_dphase_dt(SPoint(0.0, 0.5), q5, 10 ** 5) < 0
    assert gp.prefactor_dphase_dt(SPoint(0.0, 10.0), q5, 10 ** 5) > 0
    q220 = gp.PrefactorParams.for_alpha(0, 220)
    for t in (0.01, 0.5, 5.0, 50.0):
        assert gp.prefactor_dphase_dt(SPoint(0.0, t), q220, 10 ** 5) > 0


def test_find_t_cross_strictly_decreasing():
    vals = [gp.find_t_cross(gp.PrefactorParams.for_alpha(1, q), n_terms=10 ** 5)
            for q in (3, 4, 5, 7, 8, 9)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[3] == pytest.approx(0.75, abs=0.1)  # q = 7 lands near 0.75


# --------------------------------------------------------------------------
# asymptotic route pieces
# --------------------------------------------------------------------------

def test_main_term_exact_value():
    # t = 2 pi, q = 1, alpha = 2: log term vanishes, leaving -pi - pi/8 + pi/2
    params = gp.PrefactorParams.for_alpha(2)
    got = gp.stirling_phase_main(2 * math.pi, 0.0, params)
    assert got == pytest.approx(-5 * math.pi / 8, abs=1e-14)


def test_main_term_derivative_against_finite_difference():
    params = gp.PrefactorParams.for_alpha(1, 5)
    t, h = 10.0, 1e-5
    fd = (gp.stirling_phase_main(t + h, 0.0, params)
          - gp.stirling_phase_main(t - h, 0.0, params)) / (2 * h)
    assert abs(fd - gp.stirling_phase_main_dt(t, params)) < 1e-8
    assert gp.stirling_phase_main_dt(t, params) == pytest.approx(
        0.5 * math.log(t * 5 / (2 * math.pi)), abs=1e-15)


def test_main_term_linear_in_eps_plus_alpha():
    params = gp.PrefactorParams.for_alpha(1, 3)
    t = 4.0
    base = gp.stirling_phase_main(t, 0.0, params)
    assert gp.stirling_phase_main(t, 0.3, params) - base == pytest.approx(
        math.pi / 4 * 0.3, abs=1e-14)


def test_correction_zero_at_special_shift():
    # eps + alpha = 3/2 kills both closed-form terms
    assert gp.stirling_phase_correction(7.0, 0.5, 1) == 0.0
    assert gp.stirling_phase_correction(0.3, 1.5, 0) == 0.0


def test_correction_vanishes_at_large_t():
    vals = [abs(gp.stirling_phase_correction(t, 0.0, 1)) for t in (10.0, 100.0, 1000.0)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 2e-4  # decays like 1/(4t)


def test_correction_quadratic_mixed_derivative_three_cases():
    # central differences of the quadratic form give the pure 1/(4t^2) pattern
    t, h = 10.0, 1e-4
    for alpha, ref in ((2, 0.0075), (1, 0.0025), (0, -0.0025)):
        def dt_of(eps):
            g = 1e-6
            return (gp.stirling_phase_correction_quadratic(t + g, eps, alpha)
                    - gp.stirling_phase_correction_quadratic(t - g, eps, alpha)) / (2 * g)
        mixed = (dt_of(h) - dt_of(-h)) / (2 * h)
        assert mixed == pytest.approx(ref, abs=1e-6)


def test_correction_dt_analytic_vs_finite_difference():
    for t, eps, alpha in ((3.0, 0.1, 1), (0.7, -0.1, 0), (25.0, 0.0, 2)):
        h = 1e-6 * max(t, 1.0)
        fd = (gp.stirling_phase_correction(t + h, eps, alpha)
              - gp.stirling_phase_correction(t - h, eps, alpha)) / (2 * h)
        assert fd == pytest.approx(gp.stirling_phase_correction_dt(t, eps, alpha),
                                   abs=1e-9)


def test_bernoulli_leading_behavior():
    val, bound = gp.stirling_phase_bernoulli(100.0, 0.0, 1)
    assert val == pytest.approx(-1.0 / 600.0, rel=0.02)
    assert bound > 0


def test_bernoulli_mixed_derivative_negligible():
    for t in (5.0, 10.0, 20.0):
        h = 1e-4
        fd = (gp.stirling_phase_bernoulli_dt(t, h, 1)
              - gp.stirling_phase_bernoulli_dt(t, -h, 1)) / (2 * h)
        assert abs(fd) < 0.1 / (4 * t * t)


def test_bernoulli_bound_decreasing_in_t():
    bounds = [gp.stirling_phase_bernoulli(t, 0.0, 1)[1] for t in (2.0, 5.0, 20.0, 80.0)]
    assert all(b > 0 for b in bounds)
    assert all(a > b for a, b in zip(bounds, bounds[1:]))


def test_stirling_route_refuses_small_t():
    params = gp.PrefactorParams.for_alpha(1, 3)
    with pytest.raises(DomainError):
        gp.stirling_phase(0.3, 0.0, params)
    with pytest.raises(DomainError):
        gp.stirling_dphase_dt(0.2, 0.0, params)


def test_route_agreement_sample_point():
    # asymptotic total vs product phase plus the (t/2) log(q/pi) shift
    t, eps, alpha, q = 5.0, 0.0, 1, 3
    params = gp.PrefactorParams.for_alpha(alpha, q)
    s = SPoint(eps, t)
    stirl, bound = gp.stirling_phase(t, eps, params, with_bound=True)
    gw = gp.gw_log_gamma_phase(s, alpha, 10 ** 6) + 0.5 * t * math.log(q / math.pi)
    assert abs(stirl - gw) <= bound + 10 * gp.gw_phase_tail_estimate(s, alpha, 10 ** 6)


def test_route_agreement_band():
    n_terms = 2 * 10 ** 5
    for alpha in (0, 1, 2):
        params = gp.PrefactorParams.for_alpha(alpha, q=3 if alpha != 2 else None)
        shift = 0.5 * math.log(params.q / math.pi)
        for eps in (-0.2, 0.0, 0.2):
            for t in (2.0, 7.0, 31.0, 100.0):
                s = SPoint(eps, t)
                stirl, bound = gp.stirling_phase(t, eps, params, with_bound=True)
                gw = gp.gw_log_gamma_phase(s, alpha, n_terms) + t * shift
                allowance = bound + gp.gw_phase_tail_estimate(s, alpha, n_terms)
                assert abs(stirl - gw) <= allowance


# --------------------------------------------------------------------------
# mixed second derivative
# --------------------------------------------------------------------------

def test_mixed_derivative_three_cases_both_routes():
    for alpha, num in ((2, 3.0), (1, 1.0), (0, -1.0)):
        ref = num / 400.0
        stirl = gp.mixed_second_derivative(10.0, alpha, route="stirling")
        prod = gp.mixed_second_derivative(10.0, alpha, route="gw", n_terms=10 ** 5)
        assert stirl == pytest.approx(ref, rel=0.02)
        assert prod == pytest.approx(stirl, abs=2e-5)


def test_mixed_derivative_normalized_limit():
    # 4 t^2 * mixed -> 1 for alpha = 1: inside 5% at t = 20 and 1% at t = 50;
    # the truncation bias ~1/(4 n_terms) matters at t = 50, hence the 1e6 terms
    m20 = gp.mixed_second_derivative(20.0, 1, route="gw", n_terms=10 ** 6)
    m50 = gp.mixed_second_derivative(50.0, 1, route="gw", n_terms=10 ** 6)
    assert abs(m20 * 4 * 400.0 - 1.0) < 0.05
    assert abs(m50 * 4 * 2500.0 - 1.0) < 0.01


def test_mixed_derivative_alpha0_sign_change_location():
    # frozen from a high-precision trigamma root solve: 0.5887965556
    f = lambda t: gp.mixed_second_derivative(t, 0, route="gw", n_terms=10 ** 5)
    assert f(0.5885) > 0 > f(0.5891)


def test_mixed_derivative_guards():
    with pytest.raises(DomainError):
        gp.mixed_second_derivative(-1.0, 1)
    with pytest.raises(DomainError):
        gp.mixed_second_derivative(1.0, 1, route="gw", n_terms=10)
    with pytest.raises(DomainError):
        gp.mixed_second_derivative(1.0, 1, route="unknown")


# --------------------------------------------------------------------------
# configuration types
# --------------------------------------------------------------------------

def test_stirling_config_validation():
    with pytest.raises(DomainError):
        gp.StirlingConfig(K=1)
    with pytest.raises(DomainError):
        gp.StirlingConfig(K=7)  # no B_14 in the table
    cfg = gp.StirlingConfig(K=4)
    val3, bound3 = gp.stirling_phase_bernoulli(6.0, 0.0, 1)
    val4, bound4 = gp.stirling_phase_bernoulli(6.0, 0.0, 1, cfg)
    assert bound4 != bound3
    assert val4 == pytest.approx(val3, abs=2 * bound3)


def test_prefactor_params_validation():
    with pytest.raises(DomainError):
        gp.PrefactorParams(q=3, alpha=2, alpha1=0)  # zeta case needs q = 1
    with pytest.raises(DomainError):
        gp.PrefactorParams(q=3, alpha=1, alpha1=0)
    with pytest.raises(DomainError):
        gp.PrefactorParams(q=0, alpha=0, alpha1=0)
    p = gp.PrefactorParams.for_alpha(2)
    assert (p.q, p.alpha, p.alpha1) == (1, 2, 0)
