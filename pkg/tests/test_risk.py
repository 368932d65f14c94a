"""Tests for the exact risk routines against independent closed forms."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from cfkde.charfun import make_density
from cfkde.kernels import make_builtin
from cfkde.risk import (
    exact_bias,
    exact_mise,
    exact_mse,
    integrated_sq_bias,
    mc_mise,
    sinc_exact_mise,
)

SQRT_PI = math.sqrt(math.pi)


def normal_gaussian_mise(sigma: float, h: float, n: int) -> float:
    """Closed form for a normal target with the gaussian kernel."""
    return (
        1.0 / sigma
        - 2.0 / math.sqrt(sigma * sigma + 0.5 * h * h)
        + 1.0 / math.sqrt(sigma * sigma + h * h)
        + (1.0 / h - 1.0 / math.sqrt(h * h + sigma * sigma)) / n
    ) / (2.0 * SQRT_PI)


def normal_pdf(x: float, var: float) -> float:
    return math.exp(-0.5 * x * x / var) / math.sqrt(2.0 * math.pi * var)


@pytest.mark.parametrize("h,n", [(0.05, 50), (0.1, 100), (0.3, 100),
                                 (0.5, 20), (1.0, 1000), (2.0, 10)])
def test_exact_mise_normal_oracle(h, n):
    d = make_density("normal")
    g = make_builtin("gaussian")
    rep = exact_mise(d, g, h, n)
    oracle = normal_gaussian_mise(1.0, h, n)
    assert_allclose(rep.value, oracle, rtol=1e-10)
    assert not rep.degraded
    assert rep.quad_error < 1e-10


def test_exact_mise_normal_oracle_other_sigma():
    d = make_density("normal", sigma=1.7, mu=0.4)
    g = make_builtin("gaussian")
    rep = exact_mise(d, g, 0.25, 64)
    assert_allclose(rep.value, normal_gaussian_mise(1.7, 0.25, 64), rtol=1e-10)


def test_exact_mise_validation():
    d = make_density("normal")
    g = make_builtin("gaussian")
    with pytest.raises(ValueError):
        exact_mise(d, g, 0.0, 10)
    with pytest.raises(ValueError):
        exact_mise(d, g, 0.3, 0)


def test_exact_mise_decreases_in_n():
    d = make_density("laplace")
    g = make_builtin("gaussian")
    vals = [exact_mise(d, g, 0.3, n).value for n in (10, 100, 1000)]
    assert vals[0] > vals[1] > vals[2]


def test_sinc_exact_mise_fejer_pinned():
    f = make_density("fejer")
    n = 100
    assert_allclose(sinc_exact_mise(f, 1.0, n).value, 2.0 / (3.0 * math.pi * n),
                    rtol=1e-12)
    assert_allclose(sinc_exact_mise(f, 0.8, n).value, 11.0 / (12.0 * math.pi * n),
                    rtol=1e-12)
    for h in (1.0, 0.8):
        assert sinc_exact_mise(f, h, n).value <= 1.0 / (math.pi * n * h) + 1e-15


def test_sinc_mise_generic_path_matches_closed_form():
    sk = make_builtin("sinc")
    targets = [make_density("normal"), make_density("fejer"),
               make_density("laplace"), make_density("uniform", a=-1.0, b=1.0)]
    for d in targets:
        for h in (0.3, 0.9, 2.0):
            a = exact_mise(d, sk, h, 37).value
            b = sinc_exact_mise(d, h, 37).value
            assert_allclose(a, b, rtol=1e-10, atol=1e-15)


def test_sinc_mise_optimal_band_for_bandlimited():
    # once 1/h reaches the transform support the bias vanishes and the
    # risk is purely the variance term
    f = make_density("fejer")
    rep = sinc_exact_mise(f, 0.5, 50)
    head = f.cf_sq_integral
    assert_allclose(rep.value, (2.0 / 0.5 - head) / (2.0 * math.pi * 50),
                    rtol=1e-12)


def test_exact_bias_normal_closed_form():
    d = make_density("normal")
    g = make_builtin("gaussian")
    for h in (0.2, 0.7):
        for x in (0.0, 0.5, -1.7):
            got = exact_bias(d, g, h, x).value
            oracle = normal_pdf(x, 1.0 + h * h) - normal_pdf(x, 1.0)
            assert_allclose(got, oracle, atol=1e-12)


def test_exact_bias_laplace_vs_convolution():
    l = make_density("laplace")
    g = make_builtin("gaussian")
    x, h = 0.4, 0.3
    conv, _ = integrate.quad(
        lambda y: float(l.pdf(y)) * normal_pdf(x - y, h * h),
        -40, 40, limit=1000,
    )
    got = exact_bias(l, g, h, x)
    assert_allclose(got.value, conv - float(l.pdf(x)), atol=1e-10)
    assert not got.degraded


def test_exact_bias_gated_without_integrable_transform():
    u = make_density("uniform")
    g = make_builtin("gaussian")
    with pytest.raises(ValueError):
        exact_bias(u, g, 0.3, 0.5)
    with pytest.raises(ValueError):
        exact_mse(u, g, 0.3, 50, 0.5)


def test_exact_bias_sinc_bandlimited():
    f = make_density("fejer")
    sk = make_builtin("sinc")
    # cutoff below the band edge: no bias at all
    assert exact_bias(f, sk, 0.9, 0.3).value == 0.0
    # cutoff inside the band: matches the explicit tail integral
    got = exact_bias(f, sk, 2.0, 0.3).value
    oracle = -integrate.quad(lambda t: (1.0 - t) * math.cos(0.3 * t),
                             0.5, 1.0)[0] / math.pi
    assert_allclose(got, oracle, atol=1e-12)


def test_exact_mse_normal_closed_form():
    d = make_density("normal")
    g = make_builtin("gaussian")
    n = 50
    for h in (0.2, 0.7):
        for x in (0.0, 0.5, -2.3):
            got = exact_mse(d, g, h, n, x).value
            b = normal_pdf(x, 1.0 + h * h) - normal_pdf(x, 1.0)
            second = normal_pdf(x, 1.0 + 0.5 * h * h) / (2.0 * h * SQRT_PI)
            mean = normal_pdf(x, 1.0 + h * h)
            oracle = b * b + (second - mean * mean) / n
            assert_allclose(got, oracle, rtol=1e-12)


def test_exact_mse_positive_and_bias_dominates_at_large_n():
    d = make_density("normal")
    g = make_builtin("gaussian")
    b = exact_bias(d, g, 0.5, 0.0).value
    m = exact_mse(d, g, 0.5, 10 ** 9, 0.0).value
    assert m >= b * b
    assert_allclose(m, b * b, rtol=1e-4)


def test_mc_mise_matches_exact_within_3se():
    d = make_density("normal")
    g = make_builtin("gaussian")
    mean, se = mc_mise(d, g, 0.3, 100, reps=200, seed=11)
    exact = exact_mise(d, g, 0.3, 100).value
    assert se > 0.0
    assert abs(mean - exact) <= 3.0 * se


def test_mc_mise_seeding_prefix_stable():
    d = make_density("normal")
    g = make_builtin("gaussian")
    m1, _ = mc_mise(d, g, 0.4, 30, reps=5, seed=7)
    m2, _ = mc_mise(d, g, 0.4, 30, reps=5, seed=7)
    assert m1 == m2
    _, se1 = mc_mise(d, g, 0.4, 30, reps=1, seed=7)
    assert math.isnan(se1)
    with pytest.raises(ValueError):
        mc_mise(d, g, 0.4, 30, reps=0, seed=7)


def test_integrated_sq_bias_normal_gaussian_closed_form():
    # the smoothed-minus-true L2 gap has a closed form for this pair
    for sigma, h in ((1.0, 0.3), (1.7, 0.8)):
        d = make_density("normal", sigma=sigma)
        g = make_builtin("gaussian")
        got = integrated_sq_bias(d, g, h)
        s2 = sigma * sigma
        expected = (1.0 / sigma - 2.0 / math.sqrt(s2 + h * h / 2.0)
                    + 1.0 / math.sqrt(s2 + h * h)) / (2.0 * math.sqrt(math.pi))
        assert_allclose(got.value, expected, rtol=1e-10)
        assert got.quad_error < 1e-8
