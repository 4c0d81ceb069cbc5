import math

import numpy as np
import pytest
import scipy.special as sps

from degenheat.bessel import (
    bessel_j,
    bessel_j_deriv,
    bessel_zero,
    bessel_zeros,
    zero_bracket,
)
from oracles import ascending_series_j, bisect_first_j0_zero, central_difference


def test_value_at_origin():
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(0.7, 0.0) == 0.0


def test_half_order_zero_at_pi():
    # J_{1/2}(z) = sqrt(2/(pi z)) sin z vanishes at pi
    assert abs(bessel_j(0.5, math.pi)) < 1e-12


def test_first_j0_zero_against_series_bisection():
    root = bisect_first_j0_zero()
    assert abs(root - 2.404825557695773) < 1e-12
    assert abs(bessel_j(0.0, root)) < 1e-12


def test_domain_errors():
    with pytest.raises(ValueError):
        bessel_j(-0.1, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0.5, -1.0)
    with pytest.raises(ValueError):
        bessel_j_deriv(0.5, 0.0)


@pytest.mark.parametrize("nu", [0.0, 0.1, 0.25, 0.5, 1.0, 1.82, 2.0, 3.5])
@pytest.mark.parametrize("x", [0.3, 2.0, 5.9, 6.1, 11.0, 24.9, 25.1, 80.0, 400.0, 1000.0])
def test_values_against_scipy(nu, x):
    ref = sps.jv(nu, x)
    envelope = math.sqrt(2.0 / (math.pi * x)) if x > 1 else 1.0
    assert abs(bessel_j(nu, x) - ref) < 1e-12 * max(abs(ref), envelope)


def test_deriv_recurrence_at_first_zero():
    j01 = bessel_zero(0.0, 1)
    # J_0' = -J_1
    assert bessel_j_deriv(0.0, j01) == pytest.approx(-bessel_j(1.0, j01), abs=1e-14)


@pytest.mark.parametrize("nu,x", [(0.5, math.pi / 2), (2.0, 1.0), (0.25, 3.7), (1.0, 17.0)])
def test_deriv_against_finite_differences(nu, x):
    fd = central_difference(lambda t: bessel_j(nu, t), x, 1e-6)
    assert abs(bessel_j_deriv(nu, x) - fd) < 1e-8


@pytest.mark.parametrize("nu", [0.0, 0.3, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("x", [0.7, 3.0, 9.0, 40.0])
def test_ode_residual(nu, x):
    # x^2 J'' + x J' + (x^2 - nu^2) J = 0 with a finite-difference second derivative
    h = 1e-5 * max(1.0, x)
    d2 = central_difference(lambda t: bessel_j_deriv(nu, t), x, h)
    res = x * x * d2 + x * bessel_j_deriv(nu, x) + (x * x - nu * nu) * bessel_j(nu, x)
    assert abs(res) < 1e-8 * max(1.0, x * x)


def test_sin_zeros_for_half_order():
    assert bessel_zero(0.5, 3) == pytest.approx(3 * math.pi, abs=1e-12)


def test_first_zero_value():
    assert bessel_zero(0.0, 1) == pytest.approx(2.404825557695773, abs=1e-12)


def test_high_zero_inside_paper_bracket():
    j = bessel_zero(0.0, 100)
    assert (100 - 0.25) * math.pi < j < (100 - 0.125) * math.pi


@pytest.mark.parametrize("nu", [0.0, 0.1, 0.25, 1.0, 2.0])
def test_brackets_and_interlacing(nu):
    zs = bessel_zeros(nu, 60)
    assert np.all(np.diff(zs) > 0)
    for n, z in enumerate(zs, start=1):
        br = zero_bracket(nu, n)
        assert br.lower < z < br.upper


def test_degenerate_bracket_at_half():
    # at nu = 1/2 both bounds collapse onto n pi
    br = zero_bracket(0.5, 4)
    assert br.lower == pytest.approx(br.upper)
    assert br.contains(bessel_zero(0.5, 4))


def test_zeros_against_scipy():
    ref = sps.jn_zeros(0, 40)
    mine = bessel_zeros(0.0, 40)
    assert np.abs(np.array(mine) - ref).max() < 1e-11


def test_large_order_sequential_scan():
    # brackets overlap for nu > 4.5; the sequential scan must still sort them out
    zs = bessel_zeros(6.0, 12)
    ref = sps.jn_zeros(6, 12)
    assert np.abs(np.array(zs) - ref).max() < 1e-10


def test_series_matches_evaluator_in_overlap():
    for x in (0.2, 1.0, 4.0):
        assert bessel_j(0.3, x) == pytest.approx(ascending_series_j(0.3, x), abs=1e-14)
