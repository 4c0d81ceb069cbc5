import math

import numpy as np
import pytest

from degenheat.bessel import zero_bracket
from degenheat.quadrature import integrate_graded
from degenheat.spectrum import (
    ProblemParams,
    build_basis,
    eigenfunction_value,
    eigenvalue,
    expand_initial_data,
    gap_constant,
    mu_critical,
    nu_param,
    orthonormality_defect,
    parseval_defect,
)
from oracles import sturm_liouville_fd

PARAM_SETS = [(0.0, 0.0), (0.5, 1.0 / 16.0), (0.125, 49.0 / 256.0)]


def test_params_validation():
    with pytest.raises(ValueError):
        ProblemParams(1.0, 0.0)
    with pytest.raises(ValueError):
        ProblemParams(0.0, 0.3)  # mu > 1/4
    with pytest.raises(ValueError):
        ProblemParams(0.5, 0.0, b_bar=1.0)
    with pytest.raises(ValueError):
        ProblemParams(0.5, 0.0, T=0.0)
    ProblemParams(0.0, -5.0)  # very negative mu is admissible


def test_nu_param_values():
    assert nu_param(0.0, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert nu_param(0.5, 1.0 / 16.0) == pytest.approx(0.0, abs=1e-15)
    assert nu_param(0.125, 49.0 / 256.0) == pytest.approx(0.0, abs=1e-15)
    assert nu_param(0.0, -1.0) == pytest.approx(math.sqrt(1.25), rel=1e-14)
    with pytest.raises(ValueError):
        nu_param(0.0, 0.26)


def test_eigenvalues_classical_and_degenerate():
    basis0 = build_basis(ProblemParams(0.0, 0.0), 10)
    assert eigenvalue(basis0, 1) == pytest.approx(math.pi**2, abs=1e-10)
    assert eigenvalue(basis0, 7) == pytest.approx(49 * math.pi**2, abs=1e-9)
    basis = build_basis(ProblemParams(0.5, 1.0 / 16.0), 3)
    assert eigenvalue(basis, 1) == pytest.approx(3.25304210415757, rel=1e-12)
    with pytest.raises(IndexError):
        eigenvalue(basis, 4)


def test_eigenfunction_boundary_and_classical_value():
    basis0 = build_basis(ProblemParams(0.0, 0.0), 5)
    assert eigenfunction_value(basis0, 2, 0.25) == pytest.approx(math.sqrt(2), rel=1e-12)
    for alpha, mu in PARAM_SETS:
        basis = build_basis(ProblemParams(alpha, mu), 4)
        for n in (1, 4):
            assert eigenfunction_value(basis, n, 0.0) == 0.0
            assert abs(eigenfunction_value(basis, n, 1.0)) < 1e-10


def test_eigenfunction_value_direct_formula():
    # frozen from mpmath: sqrt(1.5) * 0.5^(1/4) * J0(j01 * 0.5^(3/4)) / |J0'(j01)|
    basis = build_basis(ProblemParams(0.5, 1.0 / 16.0), 1)
    assert eigenfunction_value(basis, 1, 0.5) == pytest.approx(1.09220465181242, rel=1e-12)


def test_eigenpair_against_finite_difference_solver():
    # subcritical pair (nu = 1): at critical mu the energy integral is an
    # inf - inf cancellation and naive FD does not converge
    alpha, mu = 0.5, -0.5
    vals, grid, phi = sturm_liouville_fd(alpha, mu, n_modes=2, m_cells=4000)
    basis = build_basis(ProblemParams(alpha, mu), 2)
    assert vals[0] == pytest.approx(basis.lambdas[0], rel=1e-6)
    idx = np.argmin(np.abs(grid - 0.5))
    mine = abs(eigenfunction_value(basis, 1, grid[idx]))
    assert abs(phi[idx, 0]) == pytest.approx(mine, rel=1e-6)


def test_classical_reduction_on_grid():
    basis = build_basis(ProblemParams(0.0, 0.0), 12)
    xs = np.linspace(0.0, 1.0, 501)
    for n in (1, 5, 12):
        exact = math.sqrt(2) * np.sin(n * math.pi * xs)
        assert np.abs(eigenfunction_value(basis, n, xs) - exact).max() < 1e-10
        assert abs(basis.lambdas[n - 1] - (n * math.pi) ** 2) < 1e-9


@pytest.mark.parametrize("alpha,mu", PARAM_SETS + [(0.3, 0.0)])
def test_eigenfunction_ode_residual(alpha, mu):
    # -(x^a u')' - mu x^(a-2) u = lambda u at interior points, 5-point stencil
    basis = build_basis(ProblemParams(alpha, mu), 3)
    xs = np.linspace(0.35, 0.9, 7)
    h = 1e-4
    for n in (1, 3):
        lam = basis.lambdas[n - 1]
        for x in xs:
            stencil = eigenfunction_value(basis, n, np.array([x - 2 * h, x - h, x, x + h, x + 2 * h]))
            u = stencil[2]
            d1 = (stencil[0] - 8 * stencil[1] + 8 * stencil[3] - stencil[4]) / (12 * h)
            d2 = (-stencil[0] + 16 * stencil[1] - 30 * stencil[2] + 16 * stencil[3] - stencil[4]) / (12 * h * h)
            res = -(x**alpha * d2 + alpha * x ** (alpha - 1) * d1) - mu * x ** (alpha - 2) * u - lam * u
            assert abs(res) < 1e-5 * lam


def test_gap_constant_values():
    # at nu = 1/2 exactly, the (2-a)^2 pi^2 / 4 branch holds only with
    # equality, which floating point cannot certify; the 7/64 branch is the
    # one that satisfies the computed-range contract there
    assert gap_constant(0.0, 0.0) == pytest.approx(7 * math.pi**2 / 16, rel=1e-14)
    assert gap_constant(0.5, 1.0 / 16.0) == pytest.approx(63 * math.pi**2 / 256, rel=1e-14)
    # nu(0, -1) = sqrt(5)/2 > 1/2 -> second branch
    assert gap_constant(0.0, -1.0) == pytest.approx(math.pi**2, rel=1e-14)


@pytest.mark.parametrize("alpha,mu", PARAM_SETS)
def test_gap_inequality_spot(alpha, mu):
    basis = build_basis(ProblemParams(alpha, mu), 60)
    rho = gap_constant(alpha, mu)
    lam = basis.lambdas
    n = np.arange(1, 61)
    diff = np.abs(lam[:, None] - lam[None, :])
    bound = rho * np.abs(n[:, None] ** 2 - n[None, :] ** 2)
    assert np.all(diff >= bound)


def test_expand_classical_unit_modes():
    basis = build_basis(ProblemParams(0.0, 0.0), 6)
    coeffs = expand_initial_data(basis, lambda x: np.sin(2 * np.pi * x)).coeffs
    expected = np.zeros(6)
    expected[1] = 1 / math.sqrt(2)
    assert np.abs(coeffs - expected).max() < 1e-10
    coeffs3 = expand_initial_data(basis, lambda x: 3 * np.sin(2 * np.pi * x)).coeffs
    assert coeffs3[1] == pytest.approx(3 / math.sqrt(2), rel=1e-12)


def test_expand_eigenfunction_gives_unit_vector():
    basis = build_basis(ProblemParams(0.5, 1.0 / 16.0), 5)
    coeffs = expand_initial_data(basis, lambda x: eigenfunction_value(basis, 3, x)).coeffs
    expected = np.zeros(5)
    expected[2] = 1.0
    assert np.abs(coeffs - expected).max() < 1e-8


def test_parseval_defect_sign_and_decrease():
    f = lambda x: np.asarray(x) * (1.0 - np.asarray(x))
    defects = []
    for K in (4, 8, 16):
        basis = build_basis(ProblemParams(0.5, 1.0 / 16.0), K)
        coeffs = expand_initial_data(basis, f)
        defects.append(parseval_defect(basis, f, coeffs))
    assert all(d >= -1e-10 for d in defects)
    assert defects[0] >= defects[1] >= defects[2]


@pytest.mark.parametrize("alpha,mu,tol", [(0.0, 0.0, 1e-9), (0.5, 1.0 / 16.0, 1e-7), (0.125, 49.0 / 256.0, 1e-7)])
def test_orthonormality_defect(alpha, mu, tol):
    basis = build_basis(ProblemParams(alpha, mu), 10)
    assert orthonormality_defect(basis, 10) < tol


@pytest.mark.parametrize("alpha,mu", PARAM_SETS)
def test_eigenvalue_reciprocal_sum_bounded(alpha, mu):
    basis = build_basis(ProblemParams(alpha, mu), 120)
    partial = np.cumsum(1.0 / basis.lambdas)
    assert np.all(np.diff(partial) > 0)
    scale = ((2.0 - alpha) / 2.0) ** 2
    nu = basis.nu
    tail_bound = sum(1.0 / (scale * zero_bracket(nu, n).lower ** 2) for n in range(2, 121))
    assert partial[-1] <= 1.0 / basis.lambdas[0] + tail_bound + 1e-12


def test_mu_critical():
    assert mu_critical(0.0) == 0.25
    assert mu_critical(0.5) == pytest.approx(1.0 / 16.0)


def test_quadrature_cross_check():
    val = integrate_graded(lambda x: np.sqrt(x), tol=1e-12)
    assert val == pytest.approx(2.0 / 3.0, rel=1e-11)
