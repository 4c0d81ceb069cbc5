import math

import numpy as np
import pytest

import degenheat.controllability as ct
from degenheat.controllability import (
    PointInBadSetError,
    Verdict,
    bad_set_membership,
    minimal_time_estimate,
    null_controllability_verdict,
    observability_quotient,
)
from degenheat.spectrum import ProblemParams, build_basis


def test_half_point_is_member_with_first_witness():
    verdict = bad_set_membership(ProblemParams(0.0, 0.0, 0.5), 10, 1e-12)
    assert verdict.in_p
    assert verdict.witness == (1, 2)
    # round-trip: the witness ratio reproduces b_bar within tol
    basis = build_basis(ProblemParams(0.0, 0.0, 0.5), 2)
    k0, n0 = verdict.witness
    ratio = (basis.zeros[k0 - 1] / basis.zeros[n0 - 1]) ** (2.0 / 2.0)
    assert abs(0.5 - ratio) <= verdict.tolerance


def test_irrational_point_not_member_classical():
    verdict = bad_set_membership(ProblemParams(0.0, 0.0, 1 / math.sqrt(2)), 500, 1e-10)
    assert not verdict.in_p
    assert verdict.scan_depth == 500


def test_half_point_not_member_degenerate():
    verdict = bad_set_membership(ProblemParams(0.5, 1 / 16, 0.5), 200, 1e-9)
    assert not verdict.in_p


def test_scan_parameter_validation():
    with pytest.raises(ValueError):
        bad_set_membership(ProblemParams(0.0, 0.0, 0.5), 1, 1e-9)
    with pytest.raises(ValueError):
        bad_set_membership(ProblemParams(0.0, 0.0, 0.5), 10, 0.0)


def test_minimal_time_badly_approximable_point():
    b = math.sqrt(2) - 1
    basis = build_basis(ProblemParams(0.0, 0.0, b), 200)
    est = minimal_time_estimate(basis, b, 200)
    assert est.estimate < 0.01
    # decreasing tail across dyadic blocks
    r = est.ratios
    assert r[100:200].max() < r[50:100].max() < r[25:50].max()
    assert np.all(np.isfinite(r))
    assert np.all(np.diff(est.running_sup) >= 0)


def test_minimal_time_requires_nonmember():
    # b_bar = 1/2 is in the bad set for alpha = mu = 0; the pipeline gate is
    # the membership verdict, which refuses synthesis before estimation
    p = ProblemParams(0.0, 0.0, 0.5)
    assert bad_set_membership(p, 10, 1e-12).in_p


def test_minimal_time_degenerate_finite():
    basis = build_basis(ProblemParams(0.5, 1 / 16, 0.5), 200)
    est = minimal_time_estimate(basis, 0.5, 200)
    assert math.isfinite(est.estimate)
    assert est.per_k.shape == (200, 4)


def test_machine_zero_escalates(monkeypatch):
    basis = build_basis(ProblemParams(0.0, 0.0, 0.5), 3)
    monkeypatch.setattr(ct, "eigenfunction_value", lambda b, k, x: 0.0)
    with pytest.raises(PointInBadSetError):
        minimal_time_estimate(basis, 0.5, 3)
    with pytest.raises(PointInBadSetError):
        observability_quotient(basis, 1, 0.5, 1.0)


def test_dolecki_reduction():
    b = 0.321
    basis = build_basis(ProblemParams(0.0, 0.0, b), 50)
    est = minimal_time_estimate(basis, b, 50)
    for k in (1, 7, 23, 50):
        expected = -math.log(math.sqrt(2) * abs(math.sin(k * math.pi * b))) / (k * math.pi) ** 2
        assert est.ratios[k - 1] == pytest.approx(expected, abs=1e-12)


def test_appendix_bound_with_fitted_xi():
    basis = build_basis(ProblemParams(0.5, 1 / 16, 0.5), 100)
    est = minimal_time_estimate(basis, 0.5, 100)
    phis = est.per_k[:, 2]
    lams = est.per_k[:, 1]
    xi = np.max(phis / lams)
    assert np.all(phis <= xi * lams)
    assert np.all(est.ratios >= -np.log(xi * lams) / lams)


def test_verdict_thresholds():
    assert null_controllability_verdict(1.0, 0.001, 0.1) is Verdict.CONTROLLABLE
    assert null_controllability_verdict(0.0001, 0.5, 0.1) is Verdict.NOT_CONTROLLABLE
    assert null_controllability_verdict(0.5, 0.5, 0.1) is Verdict.INDETERMINATE


def test_observability_quotient_closed_form():
    basis = build_basis(ProblemParams(0.0, 0.0, 0.25), 1)
    q = observability_quotient(basis, 1, 0.25, 1.0)
    lam = math.pi**2
    # Phi_1(1/4)^2 = 2 sin^2(pi/4) = 1
    expected = math.exp(-2 * lam) * 2 * lam / (1.0 - math.exp(-2 * lam))
    assert q == pytest.approx(expected, rel=1e-10)


def test_observability_two_sided_growth():
    # planted near-miss of the bad set: |Phi_100(b)| ~ 1e-12 dominates the
    # upper window, and 4x the estimate suppresses every mode
    alpha, mu = 0.9, -1.0
    basis = build_basis(ProblemParams(alpha, mu, 0.5), 200)
    b = (basis.zeros[49] / basis.zeros[99]) ** (2.0 / (2.0 - alpha)) + 1e-12
    params = ProblemParams(alpha, mu, b)
    assert not bad_set_membership(params, 200, 1e-14).in_p
    basis = build_basis(params, 200)
    est = minimal_time_estimate(basis, b, 200)
    assert est.estimate > 0
    q_low = [observability_quotient(basis, k, b, est.estimate / 4) for k in range(1, 201)]
    q_high = [observability_quotient(basis, k, b, 4 * est.estimate) for k in range(1, 201)]
    assert max(q_low) > 1e6
    assert max(q_high) < 1e3
