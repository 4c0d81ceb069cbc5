"""Approximate-controllability decision, minimal null-control time, observability.

The control point b_bar kills approximate controllability exactly when it is
a zero of some eigenfunction, i.e. when it belongs to

    P = { (j_{nu,k} / j_{nu,n})^(2/(2-alpha)) : n > k >= 1 }.

Away from P the minimal null-control time is

    T0 = limsup_k  -log|Phi_k(b_bar)| / lambda_k,

reported here as a truncated estimate (max over the upper half of the
computed mode range) together with the full per-mode table, so convergence
can be judged by the caller.  Exact membership in P is undecidable in
floating point; verdicts are explicitly scan- and tolerance-bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bessel import bessel_zeros
from .spectrum import ProblemParams, SpectralBasis, eigenfunction_value, nu_param

__all__ = [
    "BadSetVerdict",
    "MinimalTimeEstimate",
    "PointInBadSetError",
    "Verdict",
    "bad_set_membership",
    "minimal_time_estimate",
    "null_controllability_verdict",
    "observability_quotient",
]


class PointInBadSetError(RuntimeError):
    """Raised when an operation requires b_bar outside P but it is (numerically) inside."""


@dataclass(frozen=True)
class BadSetVerdict:
    """Scan-bounded membership verdict for b_bar in the bad set P."""

    in_p: bool
    witness: tuple[int, int] | None
    scan_depth: int
    tolerance: float

    def __post_init__(self):
        if self.in_p and self.witness is None:
            raise ValueError("membership verdict requires a witness pair")


def bad_set_membership(params: ProblemParams, scan_depth: int = 200,
                       tol: float = 1e-9) -> BadSetVerdict:
    """Scan all pairs n > k <= scan_depth for |b_bar - (j_k/j_n)^(2/(2-alpha))| <= tol.

    Returns the first witness in lexicographic (n, k) order, or a negative
    verdict that is valid only at this scan depth and tolerance.
    """
    if scan_depth < 2:
        raise ValueError("scan depth must be >= 2")
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    nu = nu_param(params.alpha, params.mu)
    zeros = np.array(bessel_zeros(nu, scan_depth))
    expo = 2.0 / (2.0 - params.alpha)
    for n in range(2, scan_depth + 1):
        ratios = (zeros[: n - 1] / zeros[n - 1]) ** expo
        hits = np.nonzero(np.abs(params.b_bar - ratios) <= tol)[0]
        if hits.size:
            return BadSetVerdict(True, (int(hits[0]) + 1, n), scan_depth, tol)
    return BadSetVerdict(False, None, scan_depth, tol)


@dataclass(frozen=True)
class MinimalTimeEstimate:
    """Truncated minimal-time data: per-mode table, running sup, and estimate.

    per_k rows are (k, lambda_k, |Phi_k(b_bar)|, ratio_k) with
    ratio_k = -log|Phi_k(b_bar)| / lambda_k; running_sup is the prefix
    maximum of the ratios and estimate = max over k in [ceil(K/2), K].
    """

    per_k: np.ndarray
    running_sup: np.ndarray
    estimate: float
    K: int

    @property
    def ratios(self) -> np.ndarray:
        return self.per_k[:, 3]


def minimal_time_estimate(basis: SpectralBasis, b_bar: float, K: int | None = None) -> MinimalTimeEstimate:
    """Estimate T0(b_bar) from the first K modes.

    Requires a prior negative bad-set verdict at the working tolerance; any
    |Phi_k(b_bar)| below 1e-300 is treated as membership at machine precision
    and escalates to PointInBadSetError.
    """
    K = basis.K if K is None else K
    if not 1 <= K <= basis.K:
        raise IndexError(f"K={K} outside 1..{basis.K}")
    rows = np.empty((K, 4))
    for k in range(1, K + 1):
        lam = basis.lambdas[k - 1]
        phi = abs(eigenfunction_value(basis, k, b_bar))
        if phi < 1e-300:
            raise PointInBadSetError(
                f"|Phi_{k}(b_bar)| < 1e-300: b_bar is in the bad set at machine precision"
            )
        rows[k - 1] = (k, lam, phi, -math.log(phi) / lam)
    ratios = rows[:, 3]
    running = np.maximum.accumulate(ratios)
    window = ratios[math.ceil(K / 2) - 1:]
    return MinimalTimeEstimate(rows, running, float(window.max()), K)


class Verdict(Enum):
    CONTROLLABLE = "controllable"
    NOT_CONTROLLABLE = "not_controllable"
    INDETERMINATE = "indeterminate"


def null_controllability_verdict(T: float, estimate: MinimalTimeEstimate | float,
                                 margin: float = 0.05) -> Verdict:
    """Two-sided verdict around the truncated minimal-time estimate.

    The margin shields against truncation error; T = T0 itself is left open
    (indeterminate), matching the untreated boundary case.
    """
    est = estimate.estimate if isinstance(estimate, MinimalTimeEstimate) else float(estimate)
    if T > est * (1.0 + margin):
        return Verdict.CONTROLLABLE
    if T < est * (1.0 - margin):
        return Verdict.NOT_CONTROLLABLE
    return Verdict.INDETERMINATE


def observability_quotient(basis: SpectralBasis, k: int, b_bar: float, T: float) -> float:
    """Observability quotient for eigen-data phi_0 = Phi_k:

        e^(-2 lambda_k T) / ( Phi_k(b_bar)^2 (1 - e^(-2 lambda_k T)) / (2 lambda_k) ).

    Grows without bound along a subsequence when T is below the minimal time
    and stays bounded above it.
    """
    lam = basis.lambdas[k - 1]
    phi = eigenfunction_value(basis, k, b_bar)
    if abs(phi) < 1e-300:
        raise PointInBadSetError(f"Phi_{k}(b_bar) vanishes at machine precision")
    decay = math.exp(-2.0 * lam * T)
    return decay / (phi**2 * (1.0 - decay) / (2.0 * lam))
