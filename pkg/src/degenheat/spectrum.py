"""Eigen-system of the degenerate/singular operator u -> -(x^a u')' - mu x^(a-2) u.

Under the weak-degeneracy condition (alpha in [0,1), mu <= mu_crit(alpha) with
mu_crit = (1-alpha)^2/4, the Dirichlet spectrum on (0,1) is

    lambda_n = ((2-alpha)/2)^2 j_{nu,n}^2,
    Phi_n(x) = sqrt(2-alpha)/|J_nu'(j_{nu,n})| * x^((1-alpha)/2)
               * J_nu(j_{nu,n} x^((2-alpha)/2)),

where nu = (2/(2-alpha)) sqrt(mu_crit - mu) and j_{nu,n} are the positive
zeros of J_nu.  The family (Phi_n) is an orthonormal basis of L^2(0,1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j, bessel_j_deriv, bessel_zeros
from .quadrature import integrate_graded, graded_nodes

__all__ = [
    "CoefficientVector",
    "ProblemParams",
    "SpectralBasis",
    "build_basis",
    "eigenfunction_value",
    "eigenvalue",
    "expand_initial_data",
    "gap_constant",
    "mu_critical",
    "nu_param",
    "orthonormality_defect",
]


def mu_critical(alpha: float) -> float:
    """Hardy constant (1-alpha)^2 / 4, the upper admissible value of mu."""
    return (1.0 - alpha) ** 2 / 4.0


@dataclass(frozen=True)
class ProblemParams:
    """Problem data (alpha, mu, b_bar, T) with weak-degeneracy validation."""

    alpha: float
    mu: float
    b_bar: float = 0.5
    T: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not math.isfinite(self.mu) or self.mu > mu_critical(self.alpha) + 1e-15:
            raise ValueError(
                f"mu must satisfy mu <= (1-alpha)^2/4 = {mu_critical(self.alpha)}, got {self.mu}"
            )
        if not (0.0 < self.b_bar < 1.0):
            raise ValueError(f"control point b_bar must lie in (0, 1), got {self.b_bar}")
        if not self.T > 0.0:
            raise ValueError(f"time horizon T must be positive, got {self.T}")

    @property
    def mu_crit(self) -> float:
        return mu_critical(self.alpha)


def nu_param(alpha: float, mu: float) -> float:
    """Bessel order nu(alpha, mu) = (2/(2-alpha)) sqrt(mu_crit(alpha) - mu)."""
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    gap = mu_critical(alpha) - mu
    if gap < 0.0:
        if gap > -1e-15:  # critical case up to roundoff
            gap = 0.0
        else:
            raise ValueError(f"mu exceeds the critical value {mu_critical(alpha)}")
    return 2.0 / (2.0 - alpha) * math.sqrt(gap)


@dataclass(frozen=True)
class SpectralBasis:
    """Truncated eigen-system: zeros, eigenvalues, and normalization constants."""

    params: ProblemParams
    K: int
    nu: float
    zeros: np.ndarray
    lambdas: np.ndarray
    norm_consts: np.ndarray = field(repr=False)

    def __post_init__(self):
        if np.any(np.diff(self.lambdas) <= 0.0):
            raise ValueError("eigenvalues must be strictly increasing")


def build_basis(params: ProblemParams, K: int = 50) -> SpectralBasis:
    """Construct the first K modes of the eigen-system for the given parameters."""
    if K < 1:
        raise ValueError("truncation order K must be >= 1")
    nu = nu_param(params.alpha, params.mu)
    zeros = np.array(bessel_zeros(nu, K))
    scale = (2.0 - params.alpha) / 2.0
    lambdas = (scale * zeros) ** 2
    norms = np.array(
        [math.sqrt(2.0 - params.alpha) / abs(bessel_j_deriv(nu, z)) for z in zeros]
    )
    return SpectralBasis(params, K, nu, zeros, lambdas, norms)


def eigenvalue(basis: SpectralBasis, n: int) -> float:
    """lambda_n (1-based mode index)."""
    if not 1 <= n <= basis.K:
        raise IndexError(f"mode index {n} outside 1..{basis.K}")
    return float(basis.lambdas[n - 1])


def eigenfunction_value(basis: SpectralBasis, n: int, x):
    """Phi_n evaluated at x (scalar or array), with Phi_n(0) = Phi_n(1) = 0."""
    if not 1 <= n <= basis.K:
        raise IndexError(f"mode index {n} outside 1..{basis.K}")
    alpha = basis.params.alpha
    j = basis.zeros[n - 1]
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if np.any((xs < 0.0) | (xs > 1.0)):
        raise ValueError("eigenfunctions are defined on [0, 1]")
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        if xi == 0.0:
            out[i] = 0.0
        else:
            out[i] = (
                basis.norm_consts[n - 1]
                * xi ** ((1.0 - alpha) / 2.0)
                * bessel_j(basis.nu, j * xi ** ((2.0 - alpha) / 2.0))
            )
    return float(out[0]) if scalar else out


def gap_constant(alpha: float, mu: float) -> float:
    """Spectral-gap constant rho with |lambda_n - lambda_m| >= rho |n^2 - m^2|.

    rho = (7/64) pi^2 (2-alpha)^2 for nu(alpha,mu) <= 1/2 and
    ((2-alpha)/2)^2 pi^2 for nu(alpha,mu) >= 1/2.
    """
    nu = nu_param(alpha, mu)
    if nu <= 0.5:
        return 7.0 / 64.0 * math.pi**2 * (2.0 - alpha) ** 2
    return ((2.0 - alpha) / 2.0) ** 2 * math.pi**2


@dataclass(frozen=True)
class CoefficientVector:
    """Expansion coefficients of L^2 data in a SpectralBasis."""

    coeffs: np.ndarray
    basis: SpectralBasis

    def __post_init__(self):
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("expansion coefficients must be finite")

    def __len__(self) -> int:
        return len(self.coeffs)


def expand_initial_data(basis: SpectralBasis, f, tol: float = 1e-10) -> CoefficientVector:
    """Project pointwise-evaluable square-integrable data onto the basis.

    coeffs[k] = integral_0^1 f(x) Phi_{k+1}(x) dx via the graded composite
    Gauss-Legendre rule; non-convergence raises QuadratureError with the
    achieved tolerance.
    """
    coeffs = np.empty(basis.K)
    for k in range(1, basis.K + 1):
        # oscillation-aware panel density: phase runs at most at rate j_k
        subdiv = max(1, math.ceil(float(basis.zeros[k - 1]) / 10.0))
        coeffs[k - 1] = integrate_graded(
            lambda x, k=k: np.asarray(f(x)) * eigenfunction_value(basis, k, x),
            tol=tol,
            subdiv=subdiv,
        )
    return CoefficientVector(coeffs, basis)


def parseval_defect(basis: SpectralBasis, f, coeffs: CoefficientVector) -> float:
    """||f||^2 - sum coeffs^2; nonnegative up to quadrature error, decreasing in K."""
    norm2 = integrate_graded(lambda x: np.asarray(f(x)) ** 2)
    return norm2 - float(np.sum(coeffs.coeffs**2))


def orthonormality_defect(basis: SpectralBasis, K: int) -> float:
    """max |G_ij - delta_ij| over the K x K quadrature Gram matrix of the Phi_n."""
    if not 1 <= K <= basis.K:
        raise IndexError(f"K={K} outside 1..{basis.K}")
    subdiv = max(1, math.ceil(float(basis.zeros[K - 1]) / 10.0))
    x, w = graded_nodes(subdiv=subdiv)
    vals = np.vstack([eigenfunction_value(basis, n, x) for n in range(1, K + 1)])
    gram = (vals * w) @ vals.T
    return float(np.abs(gram - np.eye(K)).max())
