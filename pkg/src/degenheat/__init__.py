"""Pointwise controllability toolkit for 1-D degenerate/singular heat equations.

The operator u -> u_t - (x^a u_x)_x - mu x^(a-2) u on (0, 1) is controlled
through a Dirac source at an interior point b_bar.  This package computes the
Bessel-based eigen-system, decides approximate controllability (membership of
b_bar in the bad set of eigenfunction zeros), estimates the minimal
null-control time, synthesizes the moment-method control via a truncated
biorthogonal family, and simulates the controlled equation with B-spline
collocation cross-checked against a spectral oracle.
"""

from .bessel import ZeroBracket, bessel_j, bessel_j_deriv, bessel_zero, bessel_zeros, zero_bracket
from .collocation import (
    CollocationSystem,
    ModeTrajectory,
    SolverError,
    Trajectory,
    assemble,
    final_norms,
    simulate,
    spectral_simulate,
)
from .controllability import (
    BadSetVerdict,
    MinimalTimeEstimate,
    PointInBadSetError,
    Verdict,
    bad_set_membership,
    minimal_time_estimate,
    null_controllability_verdict,
    observability_quotient,
)
from .moment_control import (
    BiorthogonalFamily,
    ConditioningError,
    ControlSignal,
    QuadratureResolutionWarning,
    biorthogonal_family,
    gram_matrix,
    moment_residuals,
    synthesize_control,
)
from .quadrature import QuadratureError, integrate_graded
from .spectrum import (
    CoefficientVector,
    ProblemParams,
    SpectralBasis,
    build_basis,
    eigenfunction_value,
    eigenvalue,
    expand_initial_data,
    gap_constant,
    mu_critical,
    nu_param,
    orthonormality_defect,
)
from .splines import (
    ConvergenceReport,
    QuasiInterpolant,
    SplineSpace,
    build_quasi_interpolant,
    bspline_deriv,
    bspline_eval,
    collocation_matrix,
    convergence_order,
    knot_set,
    make_uniform_space,
    quasi_interpolate,
    spline_value,
)

__version__ = "0.1.0"
