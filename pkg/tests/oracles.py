"""Independent numerical oracles used by the test suite.

Everything here deliberately avoids the package's own evaluation paths:
a plain ascending series with interval bisection for the first Bessel zero,
central finite differences for derivatives, and a conservative-form finite
difference eigensolver for the degenerate Sturm-Liouville problem.
"""

import math

import numpy as np
from scipy.linalg import eigh_tridiagonal


def ascending_series_j(nu, x, terms=60):
    q = 0.5 * x
    t = q**nu / math.gamma(nu + 1.0)
    s = t
    for m in range(terms):
        t *= -(q * q) / ((m + 1.0) * (nu + m + 1.0))
        s += t
    return s


def bisect_first_j0_zero():
    """First zero of J_0 by bisection of the ascending series in (0.75 pi, 0.875 pi)."""
    lo, hi = 0.75 * math.pi, 0.875 * math.pi
    flo = ascending_series_j(0.0, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = ascending_series_j(0.0, mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def central_difference(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def sturm_liouville_fd(alpha, mu, n_modes=3, m_cells=6000, grading=2.0):
    """Finite-difference eigenpairs of -(x^a u')' - mu x^(a-2) u on (0, 1).

    Conservative discretization on a grid graded toward x = 0; returns
    (eigenvalues, grid, eigenvectors) with eigenvectors normalized in the
    discrete L^2 inner product (trapezoidal weights).
    """
    s = np.linspace(0.0, 1.0, m_cells + 1)
    x = s**grading
    xm = 0.5 * (x[:-1] + x[1:])          # flux points
    hx = np.diff(x)
    w = np.empty(m_cells - 1)            # cell weights around interior nodes
    w[:] = 0.5 * (x[2:] - x[:-2])
    a = xm**alpha
    # tridiagonal stiffness in the symmetric form
    main = (a[:-1] / hx[:-1] + a[1:] / hx[1:]) / w
    off = -a[1:-1] / hx[1:-1] / np.sqrt(w[:-1] * w[1:])
    pot = mu * x[1:-1] ** (alpha - 2.0)
    main = main - pot
    vals, vecs = eigh_tridiagonal(main, off, select="i", select_range=(0, n_modes - 1))
    # undo the symmetrizing scaling and normalize in L^2
    phi = vecs / np.sqrt(w)[:, None]
    for j in range(n_modes):
        norm2 = float(np.sum(w * phi[:, j] ** 2))
        phi[:, j] /= math.sqrt(norm2)
        imax = np.argmax(np.abs(phi[:, j]))
        if phi[imax, j] < 0:
            phi[:, j] = -phi[:, j]
    return vals, x[1:-1], phi
