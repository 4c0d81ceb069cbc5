"""Graded composite Gauss-Legendre quadrature on (0, 1].

The eigenfunctions of the degenerate operator behave like x^((1-alpha)/2)
near x = 0, so their derivatives blow up there while the functions stay
continuous.  A geometric grading of panels toward 0 (ratio 1/2) recovers
full accuracy without a singular weight.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["QuadratureError", "graded_nodes", "integrate_graded"]


class QuadratureError(RuntimeError):
    """Raised when the graded rule cannot certify the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


@lru_cache(maxsize=None)
def _gauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def graded_nodes(order: int = 16, levels: int = 40, a: float = 0.0, b: float = 1.0,
                 ratio: float = 0.5, subdiv: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite rule graded toward `a`.

    Panels are [a + (b-a) r^(k+1), a + (b-a) r^k] for k = 0..levels-1 plus the
    residual sliver [a, a + (b-a) r^levels], each carrying a Gauss-Legendre
    rule of the given order.  `subdiv` splits every panel into equal parts,
    which is how oscillatory integrands (high eigenmodes) are resolved.
    """
    xg, wg = _gauss(order)
    cuts = a + (b - a) * ratio ** np.arange(levels + 1)
    lefts = np.concatenate([[a], cuts[1:][::-1]])
    rights = np.concatenate([[cuts[-1]], cuts[:-1][::-1]])
    nodes = []
    weights = []
    for lo, hi in zip(lefts, rights):
        edges = np.linspace(lo, hi, subdiv + 1)
        for sl, sh in zip(edges[:-1], edges[1:]):
            half = 0.5 * (sh - sl)
            nodes.append(sl + half * (xg + 1.0))
            weights.append(half * wg)
    return np.concatenate(nodes), np.concatenate(weights)


def integrate_graded(f, order: int = 16, levels: int = 40, a: float = 0.0,
                     b: float = 1.0, tol: float | None = None,
                     subdiv: int = 1) -> float:
    """Integrate a vectorized callable over [a, b] with endpoint grading.

    When `tol` is given, the result is cross-checked against a higher-order
    rule; failure to agree raises QuadratureError carrying the achieved
    difference.
    """
    x, w = graded_nodes(order, levels, a, b, subdiv=subdiv)
    val = float(w @ f(x))
    if tol is not None:
        x2, w2 = graded_nodes(order + 8, levels, a, b, subdiv=subdiv)
        ref = float(w2 @ f(x2))
        achieved = abs(val - ref)
        if achieved > tol * max(1.0, abs(ref)):
            raise QuadratureError(
                f"graded quadrature reached {achieved:.3e}, requested {tol:.3e}",
                achieved,
            )
        return ref
    return val
