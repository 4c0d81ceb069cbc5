"""Bessel functions of the first kind: values, derivatives, and positive zeros.

Three evaluation regimes are stitched together so that every (nu, x) with
nu >= 0 and 0 <= x <= ~1e3 is computed without catastrophic cancellation:

* ascending power series for x <= 6,
* Miller backward recurrence, normalized with the Neumann identity
  (x/2)^nu = sum_k (nu+2k) Gamma(nu+k)/k! * J_{nu+2k}(x), for 6 < x < 25,
* Hankel asymptotic expansion for x >= 25.

Zeros are bracketed by the two-regime inequalities

    nu in [0, 1/2]:  (n + nu/2 - 1/4) pi <= j_{nu,n} <= (n + nu/4 - 1/8) pi
    nu >= 1/2:       (n + nu/4 - 1/8) pi <= j_{nu,n} <= (n + nu/2 - 1/4) pi

and refined by bisection plus a Newton polish.  All functions are pure and
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ZeroBracket",
    "bessel_j",
    "bessel_j_deriv",
    "bessel_zero",
    "bessel_zeros",
    "zero_bracket",
]

_SERIES_MAX = 6.0
_ASYMPTOTIC_MIN = 25.0


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not math.isfinite(nu) or nu < 0.0:
        raise ValueError(f"Bessel order must be finite and >= 0, got {nu}")
    return nu


def _series(nu: float, x: float) -> float:
    # J_nu(x) = sum_m (-1)^m (x/2)^(2m+nu) / (m! Gamma(nu+m+1))
    q = 0.5 * x
    term = math.exp(nu * math.log(q) - math.lgamma(nu + 1.0)) if x > 0.0 else (1.0 if nu == 0.0 else 0.0)
    total = term
    for m in range(400):
        term *= -(q * q) / ((m + 1.0) * (nu + m + 1.0))
        total += term
        if abs(term) <= 1e-17 * abs(total) + 5e-324:
            return total
    raise RuntimeError(f"Bessel series did not converge for nu={nu}, x={x}")


def _miller(nu: float, x: float) -> tuple[float, float]:
    """Return (J_nu(x), J_{nu+1}(x)) by backward recurrence."""
    frac = nu - math.floor(nu)
    # start far enough above x that the downward recurrence has converged
    top = int(x + 1.5 * math.sqrt(x) + 36.0)
    steps = math.ceil((nu - frac + 2.0 * top) / 2.0)
    mu = frac + 2.0 * steps
    jp = 0.0
    jc = 1e-300
    want = {round(nu, 12): 0.0, round(nu + 1.0, 12): 0.0}
    norm = 0.0
    k_norm = (mu - frac) / 2.0
    while mu >= frac - 1e-9:
        key = round(mu, 12)
        if key in want:
            want[key] = jc
        # accumulate normalization at orders frac + 2k
        if abs((mu - frac) / 2.0 - round((mu - frac) / 2.0)) < 1e-9:
            k = int(round((mu - frac) / 2.0))
            if frac == 0.0:
                coef = 1.0 if k == 0 else 2.0
            else:
                coef = (frac + 2.0 * k) * math.exp(math.lgamma(frac + k) - math.lgamma(k + 1.0))
            norm += coef * jc
        jm = (2.0 * mu / x) * jc - jp
        jp, jc = jc, jm
        mu -= 1.0
        if abs(jc) > 1e250:
            jp *= 1e-250
            jc *= 1e-250
            norm *= 1e-250
            for key in want:
                want[key] *= 1e-250
    scale = (1.0 if frac == 0.0 else (0.5 * x) ** frac) / norm
    return want[round(nu, 12)] * scale, want[round(nu + 1.0, 12)] * scale


def _hankel(nu: float, x: float) -> float:
    # J_nu(x) ~ sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)], chi = x - nu pi/2 - pi/4
    mu4 = 4.0 * nu * nu
    p_sum = 0.0
    q_sum = 0.0
    ak = 1.0
    for k in range(60):
        sign = 1.0 if (k // 2) % 2 == 0 else -1.0
        if k % 2 == 0:
            p_sum += sign * ak
        else:
            q_sum += sign * ak
        ak_next = ak * (mu4 - (2 * k + 1) ** 2) / ((k + 1) * 8.0 * x)
        if abs(ak_next) >= abs(ak) and k > 4:
            break
        if abs(ak_next) < 1e-18:
            if k % 2 == 0:
                q_sum += (1.0 if ((k + 1) // 2) % 2 == 0 else -1.0) * ak_next
            else:
                p_sum += (1.0 if ((k + 1) // 2) % 2 == 0 else -1.0) * ak_next
            break
        ak = ak_next
    chi = x - (0.5 * nu + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p_sum * math.cos(chi) - q_sum * math.sin(chi))


def bessel_j(nu: float, x: float) -> float:
    """Evaluate J_nu(x) for nu >= 0, x >= 0.

    Raises ValueError on negative argument or order.  Envelope-relative
    accuracy is ~1e-13 up to x = 1e3 for moderate orders.
    """
    nu = _check_order(nu)
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise ValueError(f"Bessel argument must be finite and >= 0, got {x}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if x <= _SERIES_MAX:
        return _series(nu, x)
    if x < _ASYMPTOTIC_MIN:
        return _miller(nu, x)[0]
    return _hankel(nu, x)


def bessel_j_deriv(nu: float, x: float) -> float:
    """Evaluate J_nu'(x) via J_nu'(x) = -J_{nu+1}(x) + (nu/x) J_nu(x).

    x = 0 is a domain error for nu < 1 (the derivative is unbounded there
    for fractional orders); for nu >= 1 the limit value is returned.
    """
    nu = _check_order(nu)
    x = float(x)
    if x < 0.0 or not math.isfinite(x):
        raise ValueError(f"Bessel argument must be finite and >= 0, got {x}")
    if x == 0.0:
        if nu < 1.0:
            raise ValueError("J_nu'(0) is undefined for nu < 1")
        return 0.5 if nu == 1.0 else 0.0
    if _SERIES_MAX < x < _ASYMPTOTIC_MIN:
        jn, jn1 = _miller(nu, x)
    else:
        jn, jn1 = bessel_j(nu, x), bessel_j(nu + 1.0, x)
    return -jn1 + (nu / x) * jn


@dataclass(frozen=True)
class ZeroBracket:
    """Guaranteed enclosure of the n-th positive zero of J_nu.

    At nu = 1/2 both bounds coincide with the zero n*pi itself, so
    containment carries a small absolute slack for that degenerate case.
    """

    n: int
    lower: float
    upper: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("zero index must be >= 1")
        if self.lower > self.upper:
            raise ValueError("bracket must satisfy lower <= upper")

    def contains(self, x: float, slack: float = 1e-9) -> bool:
        return self.lower - slack < x < self.upper + slack


def zero_bracket(nu: float, n: int) -> ZeroBracket:
    """Two-regime enclosure of j_{nu,n}; at nu = 1/2 the nu >= 1/2 pair is used."""
    nu = _check_order(nu)
    if n < 1:
        raise ValueError("zero index must be >= 1")
    a = (n + 0.5 * nu - 0.25) * math.pi
    b = (n + 0.25 * nu - 0.125) * math.pi
    if nu < 0.5:
        return ZeroBracket(n, a, b)
    return ZeroBracket(n, b, a)


def _refine_zero(nu: float, lo: float, hi: float) -> float:
    flo = bessel_j(nu, lo)
    fhi = bessel_j(nu, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise RuntimeError(
            f"no sign change in [{lo}, {hi}] for nu={nu}; Bessel evaluation is broken"
        )
    # bisection down to a width where Newton is safe
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        fm = bessel_j(nu, mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    x = 0.5 * (lo + hi)
    for _ in range(12):
        f = bessel_j(nu, x)
        df = bessel_j_deriv(nu, x)
        step = f / df
        x_new = x - step
        if not lo - 1e-6 <= x_new <= hi + 1e-6:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-15 * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def bessel_zeros(nu: float, count: int) -> list[float]:
    """First `count` positive zeros of J_nu, strictly increasing.

    Zeros are located sequentially: the search interval for j_{nu,n} is the
    paper bracket clipped below by the previous zero, scanned forward for a
    sign change (brackets of adjacent n overlap once nu > 4.5).
    """
    nu = _check_order(nu)
    zeros: list[float] = []
    prev = 0.0
    for n in range(1, count + 1):
        br = zero_bracket(nu, n)
        lo, hi = br.lower, br.upper
        if hi - lo < 1e-6:  # degenerate bracket (nu = 1/2): widen the search only
            lo -= 0.1
            hi += 0.1
        lo = max(lo, prev + 1e-9)
        f_lo = bessel_j(nu, lo)
        if f_lo * bessel_j(nu, hi) > 0.0:
            # walk forward until the first sign change inside the bracket
            step = math.pi / 8.0
            a, fa = lo, f_lo
            found = False
            while a < hi:
                b = min(a + step, hi)
                fb = bessel_j(nu, b)
                if fa == 0.0 or fa * fb <= 0.0:
                    lo, hi = a, b
                    found = True
                    break
                a, fa = b, fb
            if not found:
                raise RuntimeError(
                    f"no sign change found in bracket for nu={nu}, n={n}; aborting"
                )
        root = _refine_zero(nu, lo, hi)
        if not br.contains(root):
            raise RuntimeError(
                f"computed zero {root} escaped its bracket [{br.lower}, {br.upper}]"
            )
        if root <= prev:
            raise RuntimeError("zeros failed to increase; aborting")
        zeros.append(root)
        prev = root
    return zeros


def bessel_zero(nu: float, n: int) -> float:
    """n-th positive zero of J_nu (n >= 1), absolute error well below 1e-11."""
    if n < 1:
        raise ValueError("zero index must be >= 1")
    return bessel_zeros(nu, n)[-1]
