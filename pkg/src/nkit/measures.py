"""Two-variable Mahler measure and the L(2, chi_3) constant.

The two-variable log-measure is reduced to one dimension with Jensen's
formula in y: for fixed x on the unit circle,

    int log|f(x, y)| dy = log|c_top(x)| + sum_k log+ |y_k(x)|,

where c_top is the leading coefficient in y and y_k are the roots.  The
remaining integrand is smooth except at "kinks" where a root crosses the
unit circle; those are located by bisection and the pieces integrated with
adaptive Gauss-Kronrod.  The error radius is the quadrature's own estimate
(inflated), so the result is flagged non-rigorous.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction

import numpy as np
from flint import arb, fmpq
from scipy import integrate

from .certified import CertifiedValue, default_precision, working_precision
from .errors import DomainError

KINK_GRID = 4096


def _y_coefficients(f: dict) -> list[list[tuple[int, int]]]:
    """Group terms by y-degree: out[j] = [(i, c), ...] for c x^i y^j."""
    if not f or all(c == 0 for c in f.values()):
        raise DomainError("Mahler measure of the zero polynomial")
    dy = max(j for (i, j), c in f.items() if c != 0)
    out = [[] for _ in range(dy + 1)]
    for (i, j), c in f.items():
        if c != 0:
            out[j].append((i, c))
    return out


def _coeffs_at(groups, x: complex) -> np.ndarray:
    return np.array([sum(c * x**i for i, c in g) for g in groups], dtype=complex)


def _inner(groups, s: float) -> float:
    x = complex(math.cos(2 * math.pi * s), math.sin(2 * math.pi * s))
    cs = _coeffs_at(groups, x)
    # trim vanishing leading coefficients (only on a measure-zero set)
    top = len(cs) - 1
    while top > 0 and abs(cs[top]) == 0:
        top -= 1
    lead = abs(cs[top])
    if lead == 0:
        return -math.inf
    val = math.log(lead)
    if top >= 1:
        roots = np.roots(cs[: top + 1][::-1])
        val += float(np.sum(np.log(np.maximum(np.abs(roots), 1.0))))
    return val


def _outside_count(groups, s: float) -> int:
    x = complex(math.cos(2 * math.pi * s), math.sin(2 * math.pi * s))
    cs = _coeffs_at(groups, x)
    top = len(cs) - 1
    while top > 0 and abs(cs[top]) == 0:
        top -= 1
    if top < 1:
        return 0
    return int(np.sum(np.abs(np.roots(cs[: top + 1][::-1])) > 1.0))


def _kinks(groups) -> list[float]:
    grid = np.linspace(0.0, 1.0, KINK_GRID + 1)
    counts = [_outside_count(groups, s) for s in grid]
    pts = []
    for a, b, ca, cb in zip(grid[:-1], grid[1:], counts[:-1], counts[1:]):
        if ca == cb:
            continue
        lo, hi = float(a), float(b)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _outside_count(groups, mid) == ca:
                lo = mid
            else:
                hi = mid
        pts.append(0.5 * (lo + hi))
    return pts


def mahler_measure_2var(f: dict, tol: float = 1e-13) -> CertifiedValue:
    """log M(f) for f in Z[x, y], given as {(i, j): c} for c x^i y^j.

    Returns the logarithmic measure int int log|f(e(s), e(t))| ds dt.
    """
    groups = _y_coefficients(f)
    breaks = [0.0] + _kinks(groups) + [1.0]
    total = 0.0
    err = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b - a <= 0:
            continue
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", integrate.IntegrationWarning)
            v, e = integrate.quad(lambda s: _inner(groups, s), a, b, epsabs=tol / 10, epsrel=0, limit=400)
        if caught:
            # roundoff near a zero of f on the torus: do not trust the estimate
            e = max(100 * e, 1e-10)
        total += v
        err += e
    rad = max(10 * err, tol)
    with working_precision(default_precision()):
        mid = arb(fmpq(Fraction(total).numerator, Fraction(total).denominator))
        return CertifiedValue.from_arb(arb(mid, rad), rigorous=False)


def l2_chi3_series(pairs: int) -> arb:
    """Ball for L(2, chi_3) = sum_m 1/(3m+1)^2 - 1/(3m+2)^2 using ``pairs`` pairs.

    The tail term t(m) is positive, decreasing and convex, so the remainder
    after M pairs lies in [I + t(M)/2, I + t(M)/2 + |t'(M)|/8] with
    I = int_M^inf t (trapezoid error bound for convex functions).
    """
    M = pairs
    s = arb(0)
    for m in range(M):
        a, b = 3 * m + 1, 3 * m + 2
        s += fmpq(b * b - a * a, a * a * b * b)
    a, b = 3 * M + 1, 3 * M + 2
    integral = fmpq(1, 3 * a) - fmpq(1, 3 * b)
    half = fmpq(b * b - a * a, 2 * a * a * b * b)
    deriv = fmpq(6, a**3) - fmpq(6, b**3)
    lo = integral + half
    width = deriv / 8
    tail = arb(lo + width / 2, arb(width / 2).upper())
    return s + tail


def dirichlet_L2_chi3(pairs: int = 4096, prec: int | None = None) -> CertifiedValue:
    """(3 sqrt 3 / (4 pi)) L(2, chi_3) with a certified tail bound."""
    p = default_precision() if prec is None else prec
    with working_precision(p):
        L = l2_chi3_series(pairs)
        return CertifiedValue.from_arb(3 * arb(3).sqrt() / (4 * arb.pi()) * L)
