"""Closed-form L-moments of the generalized lambda distribution.

For r >= 2 the r-th L-moment satisfies

    lambda2 * L_r = Y_r(lambda3) + (-1)**r * Y_r(lambda4),
    Y_r(x) = sum_k c_{r,k} / (k + 1 + x),

where c_{r,k} = (-1)**(r-k-1) C(r-1,k) C(r+k-1,k) are the coefficients of
the shifted Legendre polynomial of degree r-1.  Because the shifted
Legendre polynomials of degree >= 1 integrate to zero over [0, 1], the
rational function Y_r has a root at x = 0; evaluating the exactly deflated
form ``x * Q_r(x) / prod(x + m)`` avoids the catastrophic cancellation the
raw sum suffers for |x| near zero, where the grids used by the shape atlas
concentrate.  L1 is handled separately, location enters only there.

Sample L-moments use the standard unbiased order-statistic estimators
(probability-weighted moments combined with the same Legendre coefficients).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import GldParams, validate
from .errors import DomainError, InsufficientDataError, InvalidParamsError, LMomentsUndefinedError

__all__ = [
    "LegendreCoeffs",
    "LMomentSet",
    "SymmetricSolution",
    "shifted_legendre",
    "gld_lmoments",
    "lmoment_ratios_from_shape",
    "symmetric_tau4",
    "SYMMETRIC_TAU4_MIN",
    "SYMMETRIC_TAU4_ARGMIN",
    "solve_symmetric",
    "axis_case_ratios",
    "sample_lmoments",
    "feasibility_check",
]

#: Exact minimum of the symmetric L-kurtosis curve, attained at sqrt(6) - 1.
SYMMETRIC_TAU4_MIN = (12.0 - 5.0 * math.sqrt(6.0)) / (12.0 + 5.0 * math.sqrt(6.0))
SYMMETRIC_TAU4_ARGMIN = math.sqrt(6.0) - 1.0

# Guard width around the poles x = -(k+1); only x = -1 is reachable for
# shapes above the existence bound, the deeper poles are out of range.
_POLE_GUARD = 1e-12

# Orders above this use exact rational arithmetic in the scalar path: the
# alternating Legendre coefficients grow like 4**r and amplify float
# round-off in the raw sums.
_EXACT_ORDER_THRESHOLD = 12


@dataclass(frozen=True)
class LegendreCoeffs:
    """Shifted Legendre polynomial P*_n on [0, 1], exact integer coefficients.

    ``coeffs[k]`` multiplies u**k.  Satisfies P*_n(1) = 1 and the reflection
    identity P*_n(1 - u) = (-1)**n P*_n(u).
    """

    order: int
    coeffs: tuple[int, ...]

    def __call__(self, u):
        out = np.zeros_like(np.asarray(u, dtype=float))
        for c in reversed(self.coeffs):
            out = out * u + c
        return float(out) if np.isscalar(u) else out


@functools.lru_cache(maxsize=None)
def shifted_legendre(order: int) -> LegendreCoeffs:
    """Shifted Legendre polynomial of the given degree (exact integers)."""
    if order < 0:
        raise DomainError("polynomial order must be >= 0")
    r = order + 1
    coeffs = tuple(
        (-1) ** (r - k - 1) * math.comb(r - 1, k) * math.comb(r + k - 1, k) for k in range(r)
    )
    return LegendreCoeffs(order, coeffs)


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@functools.lru_cache(maxsize=None)
def _deflated_numerator(r: int) -> tuple[int, ...]:
    """Integer coefficients of Q_r with sum_k c_k / (k+1+x) = x*Q_r(x)/prod(x+m).

    The constant term of the undeflated numerator vanishes exactly because
    P*_{r-1} integrates to zero for r >= 2; the assert keeps that honest.
    """
    cs = shifted_legendre(r - 1).coeffs
    acc = [0] * r
    for k, c in enumerate(cs):
        prod = [1]
        for j in range(r):
            if j != k:
                prod = _poly_mul(prod, [j + 1, 1])
        for i, v in enumerate(prod):
            acc[i] += c * v
    assert acc[0] == 0
    return tuple(acc[1:])


def _partial_sum(r: int, x):
    """Y_r(x) for r >= 2 via the deflated rational form (scalar or array)."""
    if isinstance(x, (float, int)):
        q = 0.0
        for c in reversed(_deflated_numerator(r)):
            q = q * x + c
        d = 1.0
        for m in range(1, r + 1):
            d *= x + m
        return x * q / d
    q = np.zeros_like(np.asarray(x, dtype=float))
    for c in reversed(_deflated_numerator(r)):
        q = q * x + c
    d = np.ones_like(q)
    for m in range(1, r + 1):
        d = d * (x + m)
    return x * q / d


def _partial_sum_exact(r: int, x: float) -> float:
    xf = Fraction(x)
    cs = shifted_legendre(r - 1).coeffs
    return float(sum(Fraction(c) / (k + 1 + xf) for k, c in enumerate(cs)))


def _check_shape_domain(l3: float, l4: float, max_order: int) -> None:
    if l3 <= -1.0 or l4 <= -1.0:
        raise LMomentsUndefinedError("L-moments exist only for shape exponents > -1")
    for x in (l3, l4):
        for k in range(max_order):
            if abs(k + 1 + x) < _POLE_GUARD:
                raise LMomentsUndefinedError(f"shape exponent {x} is numerically at a pole")


def _scaled_lmoment(r: int, l3: float, l4: float) -> float:
    """lambda2 * L_r for r >= 2."""
    if r <= _EXACT_ORDER_THRESHOLD:
        y3 = float(_partial_sum(r, l3))
        y4 = float(_partial_sum(r, l4))
    else:
        y3 = _partial_sum_exact(r, l3)
        y4 = _partial_sum_exact(r, l4)
    return y3 + (-1) ** r * y4


@dataclass(frozen=True)
class LMomentSet:
    """First two L-moments plus the ratio sequence tau_3 .. tau_R."""

    l1: float
    l2: float
    tau: tuple[float, ...]

    @property
    def max_order(self) -> int:
        return len(self.tau) + 2

    def ratio(self, r: int) -> float:
        if r < 3 or r > self.max_order:
            raise DomainError(f"ratio order {r} outside 3..{self.max_order}")
        return self.tau[r - 3]

    @property
    def tau3(self) -> float:
        return self.tau[0]

    @property
    def tau4(self) -> float:
        return self.tau[1]


def gld_lmoments(p: GldParams, max_order: int = 6) -> LMomentSet:
    """Theoretical L-moments of a valid distribution up to ``max_order``."""
    if max_order < 2:
        raise DomainError("max_order must be at least 2")
    if not validate(p):
        raise InvalidParamsError(f"parameters {p.as_tuple()} do not define a distribution")
    _check_shape_domain(p.lambda3, p.lambda4, max_order)
    l1 = p.lambda1 + (1.0 / (1.0 + p.lambda3) - 1.0 / (1.0 + p.lambda4)) / p.lambda2
    scaled = [_scaled_lmoment(r, p.lambda3, p.lambda4) for r in range(2, max_order + 1)]
    l2 = scaled[0] / p.lambda2
    tau = tuple(s / scaled[0] for s in scaled[1:])
    return LMomentSet(l1, l2, tau)


def lmoment_ratios_from_shape(l3, l4) -> tuple[np.ndarray, np.ndarray]:
    """(tau3, tau4) from shape exponents alone; location and scale cancel.

    Vectorized over arrays; intended for grid scans.  No validity or
    existence checks are applied here, callers mask separately.
    """
    l3 = np.asarray(l3, dtype=float)
    l4 = np.asarray(l4, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s2 = _partial_sum(2, l3) + _partial_sum(2, l4)
        t3 = (_partial_sum(3, l3) - _partial_sum(3, l4)) / s2
        t4 = (_partial_sum(4, l3) + _partial_sum(4, l4)) / s2
    return t3, t4


def symmetric_tau4(lam: float) -> float:
    """L-kurtosis of the symmetric family lambda3 = lambda4 = lam."""
    if lam <= -1.0:
        raise DomainError("symmetric shape exponent must be > -1")
    return (lam * lam - 3.0 * lam + 2.0) / (lam * lam + 7.0 * lam + 12.0)


@dataclass(frozen=True)
class SymmetricSolution:
    """Roots of the symmetric L-kurtosis equation for a given tau4."""

    tau4: float
    roots: tuple[float, ...]


def solve_symmetric(tau4: float) -> SymmetricSolution:
    """Invert the symmetric L-kurtosis curve.

    Returns both quadratic roots above -1: none below the attainable
    minimum, a double root exactly at it, two region-3 roots for values up
    to 1/6 and one region-3 plus one region-4 root beyond.
    """
    if tau4 >= 1.0:
        raise DomainError("tau4 must be < 1")
    disc = 1.0 + 98.0 * tau4 + tau4 * tau4
    if disc < 0.0:
        return SymmetricSolution(tau4, ())
    sq = math.sqrt(disc)
    denom = 2.0 * (1.0 - tau4)
    lo = (3.0 + 7.0 * tau4 - sq) / denom
    hi = (3.0 + 7.0 * tau4 + sq) / denom
    roots = [lam for lam in (lo, hi) if lam > -1.0]
    # root separation scales like sqrt(tau4 - minimum): at float resolution of
    # the minimum the two roots sit ~1e-8 apart and are one double root
    if len(roots) == 2 and abs(roots[1] - roots[0]) < 1e-7 * max(1.0, abs(roots[1])):
        roots = [0.5 * (roots[0] + roots[1])]
    return SymmetricSolution(tau4, tuple(roots))


def axis_case_ratios(lam: float, which_axis: str) -> tuple[float, float]:
    """(tau3, tau4) for a member with one shape exponent exactly zero.

    ``which_axis`` is ``"lambda3_zero"`` (lam is lambda4) or
    ``"lambda4_zero"`` (lam is lambda3).  The L-kurtosis coincides with the
    symmetric curve in both cases; only the skewness sign flips.
    """
    if lam <= -1.0:
        raise DomainError("shape exponent must be > -1")
    if which_axis == "lambda3_zero":
        tau3 = (1.0 - lam) / (lam + 3.0)
    elif which_axis == "lambda4_zero":
        tau3 = (lam - 1.0) / (lam + 3.0)
    else:
        raise DomainError(f"unknown axis case {which_axis!r}")
    return tau3, symmetric_tau4(lam)


def sample_lmoments(data: Sequence[float], max_order: int = 4) -> LMomentSet:
    """Unbiased sample L-moments from the sorted data.

    Uses probability-weighted moments b_k with exact binomial-ratio weights,
    combined through the shifted Legendre coefficients.
    """
    if max_order < 2:
        raise DomainError("max_order must be at least 2")
    x = np.sort(np.asarray(data, dtype=float))
    n = x.size
    if n < max_order:
        raise InsufficientDataError(f"need at least {max_order} observations, got {n}")
    idx = np.arange(1, n + 1, dtype=float)
    b = [float(x.mean())]
    w = np.ones(n)
    for k in range(1, max_order):
        w = w * (idx - k) / (n - k)
        b.append(float((w * x).mean()))
    ells = []
    for r in range(1, max_order + 1):
        cs = shifted_legendre(r - 1).coeffs
        ells.append(sum(c * b[k] for k, c in enumerate(cs)))
    if ells[1] == 0.0:
        raise InsufficientDataError("sample L-scale is zero (constant data)")
    tau = tuple(e / ells[1] for e in ells[2:])
    return LMomentSet(ells[0], ells[1], tau)


def feasibility_check(tau3: float, tau4: float) -> bool:
    """Universal L-moment ratio bounds: |tau3| < 1 and (5*tau3**2-1)/4 <= tau4 < 1."""
    return -1.0 < tau3 < 1.0 and (5.0 * tau3 * tau3 - 1.0) / 4.0 <= tau4 < 1.0
