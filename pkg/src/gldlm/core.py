"""Generalized lambda distribution: parameters, validity, evaluation, sampling.

The distribution is defined through its quantile function

    Q(u) = lambda1 + (u**lambda3 - (1 - u)**lambda4) / lambda2,   0 <= u <= 1.

A parameter vector defines a distribution only when the quantile density
q(u) = dQ/du is nonnegative on all of [0, 1], equivalently when lambda2 and
the numerator ``lambda3 * u**(lambda3-1) + lambda4 * (1-u)**(lambda4-1)``
never take strictly opposite signs.  Neither the cdf nor the pdf exists in
closed form; both are obtained numerically from the monotone quantile.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InvalidParamsError, NoConvergenceError

__all__ = [
    "GldParams",
    "Region",
    "RegionTag",
    "quantile",
    "quantile_density",
    "validate",
    "classify_region",
    "cdf",
    "pdf",
    "sample",
    "support",
]


@dataclass(frozen=True)
class GldParams:
    """The four parameters of the quantile function; immutable value object."""

    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lambda1, self.lambda2, self.lambda3, self.lambda4)


class Region(str, Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    R5 = "R5"
    R6 = "R6"
    INVALID = "INVALID"


@dataclass(frozen=True)
class RegionTag:
    region: Region
    lmoments_exist: bool


# Chebyshev-spaced interior validity grid: dense near both endpoints, where
# sign changes of the quantile-density numerator concentrate.
_VALIDITY_POINTS = 4097


def _cheb_interior(n: int = _VALIDITY_POINTS) -> np.ndarray:
    i = np.arange(1, n - 1)
    return 0.5 * (1.0 - np.cos(np.pi * i / (n - 1)))


_UGRID = _cheb_interior()
_UGRID.setflags(write=False)
_UGRID_COARSE = _cheb_interior(129)
_UGRID_COARSE.setflags(write=False)


def _numerator_limit_start(l3: float, l4: float) -> float:
    """Limit of the quantile-density numerator as u -> 0+."""
    if l3 == 0.0:
        return l4  # first term vanishes identically
    if l3 < 0.0:
        return -math.inf
    if l3 < 1.0:
        return math.inf
    if l3 == 1.0:
        return 1.0 + l4
    return l4


def _numerator_limit_end(l3: float, l4: float) -> float:
    """Limit of the quantile-density numerator as u -> 1-."""
    if l4 == 0.0:
        return l3
    if l4 < 0.0:
        return -math.inf
    if l4 < 1.0:
        return math.inf
    if l4 == 1.0:
        return 1.0 + l3
    return l3


@functools.lru_cache(maxsize=8192)
def shape_pair_valid(l3: float, l4: float) -> bool:
    """True when some sign of lambda2 makes (l3, l4) a valid distribution.

    Same-sign exponents are decided analytically; mixed signs fall back to a
    sign scan of the numerator over the Chebyshev grid plus endpoint limits.
    The scan is the arbiter for mixed signs; the closed-form region-boundary
    inequalities are intentionally out of scope.
    """
    if not (math.isfinite(l3) and math.isfinite(l4)):
        return False
    if l3 == 0.0 and l4 == 0.0:
        return False  # numerator identically zero: degenerate point mass
    if l3 >= 0.0 and l4 >= 0.0:
        return True
    if l3 <= 0.0 and l4 <= 0.0:
        return True
    lim0 = _numerator_limit_start(l3, l4)
    lim1 = _numerator_limit_end(l3, l4)
    lo = min(lim0, lim1)
    hi = max(lim0, lim1)
    if lo < 0.0 < hi:
        return False
    for grid in (_UGRID_COARSE, _UGRID):
        n = l3 * np.power(grid, l3 - 1.0) + l4 * np.power(1.0 - grid, l4 - 1.0)
        lo = min(lo, float(n.min()))
        hi = max(hi, float(n.max()))
        if lo < 0.0 < hi:
            return False
    return True


def shape_valid_mask(l3: np.ndarray, l4: np.ndarray) -> np.ndarray:
    """Vectorized ``shape_pair_valid`` over flat arrays of shape pairs.

    Same-sign pairs are decided analytically.  Mixed-sign pairs go through a
    staged numerator scan (endpoint limits, coarse grid, full grid) so that
    large atlases only pay the full 4K-point scan for near-boundary nodes.
    """
    l3 = np.asarray(l3, dtype=float)
    l4 = np.asarray(l4, dtype=float)
    ok = np.isfinite(l3) & np.isfinite(l4) & ~((l3 == 0.0) & (l4 == 0.0))
    mixed = ((l3 > 0.0) & (l4 < 0.0)) | ((l3 < 0.0) & (l4 > 0.0))
    undecided = ok & mixed
    if not undecided.any():
        return ok

    # mixed-sign pairs need lambda2 < 0, so any positive numerator limit or
    # sample kills validity
    a = np.where(undecided, l3, -0.5)
    b = np.where(undecided, l4, -0.5)
    neg, pos = np.minimum(a, b), np.maximum(a, b)
    # limit at the endpoint owned by the positive exponent: +inf for
    # exponent < 1, (1 + neg) at exactly 1, finite negative beyond
    bad = (pos < 1.0) | ((pos == 1.0) & (neg > -1.0))
    ok &= ~(undecided & bad)
    undecided &= ~bad

    for grid in (_UGRID_COARSE, _UGRID):
        if not undecided.any():
            break
        idx = np.flatnonzero(undecided)
        for chunk in np.array_split(idx, max(1, idx.size * grid.size // 4_000_000 + 1)):
            if chunk.size == 0:
                continue
            a = l3[chunk, None]
            b = l4[chunk, None]
            n = a * np.power(grid[None, :], a - 1.0) + b * np.power(1.0 - grid[None, :], b - 1.0)
            bad_chunk = (n > 0.0).any(axis=1)
            ok[chunk[bad_chunk]] = False
            undecided[chunk[bad_chunk]] = False
    return ok


def _required_lambda2_sign(l3: float, l4: float) -> int:
    """Sign lambda2 must carry for a valid pair (0 when either sign fails)."""
    if not shape_pair_valid(l3, l4):
        return 0
    if l3 >= 0.0 and l4 >= 0.0:
        return 1
    if l3 <= 0.0 and l4 <= 0.0:
        return -1
    # mixed signs passed the scan; orientation follows the endpoint limits
    lim0 = _numerator_limit_start(l3, l4)
    lim1 = _numerator_limit_end(l3, l4)
    return -1 if min(lim0, lim1) < 0 else 1


def validate(p: GldParams) -> bool:
    """Check the quantile-density sign condition over all of [0, 1]."""
    if p.lambda2 == 0.0 or not math.isfinite(p.lambda2):
        return False
    s = _required_lambda2_sign(p.lambda3, p.lambda4)
    if s == 0:
        return False
    return (p.lambda2 > 0) if s > 0 else (p.lambda2 < 0)


def classify_region(p: GldParams) -> RegionTag:
    """Assign the parameter vector to one of the six shape regions.

    Regions 1 and 2 (a shape exponent at or below -1) are recognized but
    carry no L-moments.  Axis members (one exponent exactly zero, the other
    positive) count as region 3 boundary cases.
    """
    if not validate(p):
        return RegionTag(Region.INVALID, False)
    l3, l4 = p.lambda3, p.lambda4
    exists = l3 > -1.0 and l4 > -1.0
    if l3 < 0.0 and l4 < 0.0:
        return RegionTag(Region.R4, exists)
    if l3 <= -1.0:
        return RegionTag(Region.R1, False)
    if l4 <= -1.0:
        return RegionTag(Region.R2, False)
    if l3 >= 0.0 and l4 >= 0.0:
        return RegionTag(Region.R3, exists)
    if l3 < 0.0:
        return RegionTag(Region.R5, exists)
    return RegionTag(Region.R6, exists)


def _pow_with_limits(base, expo: float):
    """base**expo for base in [0, 1], with 0**e resolved as a limit."""
    base = np.asarray(base, dtype=float)
    if expo == 0.0:
        return np.ones_like(base)
    with np.errstate(divide="ignore"):
        out = np.power(base, expo)
    if expo < 0.0:
        out = np.where(base == 0.0, np.inf, out)
    return out


def quantile(p: GldParams, u):
    """Quantile function Q(u); accepts scalars or arrays in [0, 1].

    At u = 0 or u = 1 a negative shape exponent yields a signed infinity
    (the support is unbounded on that side).
    """
    if not validate(p):
        raise InvalidParamsError(f"parameters {p.as_tuple()} do not define a distribution")
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("quantile level must lie in [0, 1]")
    vals = p.lambda1 + (_pow_with_limits(arr, p.lambda3) - _pow_with_limits(1.0 - arr, p.lambda4)) / p.lambda2
    return float(vals) if np.isscalar(u) or arr.ndim == 0 else vals


def _density_numerator(l3: float, l4: float, u: np.ndarray) -> np.ndarray:
    t1 = l3 * _pow_with_limits(u, l3 - 1.0) if l3 != 0.0 else np.zeros_like(u)
    t2 = l4 * _pow_with_limits(1.0 - u, l4 - 1.0) if l4 != 0.0 else np.zeros_like(u)
    return t1 + t2


def quantile_density(p: GldParams, u):
    """Derivative dQ/du; nonnegative on (0, 1) for valid parameters."""
    if not validate(p):
        raise InvalidParamsError(f"parameters {p.as_tuple()} do not define a distribution")
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("quantile level must lie in [0, 1]")
    if np.any((arr == 0.0) & (0.0 != p.lambda3) & (p.lambda3 < 1.0)) or np.any(
        (arr == 1.0) & (0.0 != p.lambda4) & (p.lambda4 < 1.0)
    ):
        raise DomainError("quantile density is infinite at this endpoint")
    vals = _density_numerator(p.lambda3, p.lambda4, arr) / p.lambda2
    return float(vals) if np.isscalar(u) or arr.ndim == 0 else vals


def support(p: GldParams) -> tuple[float, float]:
    """Support endpoints, possibly infinite."""
    return quantile(p, 0.0), quantile(p, 1.0)


_CDF_TOL = 1e-12
_CDF_MAX_ITER = 200


def cdf(p: GldParams, x):
    """Numerical inverse of the quantile: u with Q(u) = x, clamped outside support."""
    if not validate(p):
        raise InvalidParamsError(f"parameters {p.as_tuple()} do not define a distribution")
    arr = np.asarray(x, dtype=float)
    scalar = np.isscalar(x) or arr.ndim == 0
    flat = np.atleast_1d(arr).astype(float)

    lo = np.zeros_like(flat)
    hi = np.ones_like(flat)
    iterations = 0
    # bisection: the quantile is monotone, so [lo, hi] always brackets
    while iterations < _CDF_MAX_ITER and float((hi - lo).max()) > _CDF_TOL:
        mid = 0.5 * (lo + hi)
        qm = quantile(p, mid)
        below = qm < flat
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        iterations += 1
    if float((hi - lo).max()) > _CDF_TOL:
        raise NoConvergenceError("cdf inversion did not reach tolerance")
    u = 0.5 * (lo + hi)

    # Newton polish where the density is finite and nonzero
    for _ in range(3):
        interior = (u > 0.0) & (u < 1.0)
        dq = _density_numerator(p.lambda3, p.lambda4, np.clip(u, 1e-300, 1.0 - 1e-16)) / p.lambda2
        ok = interior & np.isfinite(dq) & (dq > 0.0)
        step = np.zeros_like(u)
        qu = quantile(p, np.clip(u, 0.0, 1.0))
        step[ok] = (qu[ok] - flat[ok]) / dq[ok]
        u = np.clip(u - step, lo, hi)

    # clamp outside the support
    left, right = support(p)
    u = np.where(flat <= left, 0.0, u)
    u = np.where(flat >= right, 1.0, u)
    return float(u[0]) if scalar else u.reshape(arr.shape)


def pdf(p: GldParams, x):
    """Density f(x) = 1 / q(F(x)); zero outside the support."""
    if not validate(p):
        raise InvalidParamsError(f"parameters {p.as_tuple()} do not define a distribution")
    arr = np.asarray(x, dtype=float)
    scalar = np.isscalar(x) or arr.ndim == 0
    flat = np.atleast_1d(arr).astype(float)
    u = np.atleast_1d(cdf(p, flat))
    num = _density_numerator(p.lambda3, p.lambda4, np.clip(u, 0.0, 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = p.lambda2 / num
    dens = np.where(np.isfinite(dens) & (dens >= 0.0), dens, 0.0)
    left, right = support(p)
    dens = np.where((flat < left) | (flat > right), 0.0, dens)
    return float(dens[0]) if scalar else dens.reshape(arr.shape)


def sample(p: GldParams, n: int, seed: int) -> np.ndarray:
    """Inverse-transform sample of size n; deterministic for a given seed."""
    if not validate(p):
        raise InvalidParamsError(f"parameters {p.as_tuple()} do not define a distribution")
    if n < 1:
        raise DomainError("sample size must be at least 1")
    rng = np.random.default_rng(seed)
    return quantile(p, rng.random(n))
