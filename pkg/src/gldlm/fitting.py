"""Method-of-L-moments estimation for the generalized lambda distribution.

The shape pair is found by minimizing the squared distance between the
target L-skewness/L-kurtosis and the model's

    (tau3_hat - tau3(l3, l4))**2 + (tau4_hat - tau4(l3, l4))**2

with the Nelder-Mead simplex method, started from the symmetric-curve roots
for the target L-kurtosis.  Location and scale then follow in closed form
from the first two L-moments.  Goodness of fit is reported as the
Kolmogorov-Smirnov sup-distance between data and the fitted model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import GldParams, Region, cdf, classify_region, shape_pair_valid, validate
from .errors import (
    DegenerateScaleError,
    InfeasibleTargetError,
    InvalidParamsError,
    NoFeasibleStartError,
)
from .lmoments import (
    LMomentSet,
    _partial_sum,
    feasibility_check,
    sample_lmoments,
    solve_symmetric,
)

__all__ = [
    "FitTarget",
    "FitResult",
    "NelderMeadConfig",
    "objective",
    "nelder_mead",
    "recover_location_scale",
    "fit",
    "fit_to_target",
    "ks_statistic",
]

_PENALTY = 1e10
_POLE_GUARD = 1e-12

#: Objective value below which a fit counts as having matched its target
#: (squared tau distance 1e-8, i.e. both ratios within about 1e-4).
CONVERGENCE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class FitTarget:
    """Sample (or theoretical) L-moments a fit should reproduce."""

    l1_hat: float
    l2_hat: float
    tau3_hat: float
    tau4_hat: float


@dataclass(frozen=True)
class NelderMeadConfig:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    tol: float = 1e-10  # on the simplex value spread
    max_iter: int = 2000


@dataclass(frozen=True)
class FitResult:
    params: GldParams
    region: Region
    objective: float
    iterations: int
    converged: bool
    ks_statistic: float | None
    start_point: tuple[float, float]


def objective(target: FitTarget, lambda3: float, lambda4: float) -> float:
    """Squared ratio distance; invalid proposals get a graded penalty.

    The penalty keeps the simplex total: outside the existence domain it
    grows with the violation, and for invalid mixed-sign pairs it grows with
    the distance to the nearest axis, which is the closest valid boundary.
    """
    if not (math.isfinite(lambda3) and math.isfinite(lambda4)):
        return _PENALTY
    if lambda3 <= -1.0 + _POLE_GUARD or lambda4 <= -1.0 + _POLE_GUARD:
        return _PENALTY + max(0.0, -1.0 - lambda3) + max(0.0, -1.0 - lambda4)
    if not shape_pair_valid(lambda3, lambda4):
        return _PENALTY + min(abs(lambda3), abs(lambda4))
    s2 = float(_partial_sum(2, lambda3) + _partial_sum(2, lambda4))
    if s2 == 0.0:
        return _PENALTY
    t3 = float(_partial_sum(3, lambda3) - _partial_sum(3, lambda4)) / s2
    t4 = float(_partial_sum(4, lambda3) + _partial_sum(4, lambda4)) / s2
    d3 = target.tau3_hat - t3
    d4 = target.tau4_hat - t4
    return d3 * d3 + d4 * d4


def nelder_mead(
    f: Callable[[float, float], float],
    start: tuple[float, float],
    config: NelderMeadConfig | None = None,
) -> tuple[np.ndarray, float, int, bool]:
    """Two-dimensional Nelder-Mead simplex minimization.

    Returns (best point, best value, iterations, converged); converged means
    the max pairwise value spread of the simplex fell below ``config.tol``
    before the iteration cap.
    """
    cfg = config or NelderMeadConfig()
    x0 = np.asarray(start, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise InvalidParamsError("start point must be finite")
    edge = 0.1 * np.maximum(1.0, np.abs(x0))
    simplex = [x0.copy(), x0 + np.array([edge[0], 0.0]), x0 + np.array([0.0, edge[1]])]
    values = [f(*v) for v in simplex]
    iterations = 0
    converged = False
    while iterations < cfg.max_iter:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[k] for k in order]
        values = [values[k] for k in order]
        if values[-1] - values[0] < cfg.tol:
            converged = True
            break
        centroid = 0.5 * (simplex[0] + simplex[1])
        reflected = centroid + cfg.reflection * (centroid - simplex[2])
        f_r = f(*reflected)
        if values[0] <= f_r < values[1]:
            simplex[2], values[2] = reflected, f_r
        elif f_r < values[0]:
            expanded = centroid + cfg.expansion * (reflected - centroid)
            f_e = f(*expanded)
            if f_e < f_r:
                simplex[2], values[2] = expanded, f_e
            else:
                simplex[2], values[2] = reflected, f_r
        else:
            contracted = centroid + cfg.contraction * (simplex[2] - centroid)
            f_c = f(*contracted)
            if f_c < values[2]:
                simplex[2], values[2] = contracted, f_c
            else:
                for k in (1, 2):
                    simplex[k] = simplex[0] + cfg.shrink * (simplex[k] - simplex[0])
                    values[k] = f(*simplex[k])
        iterations += 1
    best = int(np.argmin(values))
    return simplex[best], values[best], iterations, converged


def recover_location_scale(target: FitTarget, lambda3: float, lambda4: float) -> tuple[float, float]:
    """Solve lambda1 and lambda2 from the first two target L-moments."""
    if lambda3 <= -1.0 or lambda4 <= -1.0:
        raise InvalidParamsError("shape exponents must be > -1")
    y3 = float(_partial_sum(2, lambda3))
    y4 = float(_partial_sum(2, lambda4))
    bracket = y3 + y4
    # total cancellation of the two parts: the recovered scale would be
    # pure round-off (only possible for invalid mixed-sign shape pairs)
    if abs(bracket) <= 1e-13 * max(abs(y3), abs(y4), 1e-300):
        raise DegenerateScaleError("scale bracket vanished for this shape pair")
    lam2 = bracket / target.l2_hat
    lam1 = target.l1_hat + (1.0 / (1.0 + lambda4) - 1.0 / (1.0 + lambda3)) / lam2
    return lam1, lam2


def fit_to_target(
    target: FitTarget,
    starts: Sequence[tuple[float, float]] = (),
    config: NelderMeadConfig | None = None,
    data: Sequence[float] | None = None,
    compute_ks: bool = True,
) -> list[FitResult]:
    """Multi-start shape search for a target, completed with location/scale.

    Starts are the symmetric-curve roots for the target L-kurtosis plus any
    caller-supplied points.  Results are sorted by objective value, ties
    broken toward the smaller |lambda3| + |lambda4|.
    """
    if target.l2_hat <= 0.0:
        raise InfeasibleTargetError("target L-scale must be positive")
    if not feasibility_check(target.tau3_hat, target.tau4_hat):
        raise InfeasibleTargetError(
            f"target ratios ({target.tau3_hat}, {target.tau4_hat}) violate the bounds"
        )
    all_starts = [(float(r), float(r)) for r in solve_symmetric(target.tau4_hat).roots]
    all_starts.extend((float(a), float(b)) for a, b in starts)
    if not all_starts:
        raise NoFeasibleStartError(
            "no symmetric start exists for this L-kurtosis and no user start was given"
        )

    results = []
    for start in all_starts:
        point, value, iterations, nm_ok = nelder_mead(
            lambda a, b: objective(target, a, b), start, config
        )
        l3, l4 = float(point[0]), float(point[1])
        lam1, lam2 = recover_location_scale(target, l3, l4)
        params = GldParams(lam1, lam2, l3, l4)
        tag = classify_region(params)
        ks = None
        if compute_ks and data is not None and validate(params):
            ks = ks_statistic(data, params)
        results.append(
            FitResult(
                params=params,
                region=tag.region,
                objective=value,
                iterations=iterations,
                converged=nm_ok and value < CONVERGENCE_THRESHOLD,
                ks_statistic=ks,
                start_point=start,
            )
        )
    results.sort(
        key=lambda r: (
            r.objective,
            abs(r.params.lambda3) + abs(r.params.lambda4),
        )
    )
    return results


def fit(
    data: Sequence[float],
    starts: Sequence[tuple[float, float]] = (),
    config: NelderMeadConfig | None = None,
    compute_ks: bool = True,
) -> list[FitResult]:
    """Estimate parameters from data by the method of L-moments."""
    target = fit_target_from_data(data)
    return fit_to_target(target, starts, config, data=data, compute_ks=compute_ks)


def fit_target_from_data(data: Sequence[float]) -> FitTarget:
    moments: LMomentSet = sample_lmoments(data, 4)
    return FitTarget(moments.l1, moments.l2, moments.tau3, moments.tau4)


def ks_statistic(data: Sequence[float], p: GldParams) -> float:
    """Kolmogorov-Smirnov sup-distance between data and the model cdf."""
    if not validate(p):
        raise InvalidParamsError(f"parameters {p.as_tuple()} do not define a distribution")
    x = np.sort(np.asarray(data, dtype=float))
    if x.size == 0:
        raise InfeasibleTargetError("need at least one observation")
    n = x.size
    u = np.atleast_1d(cdf(p, x))
    i = np.arange(1, n + 1)
    return float(max((i / n - u).max(), (u - (i - 1) / n).max()))
