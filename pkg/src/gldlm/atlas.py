"""Shape-space atlas: images of (lambda3, lambda4) grids in (tau3, tau4).

Per region the pipeline is: build a lambda grid, map every valid node to its
(tau3, tau4) image, flag potential boundary points (a node whose image falls
outside the quadrilateral of its four neighbors' images, plus all grid-edge
images), assemble an enclosing polygon, and verify that every image lies
inside or on it.  Contours of tau3 or tau4 over a grid come from marching
squares with per-vertex bisection refinement, so every emitted vertex
re-evaluates to its level.  A census enumerates all shape pairs that share
one (tau3, tau4) target by polishing grid-scan seeds with the simplex
optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import GldParams, Region, classify_region, shape_valid_mask
from .errors import (
    AssemblyError,
    DomainError,
    EmptyContourError,
    InfeasibleTargetError,
    UnknownRegionError,
)
from .fitting import FitTarget, NelderMeadConfig, nelder_mead, objective, recover_location_scale
from .lmoments import feasibility_check, gld_lmoments, lmoment_ratios_from_shape, solve_symmetric

__all__ = [
    "LambdaGrid",
    "TauGrid",
    "BoundaryPolygon",
    "ContourSet",
    "CensusSolution",
    "build_grid",
    "map_grid",
    "potential_boundary_points",
    "assemble_boundary",
    "contours",
    "solution_census",
    "points_in_polygon",
]

_ATLAS_REGIONS = (Region.R3, Region.R4, Region.R5, Region.R6)

# desk-scale defaults; the published scans used 10**6 .. 4*10**6 nodes, the
# procedure is resolution-independent and callers can turn this up
_DEFAULT_RESOLUTION = 512
_GEOM_MIN = 1e-6
_GEOM_MAX = 1e4
_EDGE_EPS = 1e-10
_CONTAINMENT_TOL = 1e-9


def _as_region(region) -> Region:
    if isinstance(region, Region):
        return region
    if isinstance(region, int):
        name = f"R{region}"
        if hasattr(Region, name):
            return Region[name]
        raise UnknownRegionError(f"no region {region}")
    try:
        return Region(str(region).upper())
    except ValueError as exc:
        raise UnknownRegionError(f"no region {region!r}") from exc


@dataclass(frozen=True, eq=False)
class LambdaGrid:
    """Axes of a rectangular scan over shape exponents for one region."""

    region: Region
    lambda3_axis: np.ndarray
    lambda4_axis: np.ndarray
    spacing: str  # "equal" or "log_like"

    @property
    def shape(self) -> tuple[int, int]:
        return self.lambda3_axis.size, self.lambda4_axis.size


@dataclass(frozen=True, eq=False)
class TauGrid:
    """Images of the grid nodes; mask marks nodes that define a distribution."""

    region: Region
    lambda3_axis: np.ndarray
    lambda4_axis: np.ndarray
    tau3: np.ndarray
    tau4: np.ndarray
    mask: np.ndarray

    @property
    def points(self) -> np.ndarray:
        """(n, 2) array of all unmasked (tau3, tau4) images."""
        return np.column_stack([self.tau3[self.mask], self.tau4[self.mask]])


@dataclass(frozen=True, eq=False)
class BoundaryPolygon:
    region: Region
    vertices: np.ndarray  # (n, 2), closed: first row equals last row


@dataclass(frozen=True, eq=False)
class ContourSet:
    statistic: str  # "tau3" or "tau4"
    levels: tuple[float, ...]
    polylines: dict = field(default_factory=dict)  # level -> list of (n, 2) lambda-space arrays


def build_grid(region, resolution: int | tuple[int, int] = _DEFAULT_RESOLUTION, limits=None) -> LambdaGrid:
    """Construct the default scan grid for one of regions 3-6.

    Region 4 is covered with equal spacing just inside (-1, 0)**2; region 3
    uses geometric spacing, dense near the origin; regions 5 and 6 mix an
    equally spaced negative axis with a geometrically spaced positive one.
    ``limits`` overrides the per-axis ranges as ((lo3, hi3), (lo4, hi4)).
    """
    region = _as_region(region)
    if region not in _ATLAS_REGIONS:
        raise UnknownRegionError(f"atlas covers regions 3-6, not {region.value}")
    n3, n4 = (resolution, resolution) if isinstance(resolution, int) else resolution
    if n3 < 16 or n4 < 16:
        raise DomainError("resolution must be at least 16 per axis")

    def equal_axis(n, lo=-1.0 + _EDGE_EPS, hi=-_EDGE_EPS):
        return np.linspace(lo, hi, n)

    def geom_axis(n, lo=_GEOM_MIN, hi=_GEOM_MAX):
        return np.geomspace(lo, hi, n)

    def offset_axis(n, lo=-1.0 + 1e-2, hi=1e3):
        # unequally spaced, starting just above -1: geometric offsets from -1
        return -1.0 + np.geomspace(lo + 1.0, hi + 1.0, n)

    lim3 = lim4 = None
    if limits is not None:
        lim3, lim4 = limits
    if region is Region.R3:
        ax3 = geom_axis(n3, *lim3) if lim3 else geom_axis(n3)
        ax4 = geom_axis(n4, *lim4) if lim4 else geom_axis(n4)
        spacing = "log_like"
    elif region is Region.R4:
        ax3 = equal_axis(n3, *lim3) if lim3 else equal_axis(n3)
        ax4 = equal_axis(n4, *lim4) if lim4 else equal_axis(n4)
        spacing = "equal"
    elif region is Region.R5:
        ax3 = equal_axis(n3, *lim3) if lim3 else equal_axis(n3)
        ax4 = offset_axis(n4, *lim4) if lim4 else offset_axis(n4)
        spacing = "log_like"
    else:  # R6: mirror of R5
        ax3 = offset_axis(n3, *lim3) if lim3 else offset_axis(n3)
        ax4 = equal_axis(n4, *lim4) if lim4 else equal_axis(n4)
        spacing = "log_like"
    return LambdaGrid(region, ax3, ax4, spacing)


def _region_membership(region: Region, l3: np.ndarray, l4: np.ndarray) -> np.ndarray:
    if region is Region.R3:
        return (l3 > 0.0) & (l4 > 0.0)
    if region is Region.R4:
        return (l3 < 0.0) & (l4 < 0.0) & (l3 > -1.0) & (l4 > -1.0)
    if region is Region.R5:
        return (l3 < 0.0) & (l3 > -1.0) & (l4 > 0.0)
    return (l4 < 0.0) & (l4 > -1.0) & (l3 > 0.0)


def map_grid(grid: LambdaGrid) -> TauGrid:
    """Apply the closed-form L-moment ratios to every node; mask invalid ones.

    A node survives when it belongs to the grid's region, defines a valid
    distribution, has existing L-moments and a feasible image.
    """
    L3, L4 = np.meshgrid(grid.lambda3_axis, grid.lambda4_axis, indexing="ij")
    flat3, flat4 = L3.ravel(), L4.ravel()
    mask = _region_membership(grid.region, flat3, flat4)
    mask &= shape_valid_mask(flat3, flat4)
    t3 = np.full(flat3.shape, np.nan)
    t4 = np.full(flat3.shape, np.nan)
    if mask.any():
        t3m, t4m = lmoment_ratios_from_shape(flat3[mask], flat4[mask])
        t3[mask] = t3m
        t4[mask] = t4m
    finite = np.isfinite(t3) & np.isfinite(t4)
    mask &= finite
    # universal ratio bounds; guards against degenerate near-pole ratios
    feas = np.zeros_like(mask)
    feas[mask] = (
        (np.abs(t3[mask]) < 1.0)
        & (t4[mask] < 1.0)
        & (t4[mask] >= (5.0 * t3[mask] ** 2 - 1.0) / 4.0)
    )
    mask &= feas
    shape = L3.shape
    return TauGrid(
        grid.region,
        grid.lambda3_axis,
        grid.lambda4_axis,
        t3.reshape(shape),
        t4.reshape(shape),
        mask.reshape(shape),
    )


def points_in_polygon(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Even-odd (crossing number) point-in-polygon test, vectorized over points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    verts = np.asarray(vertices, dtype=float)
    if not np.array_equal(verts[0], verts[-1]):
        verts = np.vstack([verts, verts[0]])
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    for (x0, y0), (x1, y1) in zip(verts[:-1], verts[1:]):
        crosses = (y0 <= y) != (y1 <= y)
        if not crosses.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (x < xi)
    return inside


def _distance_to_polygon(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Distance from each point to the closest polygon edge."""
    pts = np.atleast_2d(points)
    verts = np.asarray(vertices, dtype=float)
    a = verts[:-1]
    d = verts[1:] - a
    dd = (d * d).sum(axis=1)
    dd[dd == 0.0] = 1.0
    best = np.full(len(pts), np.inf)
    for chunk in np.array_split(np.arange(len(pts)), max(1, len(pts) * len(a) // 2_000_000 + 1)):
        if chunk.size == 0:
            continue
        rel = pts[chunk, None, :] - a[None, :, :]
        t = np.clip((rel * d[None, :, :]).sum(axis=2) / dd[None, :], 0.0, 1.0)
        sep = rel - t[:, :, None] * d[None, :, :]
        best[chunk] = np.sqrt((sep * sep).sum(axis=2)).min(axis=1)
    return best


def potential_boundary_points(tgrid: TauGrid) -> np.ndarray:
    """Images that may lie on the attainability boundary.

    An interior node is flagged when its image is not strictly inside the
    quadrilateral spanned by its four grid-neighbors' images.  Grid-edge
    images, and images next to a masked node, are always flagged.
    """
    t3, t4, mask = tgrid.tau3, tgrid.tau4, tgrid.mask
    if t3.shape[0] < 3 or t3.shape[1] < 3:
        raise DomainError("grid must be at least 3x3")
    flagged = np.zeros_like(mask)
    # grid edges
    flagged[0, :] = flagged[-1, :] = True
    flagged[:, 0] = flagged[:, -1] = True

    c3, c4 = t3[1:-1, 1:-1], t4[1:-1, 1:-1]
    w3, w4 = t3[:-2, 1:-1], t4[:-2, 1:-1]
    e3, e4 = t3[2:, 1:-1], t4[2:, 1:-1]
    s3, s4 = t3[1:-1, :-2], t4[1:-1, :-2]
    n3, n4 = t3[1:-1, 2:], t4[1:-1, 2:]
    neighbors_ok = mask[:-2, 1:-1] & mask[2:, 1:-1] & mask[1:-1, :-2] & mask[1:-1, 2:]

    inside = np.zeros_like(c3, dtype=bool)
    quad = [(w3, w4), (n3, n4), (e3, e4), (s3, s4), (w3, w4)]
    for (x0, y0), (x1, y1) in zip(quad[:-1], quad[1:]):
        crosses = (y0 <= c4) != (y1 <= c4)
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = x0 + (c4 - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (c3 < xi) & neighbors_ok
    flagged[1:-1, 1:-1] = ~inside | ~neighbors_ok
    flagged &= mask
    return np.column_stack([t3[flagged], t4[flagged]])


def assemble_boundary(candidates: np.ndarray, tgrid: TauGrid) -> BoundaryPolygon:
    """Close the candidate points into a polygon containing every image.

    Candidates are chained by angle around the image centroid; if that
    star-shaped polygon fails the containment gate the gaps are bridged with
    the convex hull.  Containment of all unmasked images (inside or within
    1e-9 of an edge) is the correctness gate either way.
    """
    cand = np.unique(np.asarray(candidates, dtype=float), axis=0)
    if cand.size == 0:
        raise DomainError("boundary candidates must be nonempty")
    images = tgrid.points

    centroid = images.mean(axis=0)
    angles = np.arctan2(cand[:, 1] - centroid[1], cand[:, 0] - centroid[0])
    order = np.argsort(angles, kind="stable")
    ring = cand[order]
    polygon = np.vstack([ring, ring[:1]])

    if not _containment_ok(images, polygon):
        hull = _convex_hull(cand)
        polygon = np.vstack([hull, hull[:1]])
        if not _containment_ok(images, polygon):
            raise AssemblyError("containment check failed; grid too coarse")
    return BoundaryPolygon(tgrid.region, polygon)


def _containment_ok(points: np.ndarray, polygon: np.ndarray, tol: float = _CONTAINMENT_TOL) -> bool:
    inside = points_in_polygon(points, polygon)
    if inside.all():
        return True
    outside = points[~inside]
    return bool((_distance_to_polygon(outside, polygon) <= tol).all())


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain convex hull, counterclockwise, no repeated endpoint."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[np.ndarray] = []
        for p in seq:
            while len(out) >= 2:
                a, b = out[-1] - out[-2], p - out[-2]
                if a[0] * b[1] - a[1] * b[0] > 0:
                    break
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


# --- marching squares -----------------------------------------------------

_EDGE_LOOKUP = {
    1: [("left", "bottom")],
    2: [("bottom", "right")],
    3: [("left", "right")],
    4: [("top", "right")],
    6: [("bottom", "top")],
    7: [("left", "top")],
    8: [("left", "top")],
    9: [("bottom", "top")],
    11: [("top", "right")],
    12: [("left", "right")],
    13: [("bottom", "right")],
    14: [("left", "bottom")],
}


def _cell_edges(i: int, j: int) -> dict:
    return {
        "bottom": ("x", i, j),
        "top": ("x", i, j + 1),
        "left": ("y", i, j),
        "right": ("y", i + 1, j),
    }


def _marching_squares(values: np.ndarray, mask: np.ndarray, level: float):
    """Segments of the level set as pairs of grid-edge identifiers.

    Values exactly at the level count as above it, which keeps the exact
    zeros along a symmetric diagonal on one consistent side.  Ambiguous
    saddle cells are split by the sign of the cell-center mean.
    """
    w = values - level
    pos = (w > 0.0) | (w == 0.0)
    segments = []
    ni, nj = values.shape
    for i in range(ni - 1):
        for j in range(nj - 1):
            if not (mask[i, j] and mask[i + 1, j] and mask[i, j + 1] and mask[i + 1, j + 1]):
                continue
            code = (
                int(pos[i, j])
                | int(pos[i + 1, j]) << 1
                | int(pos[i + 1, j + 1]) << 2
                | int(pos[i, j + 1]) << 3
            )
            if code in (0, 15):
                continue
            edges = _cell_edges(i, j)
            if code in (5, 10):
                center = 0.25 * (w[i, j] + w[i + 1, j] + w[i, j + 1] + w[i + 1, j + 1])
                if code == 5:  # bottom-left and top-right above level
                    pairs = (
                        [("left", "bottom"), ("top", "right")]
                        if center > 0.0
                        else [("left", "top"), ("bottom", "right")]
                    )
                else:  # bottom-right and top-left above level
                    pairs = (
                        [("bottom", "right"), ("left", "top")]
                        if center > 0.0
                        else [("left", "bottom"), ("top", "right")]
                    )
            else:
                pairs = _EDGE_LOOKUP[code]
            for a, b in pairs:
                segments.append((edges[a], edges[b]))
    return segments


def _chain_segments(segments) -> list[list]:
    """Join edge-to-edge segments into open chains and closed loops."""
    adjacency: dict = {}
    for a, b in segments:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    visited = set()
    chains = []

    def walk(start):
        chain = [start]
        visited.add(start)
        current = start
        while True:
            nxt = [e for e in adjacency[current] if e not in visited]
            if not nxt:
                break
            current = nxt[0]
            visited.add(current)
            chain.append(current)
        return chain

    endpoints = [e for e, nbrs in adjacency.items() if len(nbrs) == 1]
    for e in endpoints:
        if e not in visited:
            chains.append(walk(e))
    for e in adjacency:
        if e not in visited:
            loop = walk(e)
            loop.append(loop[0])
            chains.append(loop)
    return chains


def _refine_vertices(edge_ids, grid: LambdaGrid, values: np.ndarray, statistic: str, level: float, iters: int = 60):
    """Bisect each crossed grid edge in lambda space until the statistic hits the level.

    Every edge starts at node (i, j); "x" edges vary lambda3 toward node
    (i+1, j), "y" edges vary lambda4 toward (i, j+1).  Values exactly at the
    level sit on the nonnegative side, mirroring the marching-squares sign
    convention, so the bisection lands on the same crossing the cell saw.
    """
    ax3, ax4 = grid.lambda3_axis, grid.lambda4_axis
    is_x = np.array([k == "x" for k, _, _ in edge_ids])
    ii = np.array([i for _, i, _ in edge_ids])
    jj = np.array([j for _, _, j in edge_ids])

    lo = np.empty(len(edge_ids))
    hi = np.empty(len(edge_ids))
    fixed = np.empty(len(edge_ids))
    lo[is_x] = ax3[ii[is_x]]
    hi[is_x] = ax3[ii[is_x] + 1]
    fixed[is_x] = ax4[jj[is_x]]
    lo[~is_x] = ax4[jj[~is_x]]
    hi[~is_x] = ax4[jj[~is_x] + 1]
    fixed[~is_x] = ax3[ii[~is_x]]
    sign_lo = values[ii, jj] - level >= 0.0

    def evaluate(pos):
        l3 = np.where(is_x, pos, fixed)
        l4 = np.where(is_x, fixed, pos)
        t3, t4 = lmoment_ratios_from_shape(l3, l4)
        return (t3 if statistic == "tau3" else t4) - level

    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        same = (evaluate(mid) >= 0.0) == sign_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    pos = 0.5 * (lo + hi)
    l3 = np.where(is_x, pos, fixed)
    l4 = np.where(is_x, fixed, pos)
    return np.column_stack([l3, l4])


def contours(grid: LambdaGrid, statistic: str, levels) -> ContourSet:
    """Level curves of tau3 or tau4 over the grid, refined to the level."""
    if statistic not in ("tau3", "tau4"):
        raise DomainError("statistic must be 'tau3' or 'tau4'")
    levels = tuple(float(v) for v in np.atleast_1d(levels))
    tgrid = map_grid(grid)
    values = tgrid.tau3 if statistic == "tau3" else tgrid.tau4
    safe = np.where(tgrid.mask, values, 0.0)
    polylines: dict = {}
    for level in levels:
        segments = _marching_squares(safe, tgrid.mask, level)
        if not segments:
            raise EmptyContourError(f"level {level} is not attained on this grid")
        chains = _chain_segments(segments)
        unique_edges = sorted({e for chain in chains for e in chain})
        refined = _refine_vertices(unique_edges, grid, safe, statistic, level)
        lookup = {e: refined[k] for k, e in enumerate(unique_edges)}
        polylines[level] = [np.array([lookup[e] for e in chain]) for chain in chains]
    return ContourSet(statistic, levels, polylines)


# --- census ----------------------------------------------------------------


@dataclass(frozen=True)
class CensusSolution:
    """One member matching a (tau3, tau4) target, completed with L1=0, L2=1."""

    lambda3: float
    lambda4: float
    region: Region
    objective: float
    lambda1: float
    lambda2: float
    tau5: float
    tau6: float


_CENSUS_NM = NelderMeadConfig(tol=1e-18, max_iter=6000)
_CENSUS_SEED_RESOLUTION = 128
_CENSUS_DEDUP_TOL = 1e-3
_CENSUS_OBJECTIVE_MAX = 1e-16


def _grid_local_minima(obj: np.ndarray, threshold: float) -> list[tuple[int, int]]:
    padded = np.pad(obj, 1, constant_values=np.inf)
    is_min = np.ones_like(obj, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_min &= obj <= padded[1 + di : obj.shape[0] + 1 + di, 1 + dj : obj.shape[1] + 1 + dj]
    is_min &= np.isfinite(obj) & (obj < threshold)
    return [tuple(idx) for idx in np.argwhere(is_min)]


def solution_census(target_tau3: float, target_tau4: float) -> list[CensusSolution]:
    """All shape pairs whose first four L-moment ratios hit the target.

    Seeds come from coarse per-region objective scans plus the symmetric
    solver; each seed is polished by Nelder-Mead, kept when the squared
    distance falls below 1e-16, and deduplicated.
    """
    if not feasibility_check(target_tau3, target_tau4):
        raise InfeasibleTargetError(f"({target_tau3}, {target_tau4}) violates the ratio bounds")
    target = FitTarget(0.0, 1.0, target_tau3, target_tau4)

    starts: list[tuple[float, float]] = []
    for region in _ATLAS_REGIONS:
        tgrid = map_grid(build_grid(region, _CENSUS_SEED_RESOLUTION))
        obj = np.where(
            tgrid.mask,
            (tgrid.tau3 - target_tau3) ** 2 + (tgrid.tau4 - target_tau4) ** 2,
            np.inf,
        )
        for i, j in _grid_local_minima(obj, threshold=0.05):
            starts.append((float(tgrid.lambda3_axis[i]), float(tgrid.lambda4_axis[j])))
    for root in solve_symmetric(target_tau4).roots:
        starts.append((root, root))

    found: list[tuple[float, float, float]] = []
    for start in starts:
        point, value, _, _ = nelder_mead(lambda a, b: objective(target, a, b), start, _CENSUS_NM)
        if _CENSUS_OBJECTIVE_MAX <= value < 1e-8:
            point, value, _, _ = nelder_mead(lambda a, b: objective(target, a, b), tuple(point), _CENSUS_NM)
        if value >= _CENSUS_OBJECTIVE_MAX:
            continue
        l3, l4 = float(point[0]), float(point[1])
        if any(math.hypot(l3 - a, l4 - b) < _CENSUS_DEDUP_TOL for a, b, _ in found):
            continue
        found.append((l3, l4, float(value)))

    solutions = []
    for l3, l4, value in sorted(found):
        lam1, lam2 = recover_location_scale(target, l3, l4)
        params = GldParams(lam1, lam2, l3, l4)
        tag = classify_region(params)
        moments = gld_lmoments(params, 6)
        solutions.append(
            CensusSolution(l3, l4, tag.region, value, lam1, lam2, moments.ratio(5), moments.ratio(6))
        )
    return solutions
