"""CSV and JSON emission for the toolkit's value types.

All numeric output uses the shortest round-trippable decimal form (``repr``)
unless a digit count is requested, so golden files and re-parsing are exact.
JSON documents carry a ``schema`` tag of the form ``gldlm/<type>/v1``.
"""

from __future__ import annotations

import json
from typing import Iterable

import numpy as np

from .atlas import BoundaryPolygon, CensusSolution, ContourSet, TauGrid
from .core import GldParams, Region
from .fitting import FitResult
from .lmoments import LMomentSet, SymmetricSolution

__all__ = [
    "fmt",
    "lmoments_to_csv",
    "lmoments_to_doc",
    "lmoments_from_doc",
    "symmetric_to_doc",
    "symmetric_from_doc",
    "taugrid_to_csv",
    "taugrid_to_doc",
    "polygon_to_csv",
    "polygon_to_doc",
    "polygon_from_doc",
    "contours_to_csv",
    "contours_to_doc",
    "census_to_csv",
    "census_to_doc",
    "census_from_doc",
    "fit_results_to_csv",
    "fit_result_to_doc",
    "fit_result_from_doc",
    "dumps",
]


def fmt(x: float, digits: int | None = None) -> str:
    if digits is not None:
        return f"{float(x):.{digits}g}"
    return repr(float(x))


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# --- L-moment sets ----------------------------------------------------------


def lmoments_to_csv(m: LMomentSet, digits: int | None = None) -> str:
    header = ["L1", "L2"] + [f"tau{r}" for r in range(3, m.max_order + 1)]
    row = [fmt(m.l1, digits), fmt(m.l2, digits)] + [fmt(t, digits) for t in m.tau]
    return ",".join(header) + "\n" + ",".join(row) + "\n"


def lmoments_to_doc(m: LMomentSet) -> dict:
    return {
        "schema": "gldlm/lmoments/v1",
        "l1": m.l1,
        "l2": m.l2,
        "tau": {f"tau{r}": m.ratio(r) for r in range(3, m.max_order + 1)},
    }


def lmoments_from_doc(doc: dict) -> LMomentSet:
    tau = tuple(doc["tau"][f"tau{r}"] for r in range(3, 3 + len(doc["tau"])))
    return LMomentSet(doc["l1"], doc["l2"], tau)


# --- symmetric solver -------------------------------------------------------


def symmetric_to_doc(s: SymmetricSolution) -> dict:
    return {"schema": "gldlm/symmetric-solution/v1", "tau4": s.tau4, "roots": list(s.roots)}


def symmetric_from_doc(doc: dict) -> SymmetricSolution:
    return SymmetricSolution(doc["tau4"], tuple(doc["roots"]))


# --- atlas ------------------------------------------------------------------


def taugrid_to_csv(t: TauGrid, digits: int | None = None) -> str:
    lines = ["region,lambda3,lambda4,tau3,tau4"]
    l3, l4 = np.meshgrid(t.lambda3_axis, t.lambda4_axis, indexing="ij")
    m = t.mask
    for a, b, x, y in zip(l3[m], l4[m], t.tau3[m], t.tau4[m]):
        lines.append(f"{t.region.value},{fmt(a, digits)},{fmt(b, digits)},{fmt(x, digits)},{fmt(y, digits)}")
    return "\n".join(lines) + "\n"


def taugrid_to_doc(t: TauGrid) -> dict:
    return {
        "schema": "gldlm/tau-grid/v1",
        "region": t.region.value,
        "lambda3_axis": t.lambda3_axis.tolist(),
        "lambda4_axis": t.lambda4_axis.tolist(),
        "tau3": t.tau3.tolist(),
        "tau4": t.tau4.tolist(),
        "mask": t.mask.tolist(),
    }


def polygon_to_csv(p: BoundaryPolygon, digits: int | None = None) -> str:
    lines = ["region,tau3,tau4"]
    for x, y in p.vertices:
        lines.append(f"{p.region.value},{fmt(x, digits)},{fmt(y, digits)}")
    return "\n".join(lines) + "\n"


def polygon_to_doc(p: BoundaryPolygon) -> dict:
    return {
        "schema": "gldlm/boundary-polygon/v1",
        "region": p.region.value,
        "vertices": p.vertices.tolist(),
    }


def polygon_from_doc(doc: dict) -> BoundaryPolygon:
    return BoundaryPolygon(Region(doc["region"]), np.asarray(doc["vertices"], dtype=float))


def contours_to_csv(c: ContourSet, digits: int | None = None) -> str:
    lines = ["statistic,level,component,lambda3,lambda4"]
    for level in c.levels:
        for k, poly in enumerate(c.polylines[level]):
            for a, b in poly:
                lines.append(f"{c.statistic},{fmt(level, digits)},{k},{fmt(a, digits)},{fmt(b, digits)}")
    return "\n".join(lines) + "\n"


def contours_to_doc(c: ContourSet) -> dict:
    return {
        "schema": "gldlm/contour-set/v1",
        "statistic": c.statistic,
        "levels": list(c.levels),
        "polylines": {repr(level): [poly.tolist() for poly in c.polylines[level]] for level in c.levels},
    }


def census_to_csv(solutions: Iterable[CensusSolution], digits: int | None = None) -> str:
    lines = ["region,lambda1,lambda2,lambda3,lambda4,tau5,tau6,objective"]
    for s in solutions:
        lines.append(
            ",".join(
                [s.region.value]
                + [fmt(v, digits) for v in (s.lambda1, s.lambda2, s.lambda3, s.lambda4, s.tau5, s.tau6, s.objective)]
            )
        )
    return "\n".join(lines) + "\n"


def census_to_doc(solutions: Iterable[CensusSolution]) -> dict:
    return {
        "schema": "gldlm/census/v1",
        "solutions": [
            {
                "lambda3": s.lambda3,
                "lambda4": s.lambda4,
                "region": s.region.value,
                "objective": s.objective,
                "lambda1": s.lambda1,
                "lambda2": s.lambda2,
                "tau5": s.tau5,
                "tau6": s.tau6,
            }
            for s in solutions
        ],
    }


def census_from_doc(doc: dict) -> list[CensusSolution]:
    return [
        CensusSolution(
            d["lambda3"],
            d["lambda4"],
            Region(d["region"]),
            d["objective"],
            d["lambda1"],
            d["lambda2"],
            d["tau5"],
            d["tau6"],
        )
        for d in doc["solutions"]
    ]


# --- fitting ----------------------------------------------------------------


def fit_result_to_doc(r: FitResult) -> dict:
    return {
        "schema": "gldlm/fit-result/v1",
        "params": list(r.params.as_tuple()),
        "region": r.region.value,
        "objective": r.objective,
        "iterations": r.iterations,
        "converged": r.converged,
        "ks_statistic": r.ks_statistic,
        "start_point": list(r.start_point),
    }


def fit_result_from_doc(doc: dict) -> FitResult:
    return FitResult(
        params=GldParams(*doc["params"]),
        region=Region(doc["region"]),
        objective=doc["objective"],
        iterations=doc["iterations"],
        converged=doc["converged"],
        ks_statistic=doc["ks_statistic"],
        start_point=tuple(doc["start_point"]),
    )


def fit_results_to_csv(results: Iterable[FitResult], digits: int | None = None) -> str:
    lines = ["lambda1,lambda2,lambda3,lambda4,region,objective,iterations,converged,ks_statistic,start3,start4"]
    for r in results:
        p = r.params
        ks = "" if r.ks_statistic is None else fmt(r.ks_statistic, digits)
        lines.append(
            ",".join(
                [
                    fmt(p.lambda1, digits),
                    fmt(p.lambda2, digits),
                    fmt(p.lambda3, digits),
                    fmt(p.lambda4, digits),
                    r.region.value,
                    fmt(r.objective, digits),
                    str(r.iterations),
                    str(r.converged).lower(),
                    ks,
                    fmt(r.start_point[0], digits),
                    fmt(r.start_point[1], digits),
                ]
            )
        )
    return "\n".join(lines) + "\n"
