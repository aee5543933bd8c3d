"""HTTP service exposing the toolkit; the CLI is a thin client of this app.

Validation-type library errors map to HTTP 400, numerical failures to 500;
both carry ``{"error": {"code": ..., "message": ...}}`` envelopes so clients
can translate them into exit codes without parsing prose.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, atlas, fitting, serialize, simbench
from ..core import GldParams, cdf, classify_region, pdf, quantile, quantile_density, sample, validate
from ..errors import NUMERICAL_ERRORS, GldlmError, InvalidParamsError
from ..lmoments import gld_lmoments, sample_lmoments, solve_symmetric
from . import schemas

__all__ = ["app", "create_app"]


def _params(lambdas: list[float]) -> GldParams:
    return GldParams(*lambdas)


def create_app() -> FastAPI:
    app = FastAPI(title="gldlm", version=__version__)

    @app.exception_handler(GldlmError)
    async def gldlm_error_handler(_: Request, exc: GldlmError):
        status = 500 if isinstance(exc, NUMERICAL_ERRORS) else 400
        return JSONResponse(
            status_code=status,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.get("/v1/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/v1/eval", response_model=schemas.EvalResponse)
    def evaluate(req: schemas.EvalRequest):
        p = _params(req.lambdas)
        at = np.asarray(req.at, dtype=float)
        fn = {"quantile": quantile, "density": quantile_density, "pdf": pdf, "cdf": cdf}[req.stat]
        values = fn(p, at)
        return schemas.EvalResponse(stat=req.stat, at=list(map(float, at)), values=np.atleast_1d(values).tolist())

    @app.post("/v1/lmom")
    def lmom(req: schemas.LmomRequest):
        return serialize.lmoments_to_doc(gld_lmoments(_params(req.lambdas), req.max_order))

    @app.post("/v1/lmom/sample")
    def lmom_sample(req: schemas.SampleLmomRequest):
        return serialize.lmoments_to_doc(sample_lmoments(req.data, req.max_order))

    @app.post("/v1/solve-symmetric")
    def solve_symmetric_endpoint(req: schemas.SolveSymmetricRequest):
        return serialize.symmetric_to_doc(solve_symmetric(req.tau4))

    @app.post("/v1/validate", response_model=schemas.ValidateResponse)
    def validate_endpoint(req: schemas.ValidateRequest):
        p = _params(req.lambdas)
        tag = classify_region(p)
        return schemas.ValidateResponse(
            valid=validate(p), region=tag.region.value, lmoments_exist=tag.lmoments_exist
        )

    @app.post("/v1/atlas")
    def atlas_endpoint(req: schemas.AtlasRequest):
        limits = tuple(tuple(pair) for pair in req.limits) if req.limits else None
        grid = atlas.build_grid(req.region, req.resolution, limits)
        tgrid = atlas.map_grid(grid)
        l3, l4 = np.meshgrid(tgrid.lambda3_axis, tgrid.lambda4_axis, indexing="ij")
        m = tgrid.mask
        doc = {
            "schema": "gldlm/atlas/v1",
            "region": tgrid.region.value,
            "lambda3": l3[m].tolist(),
            "lambda4": l4[m].tolist(),
            "tau3": tgrid.tau3[m].tolist(),
            "tau4": tgrid.tau4[m].tolist(),
        }
        if req.boundary:
            candidates = atlas.potential_boundary_points(tgrid)
            polygon = atlas.assemble_boundary(candidates, tgrid)
            doc["boundary"] = polygon.vertices.tolist()
        return doc

    @app.post("/v1/contour")
    def contour_endpoint(req: schemas.ContourRequest):
        limits = tuple(tuple(pair) for pair in req.limits) if req.limits else None
        grid = atlas.build_grid(req.region, req.resolution, limits)
        cset = atlas.contours(grid, req.statistic, req.levels)
        return serialize.contours_to_doc(cset)

    @app.post("/v1/census")
    def census_endpoint(req: schemas.CensusRequest):
        return serialize.census_to_doc(atlas.solution_census(req.tau3, req.tau4))

    @app.post("/v1/fit")
    def fit_endpoint(req: schemas.FitRequest):
        starts = [tuple(s) for s in req.starts]
        results = fitting.fit(req.data, starts=starts, compute_ks=req.compute_ks)
        return {
            "schema": "gldlm/fit-results/v1",
            "results": [serialize.fit_result_to_doc(r) for r in results],
        }

    @app.post("/v1/sample", response_model=schemas.SampleResponse)
    def sample_endpoint(req: schemas.SampleRequest):
        values = sample(_params(req.lambdas), req.n, req.seed)
        return schemas.SampleResponse(seed=req.seed, values=values.tolist())

    @app.post("/v1/simulate")
    def simulate_endpoint(req: schemas.SimulateRequest):
        config = simbench.SimConfig(
            generator=_params(req.lambdas),
            sample_size=req.sample_size,
            replications=req.replications,
            seed=req.seed,
            report_smaller_start=req.report_smaller_start,
        )
        report = simbench.run_simulation(config)
        import json

        return json.loads(simbench.format_report(report, "json"))

    return app


app = create_app()
