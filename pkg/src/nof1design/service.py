"""Stateless HTTP facade over the design engine for the interactive explorer.

Endpoints mirror the explorer workflow: the trade-off curve for panel (b),
design tables + individual-SE series for panels (c)-(e), sequence utilities
for the input panel.  Identical request bodies yield identical responses.

Error mapping follows the CLI exit-code semantics: validation -> 400 with the
offending field path, inestimable -> 422 (code "inestimable"), infeasible
everywhere -> 422 (code "infeasible"), oversized enumerations -> 413,
compute timeout -> 503 (code "timeout", no partial results).

Environment knobs: NOF1_SEQUENCE_CAP (default 4096), NOF1_COMPUTE_TIMEOUT
seconds (default 60), NOF1_CORS_ORIGINS (comma-separated, default *),
NOF1_UI_DIR (static explorer bundle to serve at /).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FuturesTimeout
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .errors import EstimabilityError, ParameterError, SequenceFileError
from .schemas import (
    CurvePointOut,
    DesignRow,
    DesignsRequest,
    DesignsResponse,
    EnumerateRequest,
    EnumerateResponse,
    HealthResponse,
    IndividualSeOut,
    OptimizedSearchRequest,
    OptimizedSearchResponse,
    SeriesPointOut,
    UploadRequest,
    UploadResponse,
)
from .search import (
    AXES,
    AXIS_MEASUREMENTS,
    AXIS_PARTICIPANTS,
    DesignRecord,
    SearchConstraint,
    enumerate_designs_fixed_product,
    enumerate_feasible_designs,
    individual_se_curve,
    optimize_total_measurements_curve,
)
from .sequences import count_sequences, enumerate_sequences, parse_sequence_file
from .serialize import design_row, parameters_echo


@dataclass(frozen=True)
class Settings:
    sequence_cap: int = 4096
    compute_timeout: float = 60.0
    cors_origins: tuple[str, ...] = ("*",)
    ui_dir: str | None = None

    @classmethod
    def from_env(cls) -> "Settings":
        origins = tuple(
            s.strip()
            for s in os.environ.get("NOF1_CORS_ORIGINS", "*").split(",")
            if s.strip()
        )
        return cls(
            sequence_cap=int(os.environ.get("NOF1_SEQUENCE_CAP", "4096")),
            compute_timeout=float(os.environ.get("NOF1_COMPUTE_TIMEOUT", "60")),
            cors_origins=origins or ("*",),
            ui_dir=os.environ.get("NOF1_UI_DIR"),
        )


class ComputeTimeout(Exception):
    pass


def _record_to_row(record: DesignRecord) -> DesignRow:
    row = design_row(record)
    ev = record.evaluation
    return DesignRow(
        **row,
        optimized=record.optimized,
        naive_se=list(ev.naive_se),
        shrunken_fixed_se=list(ev.shrunken_fixed_se) if ev.shrunken_fixed_se else None,
        shrunken_random_se=list(ev.shrunken_random_se) if ev.shrunken_random_se else None,
        sequences=[list(s.assignments) for s in record.design.sequences],
    )


def create_app(settings: Settings | None = None) -> FastAPI:
    settings = settings or Settings.from_env()
    app = FastAPI(title="nof1design", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(settings.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    executor = ThreadPoolExecutor(max_workers=max(os.cpu_count() or 1, 2))

    def run(fn, *args, **kwargs):
        future = executor.submit(fn, *args, **kwargs)
        try:
            return future.result(timeout=settings.compute_timeout)
        except FuturesTimeout:
            future.cancel()
            raise ComputeTimeout()

    @app.exception_handler(RequestValidationError)
    async def on_request_validation(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", ()) if p != "body")
        return JSONResponse(
            status_code=400,
            content={
                "code": "validation_error",
                "field": field or None,
                "message": first.get("msg", "invalid request"),
            },
        )

    @app.exception_handler(ParameterError)
    async def on_parameter_error(request: Request, exc: ParameterError):
        content = {"code": "validation_error", "field": exc.field, "message": str(exc)}
        if isinstance(exc, SequenceFileError):
            content["line"] = exc.line
        return JSONResponse(status_code=400, content=content)

    @app.exception_handler(EstimabilityError)
    async def on_estimability_error(request: Request, exc: EstimabilityError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "inestimable",
                "coordinate": exc.coordinate,
                "message": str(exc),
            },
        )

    @app.exception_handler(ComputeTimeout)
    async def on_timeout(request: Request, exc: ComputeTimeout):
        return JSONResponse(
            status_code=503,
            content={
                "code": "timeout",
                "message": "computation exceeded the per-request limit; "
                "no partial results are returned",
            },
        )

    @app.get("/api/v1/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__, engine="nof1design")

    @app.post("/api/v1/search/optimized", response_model=OptimizedSearchResponse)
    def search_optimized(body: OptimizedSearchRequest) -> OptimizedSearchResponse:
        if body.axis not in AXES:
            raise ParameterError(f"axis must be one of {AXES}", field="axis")
        lo, hi = body.range
        if lo < 1 or hi < lo:
            raise ParameterError("range must satisfy 1 <= lo <= hi", field="range")
        model, random_effects, residual, requirement, scheme = body.build()

        points = run(
            optimize_total_measurements_curve,
            body.axis,
            range(lo, hi + 1),
            model,
            random_effects,
            residual,
            requirement,
            scheme,
            optimize_y_only=body.optimize_y_only,
            include_individual=False,
            max_participants_per_sequence=body.max_j,
            max_per_period=body.max_l,
            max_periods=body.max_k,
        )
        if not points:
            return JSONResponse(
                status_code=422,
                content={
                    "code": "infeasible",
                    "message": "no feasible design anywhere in the requested range",
                },
            )
        return OptimizedSearchResponse(
            parameters=parameters_echo(model, random_effects, residual, requirement, scheme),
            axis=body.axis,
            points=[
                CurvePointOut(
                    x=p.x,
                    y_min=p.y_min,
                    y_mean=p.y_mean,
                    y_max=p.y_max,
                    designs=[_record_to_row(r) for r in p.records],
                )
                for p in points
            ],
        )

    def _designs_payload(body: DesignsRequest) -> DesignsResponse:
        model, random_effects, residual, requirement, scheme = body.build()
        if body.participants is None and body.measurements is None:
            raise ParameterError(
                "fix participants and/or measurements", field="participants"
            )

        if body.participants is not None and body.measurements is not None:
            records = enumerate_feasible_designs(
                body.participants, body.measurements, scheme, model, random_effects,
                residual, requirement, include_individual=body.include_individual,
            )
            se_grouping = "periods"
            se_records = records
        else:
            fix = AXIS_PARTICIPANTS if body.participants is not None else AXIS_MEASUREMENTS
            value = body.participants if body.participants is not None else body.measurements
            constraint = SearchConstraint(
                fix=fix,
                value=value,
                model=model,
                random_effects=random_effects,
                residual=residual,
                requirement=requirement,
                max_participants_per_sequence=body.max_j,
                max_per_period=body.max_l,
                max_periods=body.max_k,
            )
            records = enumerate_designs_fixed_product(
                constraint, scheme, include_individual=body.include_individual
            )
            if not body.optimize_y_only:
                records = [r for r in records if r.optimized]
            # panel (d): every power-passing design across the other axis
            se_records = []
            if body.include_individual:
                if body.participants is not None:
                    lo, hi = body.se_axis_range or (1, 48)
                    se_grouping = AXIS_MEASUREMENTS
                    for m in range(lo, hi + 1):
                        se_records.extend(
                            enumerate_feasible_designs(
                                body.participants, m, scheme, model, random_effects,
                                residual, requirement, include_individual=True,
                            )
                        )
                else:
                    lo, hi = body.se_axis_range or (1, 64)
                    se_grouping = AXIS_PARTICIPANTS
                    for p in range(lo, hi + 1):
                        se_records.extend(
                            enumerate_feasible_designs(
                                p, body.measurements, scheme, model, random_effects,
                                residual, requirement, include_individual=True,
                            )
                        )
            else:
                se_grouping = AXIS_MEASUREMENTS

        individual = None
        if body.include_individual and se_records:
            curves = individual_se_curve(se_records, grouping=se_grouping)
            individual = IndividualSeOut(
                grouping=se_grouping,
                series={
                    name: [
                        SeriesPointOut(
                            x=p.x, y_min=p.y_min, y_mean=p.y_mean, y_max=p.y_max
                        )
                        for p in pts
                    ]
                    for name, pts in curves.items()
                },
            )
        return DesignsResponse(
            parameters=parameters_echo(model, random_effects, residual, requirement, scheme),
            participants=body.participants,
            measurements=body.measurements,
            designs=[_record_to_row(r) for r in records],
            individual_se=individual,
        )

    @app.post("/api/v1/designs", response_model=DesignsResponse)
    def designs(body: DesignsRequest) -> DesignsResponse:
        return run(_designs_payload, body)

    @app.post("/api/v1/sequences/enumerate", response_model=EnumerateResponse)
    def sequences_enumerate(body: EnumerateRequest) -> EnumerateResponse:
        scheme = body.scheme.build()
        count = count_sequences(scheme, body.k)
        if count > settings.sequence_cap:
            return JSONResponse(
                status_code=413,
                content={
                    "code": "too_many_sequences",
                    "message": f"{count} sequences exceed the cap of "
                    f"{settings.sequence_cap}; pick specific sequences and upload "
                    "them as user-specified",
                    "count": count,
                    "cap": settings.sequence_cap,
                },
            )
        seqs = enumerate_sequences(scheme, body.k)
        return EnumerateResponse(
            scheme=scheme.kind,
            k=body.k,
            count=len(seqs),
            sequences=[list(s.assignments) for s in seqs],
        )

    @app.post("/api/v1/sequences/upload", response_model=UploadResponse)
    def sequences_upload(body: UploadRequest) -> UploadResponse:
        seqs = parse_sequence_file(body.content)
        return UploadResponse(
            k=seqs[0].n_periods,
            count=len(seqs),
            sequences=[list(s.assignments) for s in seqs],
        )

    ui_dir = settings.ui_dir
    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


app = create_app()


def main() -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="Serve the n-of-1 design API")
    parser.add_argument("--host", default=os.environ.get("NOF1_HOST", "127.0.0.1"))
    parser.add_argument(
        "--port", type=int, default=int(os.environ.get("NOF1_PORT", "8000"))
    )
    args = parser.parse_args()
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
