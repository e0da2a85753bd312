"""HTTP service exposing the obstruction pipeline.

Computations run synchronously inside the request: this is a compute
service for desk-scale algebra jobs, not a high-throughput API.  The
CLI drives the same app in-process by default.
"""

from __future__ import annotations

from typing import List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .fixtures import FixtureError, builtin_catalog, filter_catalog
from .inputfile import STAGE_NAMES, InputDocument, parse_input
from .obstructions import InternalInconsistency, der, full_report
from .polyparse import ParseError
from .reporting import render_table, report_payload, verify_outcome

OBSTRUCTION_STAGES = ("aclass", "kskernel", "lclass")


class RunRequest(BaseModel):
    source: str = Field(description="input document text")
    stages: Optional[List[str]] = Field(
        default=None, description="subset of der, aclass, kskernel, lclass"
    )
    include_witnesses: bool = True


class ModuleReport(BaseModel):
    module: str
    aclass: Optional[dict] = None
    kskernel: Optional[dict] = None
    lclass: Optional[dict] = None
    connection: Optional[dict] = None
    annotations: Optional[List[str]] = None
    timings_ms: dict = Field(default_factory=dict)


class RunResponse(BaseModel):
    ring: str
    stages: List[str]
    table: str
    reports: List[ModuleReport]
    derivations: Optional[List[List[str]]] = None


class CatalogModule(BaseModel):
    name: str
    expected: List[Optional[int]]


class CatalogEntryInfo(BaseModel):
    id: str
    description: str
    ring: str
    modules: List[CatalogModule]
    input_text: str


class CatalogRunRequest(BaseModel):
    pattern: Optional[str] = None
    verify: bool = False
    stages: Optional[List[str]] = None
    order: str = "dp"
    include_witnesses: bool = False


class CatalogEntryResult(BaseModel):
    id: str
    table: str
    reports: List[ModuleReport]
    mismatches: List[str]


class CatalogRunResponse(BaseModel):
    results: List[CatalogEntryResult]
    ok: bool


class DerRequest(BaseModel):
    source: str


class DerResponse(BaseModel):
    ring: str
    generators: List[List[str]]


def _check_stages(stages: Optional[List[str]]) -> List[str]:
    if stages is None:
        return list(OBSTRUCTION_STAGES)
    bad = [s for s in stages if s not in STAGE_NAMES]
    if bad:
        raise HTTPException(
            status_code=422,
            detail={"message": f"unknown stages: {', '.join(bad)}",
                    "expected": list(STAGE_NAMES)},
        )
    return list(stages)


def _parse_document(source: str) -> InputDocument:
    try:
        return parse_input(source)
    except ParseError as exc:
        raise HTTPException(
            status_code=422,
            detail={
                "message": str(exc),
                "line": exc.line,
                "column": exc.column,
                "expected": list(exc.expected),
                "found": exc.found,
            },
        ) from exc


def run_document(doc: InputDocument, stages: List[str],
                 include_witnesses: bool = True) -> RunResponse:
    obstruction_stages = [s for s in stages if s in OBSTRUCTION_STAGES]
    reports = []
    payloads = []
    try:
        for name, module in doc.modules:
            rep = full_report(module, name, stages=obstruction_stages)
            reports.append(rep)
            payloads.append(report_payload(rep, include_witnesses))
        derivs = None
        if "der" in stages:
            derivs = [
                [str(c) for c in d.coeffs] for d in der(doc.ring).generators
            ]
    except InternalInconsistency as exc:
        raise HTTPException(
            status_code=500,
            detail={"message": str(exc), "kind": "internal-inconsistency"},
        ) from exc
    return RunResponse(
        ring=repr(doc.ring),
        stages=stages,
        table=render_table(reports),
        reports=[ModuleReport(**p) for p in payloads],
        derivations=derivs,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="connobs",
        description="Obstruction calculus for connections on modules",
        version="0.1.0",
    )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/run", response_model=RunResponse)
    def run(request: RunRequest):
        doc = _parse_document(request.source)
        stages = _check_stages(request.stages if request.stages is not None
                               else doc.stages)
        return run_document(doc, stages, request.include_witnesses)

    @app.get("/catalog", response_model=List[CatalogEntryInfo])
    def catalog():
        out = []
        for entry in builtin_catalog():
            out.append(CatalogEntryInfo(
                id=entry.id,
                description=entry.description,
                ring=repr(entry.ring),
                modules=[
                    CatalogModule(name=name, expected=list(entry.expected[name]))
                    for name, _ in entry.modules
                ],
                input_text=entry.to_input_text(),
            ))
        return out

    @app.post("/catalog/run", response_model=CatalogRunResponse)
    def catalog_run(request: CatalogRunRequest):
        stages = _check_stages(request.stages)
        obstruction_stages = [s for s in stages if s in OBSTRUCTION_STAGES]
        try:
            entries = filter_catalog(request.pattern, order=request.order)
        except KeyError as exc:
            raise HTTPException(status_code=404,
                                detail={"message": str(exc)}) from exc
        except FixtureError as exc:
            raise HTTPException(status_code=422,
                                detail={"message": str(exc)}) from exc
        results = []
        ok = True
        for entry in entries:
            reports = []
            payloads = []
            mismatches = []
            try:
                for name, module in entry.modules:
                    rep = full_report(module, name, stages=obstruction_stages)
                    reports.append(rep)
                    payloads.append(report_payload(rep, request.include_witnesses))
                    if request.verify:
                        expected = entry.expected.get(name)
                        if expected and not verify_outcome(expected, rep.triple()):
                            ok = False
                            mismatches.append(
                                f"{entry.id}/{name}: expected "
                                f"{expected}, got {rep.triple()}"
                            )
            except InternalInconsistency as exc:
                raise HTTPException(
                    status_code=500,
                    detail={"message": str(exc),
                            "kind": "internal-inconsistency"},
                ) from exc
            results.append(CatalogEntryResult(
                id=entry.id,
                table=render_table(reports, title=entry.id),
                reports=[ModuleReport(**p) for p in payloads],
                mismatches=mismatches,
            ))
        return CatalogRunResponse(results=results, ok=ok)

    @app.post("/der", response_model=DerResponse)
    def derivations(request: DerRequest):
        doc = _parse_document(request.source)
        dm = der(doc.ring)
        return DerResponse(
            ring=repr(doc.ring),
            generators=[[str(c) for c in d.coeffs] for d in dm.generators],
        )

    return app


app = create_app()
