"""HTTP/JSON API over the assessment engine.

Every error response uses one envelope: {code, message, details[]} with a
stable machine-readable code, so clients switch on codes, never on prose.
Request bodies are parsed by hand instead of through framework models to
keep that envelope uniform across parse, validation, and engine errors.
"""

from __future__ import annotations

import io
import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .assessment import (
    EngineConfig,
    WhatIfDelta,
    assess,
    catalog_hash,
    report_from_json,
    report_to_json,
    whatif,
)
from .catalog import Catalog, catalog_to_json
from .errors import (
    MALFORMED,
    NOT_FOUND,
    STALE_CATALOG,
    VALIDATION_FAILED,
    VERSION_CONFLICT,
    QberError,
)
from .model import profile_from_json, profile_to_json, validate_profile
from .report import report_csv
from .simulation import SimulationConfig, simulate_losses, summary_json
from .store import FileDocumentStore

_STATUS_BY_CODE = {
    NOT_FOUND: 404,
    VERSION_CONFLICT: 409,
    STALE_CATALOG: 409,
    VALIDATION_FAILED: 422,
}

PROFILES = "profiles"
REPORTS = "reports"


async def _json_body(request: Request) -> dict:
    raw = await request.body()
    try:
        doc = json.loads(raw) if raw else {}
    except json.JSONDecodeError as exc:
        raise QberError(MALFORMED, f"request body is not valid JSON: {exc.msg}",
                        details=[{"byte_offset": exc.pos}]) from exc
    if not isinstance(doc, dict):
        raise QberError(MALFORMED, "request body must be a JSON object")
    return doc


def create_app(store: FileDocumentStore, catalog: Catalog) -> FastAPI:
    app = FastAPI(title="qber", docs_url=None, redoc_url=None)

    @app.exception_handler(QberError)
    async def _qber_error(request: Request, exc: QberError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=exc.to_envelope())

    @app.exception_handler(Exception)
    async def _unexpected(request: Request, exc: Exception):
        envelope = {"code": "INTERNAL", "message": str(exc), "details": []}
        return JSONResponse(status_code=500, content=envelope)

    @app.get("/v1/catalog")
    async def get_catalog():
        return catalog_to_json(catalog)

    @app.post("/v1/profiles", status_code=201)
    async def post_profile(request: Request):
        doc = await _json_body(request)
        # Either a bare profile document, or {profile, id, base_version}
        # for optimistic updates of an existing one.
        if "profile" in doc:
            profile_doc = doc["profile"]
            doc_id = doc.get("id")
            base_version = doc.get("base_version")
        else:
            profile_doc, doc_id, base_version = doc, None, None
        profile = profile_from_json(profile_doc)
        validation = validate_profile(profile, catalog)
        if not validation.ok:
            raise QberError(
                VALIDATION_FAILED,
                "profile failed validation",
                details=validation.to_json(),
            )
        stored_id, version = store.put(
            PROFILES, profile_to_json(profile), doc_id=doc_id, base_version=base_version
        )
        return {"id": stored_id, "version": version}

    @app.get("/v1/profiles/{profile_id}")
    async def get_profile(profile_id: str):
        body, version = store.get(PROFILES, profile_id)
        return {"id": profile_id, "version": version, "profile": body}

    @app.post("/v1/assessments", status_code=201)
    async def post_assessment(request: Request):
        doc = await _json_body(request)
        profile_id = doc.get("profile_id")
        if not profile_id:
            raise QberError(MALFORMED, "profile_id is required")
        profile_doc, _ = store.get(PROFILES, profile_id)
        profile = profile_from_json(profile_doc)
        config = EngineConfig.from_json(doc.get("config") or {})
        report = assess(profile, catalog, config)
        body = report_to_json(report)
        store.put(REPORTS, body, doc_id=report.id)
        return {"id": report.id, "report": body}

    @app.get("/v1/assessments/{report_id}")
    async def get_assessment(report_id: str):
        body, version = store.get(REPORTS, report_id)
        return {"id": report_id, "version": version, "report": body}

    @app.post("/v1/assessments/{report_id}/whatif", status_code=201)
    async def post_whatif(report_id: str, request: Request):
        doc = await _json_body(request)
        body, _ = store.get(REPORTS, report_id)
        base = report_from_json(body)
        delta = WhatIfDelta.from_json(doc.get("delta") or {})
        result = whatif(base, delta, catalog)
        result_body = report_to_json(result)
        store.put(REPORTS, result_body, doc_id=result.id)
        return {"id": result.id, "report": result_body}

    @app.post("/v1/assessments/{report_id}/simulate")
    async def post_simulate(report_id: str, request: Request):
        doc = await _json_body(request)
        body, version = store.get(REPORTS, report_id)
        base = report_from_json(body)
        if base.catalog_digest != catalog_hash(catalog):
            raise QberError(
                STALE_CATALOG,
                "catalog does not match the one the report was computed with",
            )
        cfg = SimulationConfig.from_json(doc)
        profile = profile_from_json(base.profile_snapshot)
        distribution = simulate_losses(
            profile, catalog, cfg, mapping=base.config.rating_mapping
        )
        summary = summary_json(distribution, cfg.confidence_levels)
        body["simulation"] = summary
        store.put(REPORTS, body, doc_id=report_id, base_version=version)
        return summary

    @app.get("/v1/assessments/{report_id}/report.csv")
    async def get_report_csv(report_id: str):
        body, _ = store.get(REPORTS, report_id)
        report = report_from_json(body)
        buffer = io.StringIO()
        report_csv(report, buffer)
        return PlainTextResponse(buffer.getvalue(), media_type="text/csv")

    return app
