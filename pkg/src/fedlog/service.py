"""HTTP query service: templates, query submission, workflow inspection."""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .engine import EngineError, QueryEngine, QueryResponse


class QueryRequest(BaseModel):
    template_id: Optional[str] = None
    slot_values: Optional[dict[str, str]] = None
    raw: Optional[str] = None
    no_cache: bool = False
    mode_overrides: Optional[dict[str, str]] = None


def _table_payload(response: QueryResponse) -> dict:
    return {
        "query_id": response.query_id,
        "columns": [
            {"name": c.name, "kind": c.kind} for c in response.table.columns
        ],
        "rows": [list(r) for r in response.table.rows],
        "timings": response.timings,
        "cache_hit": response.cache_hit,
        "warnings": response.warnings,
    }


def create_app(engine: QueryEngine) -> FastAPI:
    app = FastAPI(title="fedlog query service")
    app.state.engine = engine
    # The browser UI is served separately from the API.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/templates")
    def templates():
        return [
            {
                "id": t.id,
                "text": t.display_text,
                "slots": [
                    {
                        "name": s.name,
                        "kind": s.kind,
                        "values": list(s.values),
                        "min": s.minimum,
                        "max": s.maximum,
                    }
                    for s in t.slots
                ],
            }
            for t in engine.templates
        ]

    @app.post("/query")
    def query(request: QueryRequest):
        try:
            response = engine.handle_query(
                template_id=request.template_id,
                slot_values=request.slot_values,
                raw_text=request.raw,
                no_cache=request.no_cache,
                mode_overrides=request.mode_overrides,
            )
        except EngineError as exc:
            raise HTTPException(
                status_code=400, detail={"stage": exc.stage, "error": str(exc)}
            ) from exc
        return _table_payload(response)

    @app.get("/query/{query_id}/workflow")
    def workflow(query_id: str):
        records = engine.workflow_records(query_id)
        if not records:
            raise HTTPException(status_code=404,
                                detail={"error": f"unknown query {query_id}"})
        return {"query_id": query_id, "records": records}

    return app
