"""HTTP/JSON API powering the curation UI.

Every domain error maps to exactly one (status, code) pair; 4xx are caller
faults, 5xx are store faults. The service is stateful over one loaded
snapshot: writes flush to disk on a configurable interval and on shutdown.
"""
from __future__ import annotations

import logging
import threading
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import curation
from .compare import build_comparison, find_similar, to_json_dict
from .corpus import LABEL_KEY_SEPARATOR
from .errors import (
    AssayKGError,
    ChecksumMismatch,
    DuplicateStatement,
    DuplicateStatementInSession,
    EmptyCorpus,
    EmptyLabel,
    EmptySelection,
    EmptyText,
    EmptyTitle,
    InvalidBaseUri,
    InvalidDecision,
    InvalidLabel,
    InvalidParameter,
    InvalidUri,
    IoFailure,
    ModelUnavailable,
    ParseError,
    PendingProposalsRemain,
    SessionClosed,
    UnknownAssay,
    UnknownContribution,
    UnknownPaper,
    UnknownProposal,
    UnknownSession,
    UnreadableSource,
    VersionMismatch,
)
from .graph import normalize_label
from .store import Store, save_snapshot

log = logging.getLogger(__name__)

STATUS_BY_ERROR = {
    EmptyTitle: 400,
    EmptyLabel: 400,
    EmptyText: 400,
    InvalidUri: 400,
    InvalidLabel: 400,
    InvalidDecision: 400,
    InvalidParameter: 400,
    InvalidBaseUri: 400,
    EmptySelection: 400,
    ParseError: 400,
    EmptyCorpus: 400,
    UnknownPaper: 404,
    UnknownContribution: 404,
    UnknownAssay: 404,
    UnknownSession: 404,
    UnknownProposal: 404,
    DuplicateStatement: 409,
    DuplicateStatementInSession: 409,
    SessionClosed: 409,
    PendingProposalsRemain: 409,
    ModelUnavailable: 409,
    UnreadableSource: 500,
    IoFailure: 500,
    VersionMismatch: 500,
    ChecksumMismatch: 500,
}


class AssayIn(BaseModel):
    text: str
    title: Optional[str] = None


class SemantifyIn(BaseModel):
    top_k: Optional[int] = None


class DecisionIn(BaseModel):
    decision: str


class ManualStatementIn(BaseModel):
    property: str
    value: str


class FinalizeIn(BaseModel):
    paper_title: str


def _session_json(session: curation.CurationSession) -> dict:
    return {
        "session_id": session.id,
        "assay_id": session.assay_id,
        "state": session.state,
        "contribution_id": session.contribution_id,
        "proposals": [_proposal_json(p) for p in session.proposals],
        "manual_additions": [
            {"property": l.property, "value": l.value} for l in session.manual_additions
        ],
    }


def _proposal_json(proposal: curation.ProposedStatement) -> dict:
    return {
        "proposal_id": proposal.proposal_id,
        "property": proposal.label.property,
        "value": proposal.label.value,
        "score": proposal.score,
        "accepted_by_threshold": True,
        "decision": proposal.decision,
    }


def create_app(
    store: Optional[Store] = None,
    store_path: Optional[str] = None,
    flush_interval: Optional[float] = None,
) -> FastAPI:
    state = store if store is not None else Store()
    stop_flushing = threading.Event()

    def flush() -> None:
        if store_path:
            save_snapshot(state, store_path)

    def flush_loop() -> None:
        while not stop_flushing.wait(flush_interval):
            try:
                flush()
            except IoFailure:
                log.exception("periodic snapshot flush failed")

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        worker = None
        if store_path and flush_interval:
            worker = threading.Thread(target=flush_loop, daemon=True)
            worker.start()
        yield
        if worker is not None:
            stop_flushing.set()
            worker.join(timeout=5)
        if store_path:
            flush()

    app = FastAPI(title="assaykg", lifespan=lifespan)
    app.state.store = state

    @app.exception_handler(AssayKGError)
    async def domain_error(_: Request, exc: AssayKGError):
        status = STATUS_BY_ERROR.get(type(exc), 500)
        return JSONResponse(
            status_code=status,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error(_: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "InvalidRequest", "message": str(exc.errors())}},
        )

    @app.post("/api/assays", status_code=201)
    def create_assay(body: AssayIn):
        assay_id = state.create_assay(body.text, title=body.title)
        return {"assay_id": assay_id}

    @app.get("/api/assays/{assay_id}")
    def get_assay(assay_id: str):
        record = state.assay(assay_id)
        return {
            "assay_id": record.assay.id,
            "title": record.assay.title,
            "text": record.assay.text,
            "contribution_id": record.contribution_id,
        }

    @app.post("/api/assays/{assay_id}/semantify", status_code=201)
    def semantify(assay_id: str, body: Optional[SemantifyIn] = None):
        top_k = body.top_k if body else None
        if top_k is not None and top_k < 1:
            raise InvalidParameter("top_k must be >= 1")
        session = state.semantify_assay(assay_id, top_k=top_k)
        return {
            "session_id": session.id,
            "proposals": [_proposal_json(p) for p in session.proposals],
        }

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_json(state.session(session_id))

    @app.patch("/api/sessions/{session_id}/proposals/{proposal_id}")
    def decide(session_id: str, proposal_id: str, body: DecisionIn):
        session = state.session(session_id)
        with state.lock:
            curation.decide(session, proposal_id, body.decision)
        return _proposal_json(session.proposal(proposal_id))

    @app.post("/api/sessions/{session_id}/statements", status_code=201)
    def add_manual(session_id: str, body: ManualStatementIn):
        session = state.session(session_id)
        with state.lock:
            curation.add_manual(session, body.property, body.value)
        added = session.manual_additions[-1]
        return {"property": added.property, "value": added.value}

    @app.post("/api/sessions/{session_id}/finalize", status_code=201)
    def finalize(session_id: str, body: FinalizeIn):
        contribution = state.finalize_session(session_id, body.paper_title)
        count = len(state.graph.statements_of(contribution))
        return {"contribution_id": contribution, "statement_count": count}

    @app.get("/api/comparisons")
    def comparisons(contributions: str = Query(...)):
        ids = [c.strip() for c in contributions.split(",") if c.strip()]
        if not ids:
            raise EmptySelection("no contributions selected")
        resolved = [state.resolve_contribution(c) for c in ids]
        table = build_comparison(state.graph, resolved)
        return to_json_dict(table)

    @app.get("/api/assays/{node_id}/similar")
    def similar(node_id: str, k: int = 5):
        if k < 1:
            raise InvalidParameter("k must be >= 1")
        query = state.resolve_contribution(node_id)
        results = find_similar(state.graph, query, k=k)
        return {
            "query": query,
            "results": [{"contribution": r.contribution, "score": r.score} for r in results],
        }

    @app.get("/api/stats")
    def stats():
        graph = state.graph
        counts = [len(graph.statements_of(c)) for c in graph.contribution_ids()]
        type_values: set[str] = set()
        format_values: set[str] = set()
        freq: dict[str, int] = {}
        for cid in graph.contribution_ids():
            for stmt in graph.statements_of(cid):
                prop = normalize_label(graph.predicate(stmt.predicate).label)
                value = normalize_label(graph.object_label(stmt.object))
                freq_key = f"{prop}{LABEL_KEY_SEPARATOR}{value}"
                freq[freq_key] = freq.get(freq_key, 0) + 1
                if prop == "has assay type":
                    type_values.add(value)
                if prop == "has assay format":
                    format_values.add(value)
        return {
            "assay_count": len(counts),
            "statements_min": min(counts) if counts else None,
            "statements_max": max(counts) if counts else None,
            "statements_mean": (sum(counts) / len(counts)) if counts else 0.0,
            "distinct_types": len(type_values),
            "distinct_formats": len(format_values),
            "per_label_frequency": dict(sorted(freq.items())),
        }

    return app
