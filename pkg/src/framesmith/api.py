"""HTTP facade over the wizard, store and lexicon.

A deliberately thin adapter: every route decodes its inputs, calls the
corresponding module operation, and encodes the result with the shared
codecs -- no business logic lives here. Mutating routes require a bearer
token from a static token registry file mapping token -> contributor id.
"""

from __future__ import annotations

import json
from datetime import timedelta
from pathlib import Path
from typing import Any

import uvicorn
from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import interchange
from .config import AppConfig
from .errors import FramesmithError
from .languages import LanguageRegistry, default_registry
from .lexicon import Lemma, LemmaSearchResult, SynsetLexicon
from .model import POS, Frame, FrameType, Lexicality
from .rules import suggest_frame_elements
from .store import FrameStore, ImportMode
from .tutorials import TutorialRegistry
from .wizard import (
    FlowKind,
    ReviewDecision,
    StepRejection,
    Wizard,
    WizardSession,
    WizardStep,
    report_to_json,
)

_STATUS_BY_CODE = {
    "NOT_FOUND": 404,
    "UNKNOWN_SESSION": 404,
    "UNKNOWN_FRAME": 404,
    "UNKNOWN_ANCHOR": 404,
    "SESSION_EXPIRED": 410,
    "WRONG_STEP": 409,
    "DUPLICATE_NAME": 409,
    "DUPLICATE_LU": 409,
    "CONFLICT": 409,
    "VALIDATION_FAILED": 422,
    "SCHEMA_MISMATCH": 400,
    "INVALID_LANGUAGE": 400,
    "INVALID_PAYLOAD": 400,
    "SOURCE_UNREADABLE": 400,
    "EMPTY_SOURCE": 400,
    "STORAGE_FAILURE": 500,
}


class ApiError(Exception):
    def __init__(self, http_status: int, code: str, message: str, report=None):
        super().__init__(message)
        self.http_status = http_status
        self.code = code
        self.message = message
        self.report = report

    def body(self) -> dict[str, Any]:
        out: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.report is not None:
            out["report"] = report_to_json(self.report)
        return out

    @classmethod
    def wrap(cls, exc: FramesmithError) -> "ApiError":
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return cls(status, exc.code, exc.message, getattr(exc, "report", None))


# --- encoders -------------------------------------------------------------


def lemma_json(lemma: Lemma | None) -> dict | None:
    if lemma is None:
        return None
    return {"lemma": lemma.text, "pos": lemma.pos.value, "language": lemma.language.code}


def frame_json(frame: Frame, store: FrameStore) -> dict[str, Any]:
    doc = interchange.frame_to_json(frame)
    fe_names = {fe.id: fe.name for fe in frame.fes}
    doc["id"] = frame.id
    doc["effective_languages"] = sorted(l.code for l in frame.effective_languages())
    doc["lus"] = [
        {**interchange.lu_to_json(lu, frame.name, fe_names), "id": lu.id} for lu in frame.lus
    ]
    relations = []
    for rel in frame.relations:
        mother_names: dict[str, str] = {}
        if rel.resolved:
            try:
                mother = store.get_frame(rel.mother)
                mother_names = {fe.id: fe.name for fe in mother.fes}
            except FramesmithError:
                mother_names = {}
        relations.append(interchange.relation_to_json(rel, frame.name, mother_names))
    doc["relations"] = relations
    return doc


def search_result_json(result: LemmaSearchResult) -> dict[str, Any]:
    return {
        "exact_lus": [
            {
                "lemma": lu.lemma,
                "pos": lu.pos.value,
                "language": lu.language.code,
                "frame": {"id": summary.id, "name": summary.name, "definition": summary.definition},
                "example_sentence": lu.example_sentence,
                "id": lu.id,
            }
            for lu, summary in result.exact_lus
        ],
        "synonym_hits": [
            {
                "lemma": lemma_json(hit.lemma),
                "frames": [
                    {"id": s.id, "name": s.name, "definition": s.definition} for s in hit.frames
                ],
            }
            for hit in result.synonym_hits
        ],
        "cross_lingual_hits": [
            {
                "lemma": lemma_json(hit.lemma),
                "similarity": hit.similarity,
                "frames": [
                    {"id": s.id, "name": s.name, "definition": s.definition} for s in hit.frames
                ],
            }
            for hit in result.cross_lingual_hits
        ],
    }


def session_json(session: WizardSession, store: FrameStore) -> dict[str, Any]:
    return {
        "id": session.id,
        "contributor": session.contributor,
        "flow": session.flow.value,
        "step": session.step.value,
        "draft": frame_json(session.draft, store),
        "pending_lemma": lemma_json(session.pending_lemma),
        "search_result": (
            search_result_json(session.search_result) if session.search_result else None
        ),
        "attach_to": session.attach_to,
        "last_report": report_to_json(session.last_report) if session.last_report else None,
        "committed_frame": session.committed_frame,
        "updated_at": session.updated_at.isoformat(),
    }


# --- request bodies -------------------------------------------------------


class SessionCreate(BaseModel):
    flow: str


class LemmaSubmit(BaseModel):
    lemma: str
    pos: str
    language: str


class ReviewSubmit(BaseModel):
    decision: str
    frame_id: str | None = None


class StepSubmit(BaseModel):
    step: str
    payload: dict[str, Any] = {}


class BackSubmit(BaseModel):
    to_step: str


class FinalizeSubmit(BaseModel):
    sentence: str | None = None
    incorporated_fe: str | None = None


# --- app factory ----------------------------------------------------------


def load_tokens(token_file: str | Path | None) -> dict[str, str]:
    if token_file is None:
        return {}
    raw = json.loads(Path(token_file).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("token file must map token -> contributor id")
    return {str(k): str(v) for k, v in raw.items()}


def create_app(
    store: FrameStore,
    lexicon: SynsetLexicon,
    wizard: Wizard,
    tutorials: TutorialRegistry | None = None,
    tokens: dict[str, str] | None = None,
    registry: LanguageRegistry | None = None,
    default_threshold: float = 0.25,
) -> FastAPI:
    tutorials = tutorials or TutorialRegistry.packaged()
    tokens = tokens or {}
    registry = registry or default_registry()
    app = FastAPI(title="framesmith", version="0.1.0", docs_url=None, redoc_url=None)

    def contributor(authorization: str | None = Header(default=None)) -> str:
        if authorization and authorization.startswith("Bearer "):
            token = authorization[len("Bearer "):].strip()
            if token in tokens:
                return tokens[token]
        raise ApiError(401, "UNAUTHORIZED", "a valid contributor token is required")

    @app.exception_handler(ApiError)
    async def handle_api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.http_status, content=exc.body())

    @app.exception_handler(FramesmithError)
    async def handle_domain_error(_req: Request, exc: FramesmithError):
        wrapped = ApiError.wrap(exc)
        return JSONResponse(status_code=wrapped.http_status, content=wrapped.body())

    def parse(kind, raw: str, what: str):
        try:
            return kind(raw)
        except ValueError:
            allowed = ", ".join(e.value for e in kind)
            raise ApiError(400, "INVALID_PAYLOAD", f"{what} must be one of: {allowed}")

    def parse_language(code: str):
        try:
            return registry.parse(code)
        except FramesmithError as exc:
            raise ApiError(400, exc.code, exc.message)

    def step_response(result: WizardSession | StepRejection):
        if isinstance(result, StepRejection):
            return JSONResponse(
                status_code=422,
                content={
                    "code": "STEP_REJECTED",
                    "message": "the step was rejected; see the report",
                    "stayed_at": result.stayed_at.value,
                    "report": report_to_json(result.report),
                },
            )
        return session_json(result, store)

    # -- service ----------------------------------------------------------

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok"}

    # -- sessions ----------------------------------------------------------

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(body: SessionCreate, who: str = Depends(contributor)):
        flow = parse(FlowKind, body.flow, "flow")
        session = wizard.start_session(who, flow)
        return session_json(session, store)

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return session_json(wizard.get_session(session_id), store)

    @app.post("/api/v1/sessions/{session_id}/lemma")
    def submit_lemma(session_id: str, body: LemmaSubmit, who: str = Depends(contributor)):
        pos = parse(POS, body.pos, "pos")
        language = parse_language(body.language)
        try:
            lemma = Lemma(body.lemma, pos, language)
        except ValueError as exc:
            raise ApiError(400, "INVALID_PAYLOAD", str(exc))
        return session_json(wizard.submit_lemma(session_id, lemma), store)

    @app.post("/api/v1/sessions/{session_id}/review")
    def resolve_review(session_id: str, body: ReviewSubmit, who: str = Depends(contributor)):
        decision = parse(ReviewDecision, body.decision, "decision")
        session = wizard.resolve_review(session_id, decision, body.frame_id)
        return session_json(session, store)

    @app.post("/api/v1/sessions/{session_id}/steps")
    def submit_step(session_id: str, body: StepSubmit, who: str = Depends(contributor)):
        step = parse(WizardStep, body.step, "step")
        return step_response(wizard.submit_step(session_id, step, body.payload))

    @app.post("/api/v1/sessions/{session_id}/back")
    def go_back(session_id: str, body: BackSubmit, who: str = Depends(contributor)):
        to_step = parse(WizardStep, body.to_step, "to_step")
        return session_json(wizard.go_back(session_id, to_step), store)

    @app.post("/api/v1/sessions/{session_id}/finalize")
    def finalize(session_id: str, body: FinalizeSubmit, who: str = Depends(contributor)):
        outcome = wizard.finalize(session_id, body.sentence, body.incorporated_fe)
        return {
            "frame_id": outcome.frame_id,
            "frame_name": outcome.frame_name,
            "lu_id": outcome.lu_id,
        }

    # -- frames and LUs ----------------------------------------------------

    @app.get("/api/v1/frames")
    def list_frames(
        language: str | None = None,
        frame_type: str | None = Query(default=None, alias="type"),
        lexicality: str | None = None,
        q: str | None = None,
        page: int = 1,
        page_size: int = 50,
    ):
        result = store.list_frames(
            language=parse_language(language) if language else None,
            frame_type=parse(FrameType, frame_type, "type") if frame_type else None,
            lexicality=parse(Lexicality, lexicality, "lexicality") if lexicality else None,
            name_contains=q,
            page=page,
            page_size=page_size,
        )
        return {
            "items": [frame_json(f, store) for f in result.items],
            "total": result.total,
            "page": result.page,
            "page_size": result.page_size,
        }

    @app.get("/api/v1/frames/{frame_id}")
    def get_frame(frame_id: str):
        return frame_json(store.get_frame(frame_id), store)

    @app.get("/api/v1/lus")
    def find_lus(lemma: str, pos: str, language: str):
        found = store.find_lus(lemma, parse(POS, pos, "pos"), parse_language(language))
        out = []
        for lu in found:
            frame = store.get_frame(lu.frame)
            fe_names = {fe.id: fe.name for fe in frame.fes}
            out.append({
                **interchange.lu_to_json(lu, frame.name, fe_names),
                "id": lu.id,
                "frame_id": frame.id,
            })
        return out

    # -- suggestions and search ---------------------------------------------

    @app.get("/api/v1/suggestions/fes")
    def fe_suggestions(frame_type: str):
        suggestions = suggest_frame_elements(parse(FrameType, frame_type, "frame_type"))
        return [
            {
                "name": s.name,
                "coreness": s.coreness.value,
                "definition_stub": s.definition_stub,
            }
            for s in suggestions
        ]

    @app.get("/api/v1/search/lemma")
    def search_lemma(lemma: str, pos: str, language: str, threshold: float | None = None):
        query = Lemma(lemma, parse(POS, pos, "pos"), parse_language(language))
        value = default_threshold if threshold is None else threshold
        if not 0.0 <= value <= 1.0:
            raise ApiError(400, "INVALID_PAYLOAD", "threshold must be within [0, 1]")
        return search_result_json(lexicon.search(query, store, value))

    # -- admin ---------------------------------------------------------------

    @app.post("/api/v1/admin/import")
    async def admin_import(
        request: Request,
        mode: str = ImportMode.SKIP_CONFLICTS,
        who: str = Depends(contributor),
    ):
        if mode not in (ImportMode.STRICT, ImportMode.SKIP_CONFLICTS):
            raise ApiError(400, "INVALID_PAYLOAD", "mode must be strict or skip_conflicts")
        text = (await request.body()).decode("utf-8")
        result = store.import_text(text, mode)
        return {
            "imported": result.imported,
            "skipped": result.skipped,
            "errors": [
                {"code": e.code, "subject": e.subject, "message": e.message}
                for e in result.errors
            ],
        }

    @app.get("/api/v1/admin/export")
    def admin_export():
        return Response(content=store.export_text(), media_type="application/json")

    # -- tutorials -----------------------------------------------------------

    @app.get("/api/v1/tutorials/{anchor_id}")
    def tutorial(anchor_id: str):
        entry = tutorials.get(anchor_id)
        out = {"anchor": entry.anchor, "title": entry.title, "text": entry.text}
        if entry.video_url:
            out["video_url"] = entry.video_url
        return out

    @app.get("/api/v1/tutorials")
    def tutorial_anchors():
        return {"anchors": tutorials.anchors()}

    return app


def build_runtime(config: AppConfig):
    """Construct the store/lexicon/wizard triple an app needs."""
    registry = (
        LanguageRegistry.from_file(config.languages_path)
        if config.languages_path
        else default_registry()
    )
    store = FrameStore(config.store_path, registry=registry)
    lexicon = SynsetLexicon(registry)
    if config.lexicon_path and Path(config.lexicon_path).exists():
        lexicon.ingest(config.lexicon_path)
    wizard = Wizard(
        store,
        lexicon,
        registry=registry,
        similarity_threshold=config.similarity_threshold,
        session_ttl=timedelta(days=config.session_ttl_days),
        sessions_path=config.sessions_path,
    )
    tutorials = (
        TutorialRegistry.from_file(config.tutorials_path)
        if config.tutorials_path
        else TutorialRegistry.packaged()
    )
    tokens = load_tokens(config.token_file)
    app = create_app(
        store,
        lexicon,
        wizard,
        tutorials,
        tokens,
        registry,
        default_threshold=config.similarity_threshold,
    )
    return app, store, lexicon, wizard


def serve(config: AppConfig) -> None:
    app, _, _, _ = build_runtime(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
