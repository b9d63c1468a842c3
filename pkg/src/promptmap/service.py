"""HTTP surface of the exploration loop, mounted under /v1.

Sessions live as JSON documents in a directory; requests that mutate one
session are serialized behind a per-session lock, so the service stays
restartable at any point.
"""

from __future__ import annotations

import logging
import secrets
import threading
import uuid
from contextlib import contextmanager
from functools import partial
from pathlib import Path

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import engine
from .concreteness import annotate_prompt, load_lexicon
from .config import AppConfig, bundled_lexicon_path
from .errors import InvalidStateError, NotFoundError, PromptMapError, ValidationError
from .metrics import diversity_report
from .providers import ImageRequest, Providers, build_providers
from .session import ImageRef, Session, create_session, load_session, save_session

logger = logging.getLogger(__name__)

_STATUS_BY_CODE = {
    "validation": 400,
    "format": 400,
    "not_found": 404,
    "invalid_state": 409,
    "pool_exhausted": 409,
    "provider": 502,
}

_MODE_ALIASES = {
    "detail": engine.ExpansionMode.ADD_DETAILS,
    "details": engine.ExpansionMode.ADD_DETAILS,
    "add_details": engine.ExpansionMode.ADD_DETAILS,
    "alt": engine.ExpansionMode.GENERATE_ALTERNATIVES,
    "alternatives": engine.ExpansionMode.GENERATE_ALTERNATIVES,
    "generate_alternatives": engine.ExpansionMode.GENERATE_ALTERNATIVES,
}


def parse_mode(value: str) -> engine.ExpansionMode:
    mode = _MODE_ALIASES.get(value.strip().lower())
    if mode is None:
        raise ValidationError(f"unknown mode: {value!r} (use detail or alt)")
    return mode


class SessionStore:
    """Directory of session documents with per-session write locks."""

    def __init__(self, directory: str | Path, annotator=None, clock=None):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.annotator = annotator
        self.clock = clock
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        if not session_id.isalnum():
            raise ValidationError(f"malformed session id: {session_id!r}")
        return self.directory / f"{session_id}.json"

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, prompt: str) -> tuple[str, Session]:
        session_id = uuid.uuid4().hex[:12]
        session = create_session(prompt, annotator=self.annotator, clock=self.clock)
        with self._lock_for(session_id):
            save_session(session, self._path(session_id))
        return session_id, session

    def load(self, session_id: str) -> Session:
        path = self._path(session_id)
        if not path.exists():
            raise NotFoundError(f"session {session_id} does not exist")
        return load_session(path, annotator=self.annotator, clock=self.clock)

    @contextmanager
    def mutate(self, session_id: str):
        """Load-mutate-save under the session's lock."""
        with self._lock_for(session_id):
            session = self.load(session_id)
            yield session
            save_session(session, self._path(session_id))


class CreateSessionBody(BaseModel):
    prompt: str


class ExpandBody(BaseModel):
    char_start: int
    char_end: int
    mode: str
    novelty: float


def _public_node(node) -> dict:
    """Node payload for API responses: document fields minus the heavy pool."""
    data = node.to_dict()
    expansion = data.pop("expansion")
    if expansion is not None:
        data["request"] = expansion["request"]
        data["band_halfwidth"] = expansion["band_halfwidth"]
    else:
        data["request"] = None
    return data


def create_app(config: AppConfig | None = None, *, providers: Providers | None = None,
               store: SessionStore | None = None) -> FastAPI:
    config = config or AppConfig()

    lexicon_file = config.lexicon_path or bundled_lexicon_path()
    lexicon = load_lexicon(lexicon_file)
    annotator = partial(annotate_prompt, lexicon=lexicon)

    if providers is None:
        providers = build_providers(
            config.providers,
            seed=config.engine.seed or 0,
            images_dir=config.resolved_images_dir(),
        )
    if store is None:
        store = SessionStore(config.session_dir, annotator=annotator)
    elif store.annotator is None:
        store.annotator = annotator

    app = FastAPI(title="promptmap", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.config = config
    app.state.providers = providers
    app.state.store = store

    def _engine_seed() -> int:
        if config.engine.seed is not None:
            return config.engine.seed
        return secrets.randbits(32)

    @app.exception_handler(PromptMapError)
    async def _library_error(_, exc: PromptMapError):
        status = _STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(
            status_code=status,
            content={"code": exc.code, "message": exc.message, "retryable": exc.retryable},
        )

    @app.exception_handler(RequestValidationError)
    async def _body_error(_, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "validation", "message": str(exc.errors()), "retryable": False},
        )

    @app.post("/v1/sessions", status_code=201)
    def create_session_endpoint(body: CreateSessionBody):
        session_id, session = store.create(body.prompt)
        return {"session_id": session_id, "root": _public_node(session.root)}

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return store.load(session_id).to_document()

    @app.post("/v1/sessions/{session_id}/nodes/{node_id}/expand")
    def expand_node(session_id: str, node_id: int, body: ExpandBody):
        with store.mutate(session_id) as session:
            node = session.node(node_id)
            span = engine.SpanSelection.from_offsets(
                node.prompt_text, body.char_start, body.char_end
            )
            request = engine.ExpansionRequest(
                origin_prompt=node.prompt_text,
                span=span,
                mode=parse_mode(body.mode),
                novelty=body.novelty,
            )
            sset = engine.expand(request, providers, seed=_engine_seed(), config=config.engine)
            ids = session.attach_suggestions(node_id, sset)
            nodes = [_public_node(session.node(i)) for i in ids]
        return {"nodes": nodes, "band_halfwidth": sset.band_halfwidth}

    @app.post("/v1/sessions/{session_id}/nodes/{node_id}/images")
    def generate_images(session_id: str, node_id: int):
        with store.mutate(session_id) as session:
            node = session.node(node_id)
            if node.removed:
                raise InvalidStateError(f"node {node_id} was removed")
            response = providers.images.generate_images(
                ImageRequest(prompt=node.prompt_text, count=4, size=config.providers.image_size)
            )
            refs = [ImageRef(uri=uri, provider_meta=response.provider_meta)
                    for uri in response.uris]
            session.attach_images(node_id, refs)
            payload = [ref.to_dict() for ref in refs]
        return {"node_id": node_id, "images": payload}

    @app.delete("/v1/sessions/{session_id}/nodes/{node_id}")
    def remove_node(session_id: str, node_id: int):
        with store.mutate(session_id) as session:
            replacement_id = session.remove_suggestion(node_id)
            replacement = _public_node(session.node(replacement_id))
        return {"replacement": replacement}

    @app.post("/v1/sessions/{session_id}/nodes/{node_id}/branch")
    def branch_node(session_id: str, node_id: int):
        with store.mutate(session_id) as session:
            branch_id = session.promote_to_branch(node_id)
            node = _public_node(session.node(branch_id))
        return {"node": node}

    @app.get("/v1/sessions/{session_id}/metrics")
    def session_metrics(session_id: str):
        session = store.load(session_id)
        report = diversity_report(
            session.list_tried_prompts(),
            providers.embedder,
            origin=session.root.prompt_text,
        )
        return report.to_dict()

    return app
