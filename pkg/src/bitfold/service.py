"""HTTP facade for the selection wizard.

Serves per-step checkbox lists, folds submitted items into bitmaps
server-side, and exposes reports, over either backend. The hierarchy is
parsed once at startup and cached in memory (it is the lookup data); the
store serializes writes per person.

Routes (all JSON):
    POST /api/persons                       {"name": ...} -> {"id", "name"}
    GET  /api/hierarchy                     hierarchy summary
    GET  /api/persons/{id}/checkboxes?path= step items
    PUT  /api/persons/{id}/checkboxes?path= submit items, returns next steps
    GET  /api/persons/{id}/report           frontier rows
    GET  /api/persons/{id}/record           raw bitmaps (debug)

The reserved path "~reasons" addresses the reasons domain through the same
checkbox routes.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .hierarchy import (
    Hierarchy,
    LeafPathError,
    REASONS_PATH,
    UnknownPathError,
    parent_path,
    parse_hierarchy,
)
from .selection import (
    CheckBoxListItem,
    DomainError,
    InvalidRecordError,
    OrphanStepError,
    SelectionRecord,
    apply_reasons_update,
    apply_update,
    reason_items,
    to_checkbox_items,
    validate_record,
)
from .storage import BACKENDS, UnknownPersonError, create_backend, open_store

DEFAULT_LISTEN = "127.0.0.1:8000"


@dataclass
class ServiceConfig:
    hierarchy_path: str
    store_dsn: str = ":memory:"
    listen_address: str = DEFAULT_LISTEN
    backend: str = "pbfd"
    static_dir: str | None = None  # optional built wizard bundle, mounted at /ui

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        values = {
            "hierarchy_path": os.environ.get("BITFOLD_HIERARCHY", "places.json"),
            "store_dsn": os.environ.get("BITFOLD_DSN", ":memory:"),
            "listen_address": os.environ.get("BITFOLD_LISTEN", DEFAULT_LISTEN),
            "backend": os.environ.get("BITFOLD_BACKEND", "pbfd"),
            "static_dir": os.environ.get("BITFOLD_STATIC"),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def validate(self) -> None:
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}; expected one of {sorted(BACKENDS)}")


class CheckBoxItemIn(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    id: int
    description: str = ""
    is_checked: bool = Field(default=False, alias="isChecked")
    css_class: str = Field(default="", alias="class")

    def to_item(self) -> CheckBoxListItem:
        return CheckBoxListItem(
            id=self.id,
            description=self.description,
            is_checked=self.is_checked,
            css_class=self.css_class,
        )


def _hierarchy_summary(h: Hierarchy) -> dict:
    vertices = []
    for v in h.internal_vertices_bfs():
        vertices.append(
            {
                "path": v.path,
                "name": v.name,
                "stepLabel": v.step_label,
                "levelLabels": h.step_labels_below(v.path),
                "domainMask": v.domain_mask,
                "children": [
                    {
                        "path": c.path,
                        "name": c.name,
                        "id": c.bit_id,
                        "internal": c.is_internal,
                    }
                    for c in v.children
                ],
            }
        )
    return {
        "maxDepth": h.max_depth,
        "vertexCount": h.vertex_count,
        "reasons": [{"id": bit, "name": name} for bit, name in h.reasons],
        "reasonsMask": h.reasons_mask,
        "vertices": vertices,
    }


def create_app(config: ServiceConfig) -> FastAPI:
    config.validate()
    with open(config.hierarchy_path, encoding="utf-8") as f:
        hierarchy = parse_hierarchy(f.read())
    store = open_store(config.store_dsn)
    backend = create_backend(config.backend, store, hierarchy)
    app = build_app(hierarchy, backend)
    if config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.static_dir, html=True), name="ui")
    return app


def build_app(hierarchy: Hierarchy, backend) -> FastAPI:
    """Wire routes around an already-initialized backend (test entry point)."""
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="bitfold", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.hierarchy = hierarchy
    app.state.backend = backend
    h = hierarchy

    def error(status: int, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.exception_handler(UnknownPersonError)
    @app.exception_handler(UnknownPathError)
    @app.exception_handler(LeafPathError)
    async def not_found(request: Request, exc: Exception):
        return error(404, exc)

    @app.exception_handler(OrphanStepError)
    async def orphan(request: Request, exc: Exception):
        return error(409, exc)

    @app.exception_handler(DomainError)
    async def out_of_domain(request: Request, exc: Exception):
        return error(400, exc)

    @app.exception_handler(InvalidRecordError)
    async def invalid_record(request: Request, exc: Exception):
        return error(422, exc)

    def load(person: int) -> SelectionRecord:
        return backend.load_record(person)

    def guard_step(record: SelectionRecord, path: str) -> None:
        vertex = h.vertex(path)
        if not vertex.is_internal:
            raise LeafPathError(path)
        if path and not record.bitmap_at(parent_path(path)) & vertex.bit_id:
            raise OrphanStepError(path)

    @app.post("/api/persons", status_code=201)
    async def create_person(body: dict):
        name = body.get("name", "")
        if not isinstance(name, str) or not name:
            return error(400, ValueError("person name must be non-empty"))
        person = backend.create_person(name)
        return {"id": person, "name": name}

    @app.get("/api/hierarchy")
    async def get_hierarchy():
        return _hierarchy_summary(h)

    @app.get("/api/persons/{person}/checkboxes")
    async def get_checkboxes(person: int, path: str = ""):
        record = load(person)
        if path == REASONS_PATH:
            items = reason_items(h, record.reasons)
        else:
            guard_step(record, path)
            items = to_checkbox_items(h.vertex(path), record.bitmap_at(path))
        return [item.to_wire() for item in items]

    @app.put("/api/persons/{person}/checkboxes")
    async def put_checkboxes(person: int, body: list[CheckBoxItemIn], path: str = ""):
        record = load(person)
        items = [entry.to_item() for entry in body]
        if path == REASONS_PATH:
            updated = apply_reasons_update(record, h, items)
            backend.save_record(person, updated)
            return {"path": path, "bitmap": updated.reasons, "nextSteps": []}
        updated = apply_update(record, h, path, items)
        violations = validate_record(updated, h)
        if violations:
            raise InvalidRecordError(violations)
        backend.save_record(person, updated)
        bitmap = updated.bitmap_at(path)
        next_steps = [
            c.path
            for c in h.vertex(path).children
            if c.is_internal and bitmap & c.bit_id
        ]
        return {"path": path, "bitmap": bitmap, "nextSteps": next_steps}

    @app.get("/api/persons/{person}/report")
    async def get_report(person: int):
        rows = backend.report(person)
        return {
            "depth": h.max_depth,
            "rows": [list(row.cells) for row in rows],
        }

    @app.get("/api/persons/{person}/record")
    async def get_record(person: int):
        record = load(person)
        return {
            "personId": person,
            "bitmaps": dict(sorted(record.bitmaps.items())),
            "reasons": record.reasons,
        }

    return app
