"""Stateless JSON-over-HTTP service.

One immutable ontology per process; every layout or diff request carries the
full view state, so identical requests always produce byte-identical
responses. Handlers share the snapshot and per-property interest models, all
frozen after startup, which keeps concurrent requests safe without locks.
"""
from __future__ import annotations

import json
import threading
from dataclasses import asdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, unquote, urlsplit

from .compress import apply_overrides, detect_collapsible, mark_focus_interest, mark_interest
from .errors import (
    NoCommonAncestorError,
    OntoplotError,
    RootCollapseError,
    UnknownClassError,
    UnknownOccurrenceError,
    UnknownPropertyError,
)
from .hierarchy import QueryEngine, build_occurrence_tree
from .layout import (
    LayoutConfig,
    ViewState,
    compute_layout,
    diff_layouts,
    diff_to_wire,
    layout_to_wire,
    legend_to_wire,
)
from .model import OntologySnapshot, summarize

EXACT = "Exact"
PREFIX = "Prefix"
SUBSTRING = "Substring"
MAX_SEARCH_RESULTS = 50


def summary_to_wire(snapshot: OntologySnapshot) -> dict:
    stats = summarize(snapshot)
    return {
        "classCount": stats.class_count,
        "propertyCount": stats.property_count,
        "associationCount": stats.association_count,
        "perPropertyCounts": dict(stats.per_property_counts),
        "rootCount": stats.root_count,
        "maxDepth": stats.max_depth,
    }


def search(snapshot: OntologySnapshot, query: str, counts: dict[str, int] | None = None) -> list[dict]:
    """Case-insensitive label search ranked Exact < Prefix < Substring."""
    if not query:
        return []
    q = query.lower()
    ranked = []
    for ref in snapshot.classes:
        label = snapshot.label_of(ref.id)
        low = label.lower()
        if low == q:
            rank = EXACT
        elif low.startswith(q):
            rank = PREFIX
        elif q in low:
            rank = SUBSTRING
        else:
            continue
        ranked.append((rank, label, ref.id))
    order = {EXACT: 0, PREFIX: 1, SUBSTRING: 2}
    ranked.sort(key=lambda t: (order[t[0]], t[1], t[2]))
    counts = counts or {}
    return [
        {"classId": cid, "label": label, "rank": rank, "associationCount": counts.get(cid, 0)}
        for rank, label, cid in ranked[:MAX_SEARCH_RESULTS]
    ]


class ServiceError(Exception):
    def __init__(self, status: int, message: str, code: str):
        super().__init__(message)
        self.status = status
        self.code = code


_NOT_FOUND_ERRORS = (UnknownClassError, UnknownPropertyError, UnknownOccurrenceError)
_BAD_REQUEST_ERRORS = (RootCollapseError, UnknownOccurrenceError, NoCommonAncestorError)


class OntologyService:
    """Request-independent core; the HTTP handler is a thin byte shim on top."""

    def __init__(self, snapshot: OntologySnapshot, config: LayoutConfig | None = None):
        self.snapshot = snapshot
        self.config = config or LayoutConfig()
        self.tree = build_occurrence_tree(snapshot)
        self.engine = QueryEngine(snapshot)
        self._interest_lock = threading.Lock()
        self._interest_cache: dict[tuple[str, str | None], object] = {}

    def _interest(self, property_id: str, focus_class_id: str | None):
        key = (property_id, focus_class_id)
        with self._interest_lock:
            cached = self._interest_cache.get(key)
        if cached is not None:
            return cached
        if focus_class_id is None:
            model = mark_interest(self.snapshot, self.tree, property_id)
        else:
            model = mark_focus_interest(self.snapshot, self.tree, property_id, focus_class_id)
        with self._interest_lock:
            self._interest_cache[key] = model
        return model

    def _layout_for(self, view: ViewState):
        interest = self._interest(view.property_id, view.focus_class_id)
        plan = detect_collapsible(self.tree, interest)
        overrides = view.overrides_dict()
        if overrides:
            plan = apply_overrides(plan, self.tree, interest, overrides)
        return compute_layout(self.snapshot, self.tree, interest, plan, self.config, view)

    def handle(self, method: str, raw_path: str, body: bytes | None) -> tuple[int, dict | list]:
        try:
            return self._dispatch(method, raw_path, body)
        except ServiceError as exc:
            return exc.status, {"error": str(exc), "code": exc.code}
        except _NOT_FOUND_ERRORS as exc:
            status = 400 if isinstance(exc, _BAD_REQUEST_ERRORS) else 404
            return status, {"error": str(exc), "code": type(exc).__name__}
        except _BAD_REQUEST_ERRORS as exc:
            return 400, {"error": str(exc), "code": type(exc).__name__}
        except (ValueError, OntoplotError) as exc:
            return 400, {"error": str(exc), "code": type(exc).__name__}

    def _dispatch(self, method: str, raw_path: str, body: bytes | None) -> tuple[int, dict | list]:
        parts = urlsplit(raw_path)
        segments = [unquote(s) for s in parts.path.split("/") if s != ""]
        params = {k: v[-1] for k, v in parse_qs(parts.query).items()}

        if method == "GET":
            if segments == ["summary"]:
                return 200, summary_to_wire(self.snapshot)
            if segments == ["properties"]:
                return 200, self._properties()
            if len(segments) == 2 and segments[0] == "class":
                return 200, self._class_card(segments[1])
            if segments == ["search"]:
                return 200, self._search(params)
            if len(segments) == 2 and segments[0] == "query":
                return 200, self._query(segments[1], params)
        elif method == "POST":
            payload = self._json_body(body)
            if segments == ["layout"]:
                view = self._view_state(payload.get("viewState"))
                layout = self._layout_for(view)
                return 200, {"layout": layout_to_wire(layout), "legend": legend_to_wire(layout.legend)}
            if segments == ["layout-diff"]:
                prev = self._view_state(payload.get("prevViewState"))
                nxt = self._view_state(payload.get("nextViewState"))
                prev_layout = self._layout_for(prev)
                next_layout = self._layout_for(nxt)
                diff = diff_layouts(prev_layout, next_layout, self.tree, prev, nxt)
                return 200, {"diff": diff_to_wire(diff)}
        else:
            raise ServiceError(405, f"method {method} not allowed", "MethodNotAllowed")
        raise ServiceError(404, f"no such endpoint: {parts.path}", "NotFound")

    @staticmethod
    def _json_body(body: bytes | None) -> dict:
        if not body:
            raise ServiceError(400, "request body required", "BadRequest")
        try:
            payload = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ServiceError(400, f"invalid JSON body: {exc}", "BadRequest") from None
        if not isinstance(payload, dict):
            raise ServiceError(400, "request body must be a JSON object", "BadRequest")
        return payload

    def _view_state(self, data) -> ViewState:
        if not isinstance(data, dict):
            raise ServiceError(400, "missing viewState object", "BadRequest")
        try:
            view = ViewState.from_wire(data)
        except (ValueError, TypeError) as exc:
            raise ServiceError(400, f"bad viewState: {exc}", "BadRequest") from None
        if view.property_id not in self.snapshot.property_ids():
            raise UnknownPropertyError(view.property_id)
        return view

    def _properties(self) -> list[dict]:
        counts: dict[str, int] = {p.id: 0 for p in self.snapshot.properties}
        for a in self.snapshot.associations:
            counts[a.property] = counts.get(a.property, 0) + 1
        rows = [
            {"id": p.id, "label": p.label or p.id, "associationCount": counts.get(p.id, 0)}
            for p in self.snapshot.properties
        ]
        rows.sort(key=lambda r: (-r["associationCount"], r["id"]))
        return rows

    def _class_card(self, class_id: str) -> dict:
        if class_id not in self.snapshot.class_ids():
            raise UnknownClassError(class_id)
        assocs = [
            {"property": a.property, "source": a.source, "target": a.target}
            for a in self.snapshot.associations
            if a.source == class_id or a.target == class_id
        ]
        return {
            "id": class_id,
            "label": self.snapshot.label_of(class_id),
            "parents": self.engine.parents_of(class_id),
            "children": self.engine.children_of(class_id),
            "associations": assocs,
        }

    def _search(self, params: dict) -> list[dict]:
        q = params.get("q", "")
        prop = params.get("property")
        counts: dict[str, int] = {}
        if prop:
            if prop not in self.snapshot.property_ids():
                raise UnknownPropertyError(prop)
            for a in self.snapshot.associations:
                if a.property != prop:
                    continue
                counts[a.source] = counts.get(a.source, 0) + 1
                if a.target != a.source:
                    counts[a.target] = counts.get(a.target, 0) + 1
        return search(self.snapshot, q, counts)

    def _query(self, subcommand: str, params: dict) -> dict:
        eng = self.engine

        def need(name: str) -> str:
            v = params.get(name)
            if not v:
                raise ServiceError(400, f"query parameter '{name}' is required", "BadRequest")
            return v

        if subcommand == "parents":
            return {"classes": eng.parents_of(need("class"))}
        if subcommand == "children":
            return {"classes": eng.children_of(need("class"))}
        if subcommand == "siblings":
            return {"classes": eng.siblings_of(need("class"))}
        if subcommand == "path":
            return {"paths": [list(p) for p in eng.paths_to_root(need("class"))]}
        if subcommand == "lca":
            classes, dist = eng.closest_common_ancestors(need("a"), need("b"))
            return {"classes": classes, "distance": dist}
        if subcommand == "assoc":
            direction = params.get("direction", "both")
            return {"classes": eng.associated_classes(need("class"), need("property"), direction)}
        if subcommand == "count":
            direction = params.get("direction", "both")
            return {"count": eng.association_count(need("class"), need("property"), direction)}
        if subcommand == "max":
            classes, count = eng.max_association_classes(need("property"))
            return {"classes": classes, "count": count}
        if subcommand == "class-effect":
            transitive = params.get("transitive", "").lower() in ("1", "true", "yes")
            report = eng.class_effect(
                need("class"), need("property"), target=params.get("target"), transitive=transitive
            )
            out = asdict(report)
            out["covered"] = list(report.covered)
            return out
        if subcommand == "most-children":
            classes, count = eng.most_associated_children(need("property"), need("target"))
            return {"classes": classes, "count": count}
        if subcommand == "outliers":
            return {"classes": eng.sibling_outliers(need("property"), need("target"))}
        raise ServiceError(404, f"unknown query subcommand: {subcommand}", "NotFound")


def encode_response(payload: dict | list) -> bytes:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":")).encode("utf-8")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    service: OntologyService

    def log_message(self, fmt, *args):  # pragma: no cover
        pass

    def _respond(self, status: int, payload: dict | list) -> None:
        data = encode_response(payload)
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        status, payload = self.service.handle("GET", self.path, None)
        self._respond(status, payload)

    def do_POST(self):
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else b""
        status, payload = self.service.handle("POST", self.path, body)
        self._respond(status, payload)

    def do_OPTIONS(self):  # pragma: no cover
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()


def make_server(snapshot: OntologySnapshot, port: int, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    service = OntologyService(snapshot)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve(snapshot: OntologySnapshot, port: int, host: str = "127.0.0.1") -> None:  # pragma: no cover
    httpd = make_server(snapshot, port, host)
    try:
        httpd.serve_forever()
    finally:
        httpd.server_close()
