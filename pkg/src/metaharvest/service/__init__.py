"""HTTP service: JSON search API, record detail, RSS, OpenSearch
description, the OAI-PMH provider endpoint and a health probe.

Handlers are stateless over index/store snapshots; all parameter validation
is done by hand so malformed input always yields a 4xx with a machine
readable ``{"error": ..., "position"?: ...}`` body, never a 500.
"""

from __future__ import annotations

import json
import logging
import time
from contextlib import asynccontextmanager
from datetime import date, datetime, timezone
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..harvest import Harvester, HarvestScheduler
from ..index import (
    IndexedField,
    MatchAll,
    PageOutOfRange,
    PureNegativeQuery,
    Query,
    QuerySyntaxError,
    SearchIndex,
    SpatialRelation,
    UnknownField,
    parse_query,
)
from ..model import GeoBoundingBox, ModelError, format_datestamp, record_to_json
from ..oaipmh import OaiServer, OaiServerConfig, serialize_response
from ..store import RecordStore
from .config import ServiceConfig
from .feeds import opensearch_description, rss_feed

access_log = logging.getLogger("metaharvest.access")

RSS_MAX_ITEMS = 50
API_MAX_SIZE = 100

_FACETABLE = {"source", "schema", "keywords"}
_RELATIONS = {r.value: r for r in SpatialRelation}


class BadParameter(Exception):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position

    def body(self) -> dict:
        doc = {"error": str(self)}
        if self.position is not None:
            doc["position"] = self.position
        return doc


def _parse_bbox(raw: str) -> GeoBoundingBox:
    parts = raw.split(",")
    if len(parts) != 4:
        raise BadParameter(f"bbox needs W,S,E,N (got {len(parts)} values)")
    try:
        west, south, east, north = (float(p) for p in parts)
    except ValueError:
        raise BadParameter("bbox values must be numbers") from None
    try:
        return GeoBoundingBox(west=west, east=east, south=south, north=north)
    except ModelError as exc:
        raise BadParameter(f"CoordinateOutOfRange: {exc}") from exc


def _parse_date(raw: str, name: str) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise BadParameter(f"InvalidDate: {name} must be an ISO 8601 date") from None


def _parse_int(raw: str, name: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise BadParameter(f"{name} must be an integer") from None


def build_query(params) -> Query:
    """Shared parameter handling for /api/search and /rss."""
    q = (params.get("q") or "").strip()
    if q:
        try:
            query = parse_query(q)
        except QuerySyntaxError as exc:
            raise BadParameter(f"SyntaxError: {exc}", position=exc.position) from exc
        except UnknownField as exc:
            raise BadParameter(f"UnknownField: {exc}") from exc
        except PureNegativeQuery as exc:
            raise BadParameter(f"PureNegativeQuery: {exc}") from exc
    else:
        query = Query(ast=MatchAll())

    spatial = None
    if params.get("bbox"):
        bbox = _parse_bbox(params["bbox"])
        rel_raw = (params.get("spatial_rel") or "intersects").lower()
        if rel_raw not in _RELATIONS:
            raise BadParameter(
                f"spatial_rel must be one of {', '.join(sorted(_RELATIONS))}"
            )
        spatial = (bbox, _RELATIONS[rel_raw])
    elif params.get("spatial_rel"):
        raise BadParameter("spatial_rel requires bbox")

    start = _parse_date(params["start"], "start") if params.get("start") else None
    end = _parse_date(params["end"], "end") if params.get("end") else None
    if start is not None and end is not None and start > end:
        raise BadParameter("InvalidDate: start is after end")
    temporal = (start, end) if (start is not None or end is not None) else None

    return Query(ast=query.ast, spatial=spatial, temporal=temporal)


def _parse_facets(raw: str | None) -> tuple[IndexedField, ...]:
    if not raw:
        return ()
    fields = []
    for name in raw.split(","):
        name = name.strip().lower()
        if not name:
            continue
        if name not in _FACETABLE:
            raise BadParameter(f"UnknownField: facet field {name!r} not facetable")
        fields.append(IndexedField(name))
    return tuple(fields)


def _hit_json(hit) -> dict:
    record = hit.record
    doc = record_to_json(record, include_raw=False)
    return {
        "id": hit.identifier,
        "title": record.title,
        "abstract_snippet": hit.snippet,
        "source": record.source_id,
        "schema": record.schema.value,
        "bbox": doc["bbox"],
        "temporal": doc["temporal"],
        "datestamp": doc["datestamp"],
        "score": hit.score,
        "data_urls": list(record.data_urls),
    }


def create_app(
    config: ServiceConfig,
    store: RecordStore,
    index: SearchIndex,
    harvester: Harvester | None = None,
    scheduler: HarvestScheduler | None = None,
) -> FastAPI:
    oai_server = OaiServer(
        OaiServerConfig(
            repository_name=config.repository_name,
            base_url=f"{config.base_url.rstrip('/')}/oai",
            admin_email=config.admin_email,
            page_size=config.oai_page_size,
            collections=config.collections,
        ),
        store.view,
    )

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if scheduler is not None:
            scheduler.stop()
        store.close()

    app = FastAPI(title=config.repository_name, lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"]
    )
    app.state.config = config
    app.state.store = store
    app.state.index = index
    app.state.harvester = harvester
    app.state.oai_server = oai_server

    @app.middleware("http")
    async def request_logging(request: Request, call_next):
        started = time.perf_counter()
        response = await call_next(request)
        access_log.info(
            "%s",
            json.dumps(
                {
                    "ts": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                    "method": request.method,
                    "path": request.url.path,
                    "query": str(request.url.query),
                    "status": response.status_code,
                    "duration_ms": round((time.perf_counter() - started) * 1000, 2),
                },
                separators=(",", ":"),
            ),
        )
        return response

    @app.get("/api/search")
    def api_search(
        request: Request,
        q: Optional[str] = None,
        bbox: Optional[str] = None,
        spatial_rel: Optional[str] = None,
        start: Optional[str] = None,
        end: Optional[str] = None,
        page: str = "0",
        size: Optional[str] = None,
        facets: Optional[str] = None,
    ):
        try:
            query = build_query(request.query_params)
            page_num = _parse_int(page, "page")
            size_num = _parse_int(size, "size") if size is not None else config.page_size
            if not 1 <= size_num <= API_MAX_SIZE:
                raise BadParameter(f"size must be between 1 and {API_MAX_SIZE}")
            if page_num < 0:
                raise BadParameter("page must be >= 0")
            facet_fields = _parse_facets(facets)
            result = index.search(query, page=page_num, page_size=size_num, facet_fields=facet_fields)
        except BadParameter as exc:
            return JSONResponse(status_code=400, content=exc.body())
        except PageOutOfRange as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return {
            "total": result.total_hits,
            "page": page_num,
            "size": size_num,
            "hits": [_hit_json(h) for h in result.hits],
            "facets": {
                name: [{"value": fc.value, "count": fc.count} for fc in counts]
                for name, counts in result.facets.items()
            },
        }

    @app.get("/api/records/{identifier:path}")
    def api_record(identifier: str):
        record = store.get(identifier)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "not found"})
        if record.deleted:
            return JSONResponse(
                status_code=404,
                content={"error": "record deleted", "deleted": True, "id": identifier},
            )
        doc = record_to_json(record, include_raw=False)
        doc["id"] = doc.pop("identifier")
        doc["has_raw_document"] = bool(record.raw_document)
        return doc

    @app.get("/rss")
    def rss(request: Request):
        try:
            query = build_query(request.query_params)
        except BadParameter as exc:
            return JSONResponse(status_code=400, content=exc.body())
        records = index.match_records(query)
        records.sort(key=lambda r: r.identifier)
        records.sort(key=lambda r: r.datestamp, reverse=True)
        body = rss_feed(
            config.repository_name,
            config.base_url.rstrip("/"),
            (request.query_params.get("q") or "").strip(),
            records[:RSS_MAX_ITEMS],
        )
        return Response(content=body, media_type="application/rss+xml")

    @app.get("/opensearch.xml")
    def opensearch():
        body = opensearch_description(
            config.repository_name, config.short_name, config.base_url.rstrip("/")
        )
        return Response(content=body, media_type="application/opensearchdescription+xml")

    @app.get("/oai")
    @app.post("/oai")
    async def oai(request: Request):
        pairs = list(request.query_params.multi_items())
        if request.method == "POST":
            form = await request.form()
            pairs.extend((k, str(v)) for k, v in form.multi_items())
        response = oai_server.handle_request(pairs)
        return Response(
            content=serialize_response(oai_server, response), media_type="text/xml"
        )

    @app.get("/healthz")
    def healthz():
        if not store.writable():
            return JSONResponse(
                status_code=503, content={"status": "unwritable record store"}
            )
        last = {}
        if harvester is not None:
            for source in config.sources:
                state = harvester.states.get(source.source_id)
                report = harvester.last_reports.get(source.source_id)
                last[source.source_id] = {
                    "last_success": format_datestamp(state.last_success)
                    if state and state.last_success
                    else None,
                    "last_report": report.to_json() if report else None,
                }
        return {
            "status": "ok",
            "record_count": store.live_count(),
            "last_harvest": last,
        }

    if config.ui_dir is not None and config.ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app
