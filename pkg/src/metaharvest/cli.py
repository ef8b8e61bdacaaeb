"""Operator command line: harvest, search, crosswalk, serve, federation.

Exit codes: 0 success, 1 runtime failure (unreachable provider, occupied
port), 2 usage or input error (unknown source, bad query syntax, missing
config). Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path

import click

from . import crosswalk
from .federation import (
    EmptyFederation,
    FederationSourceStats,
    composite_uptime,
    federated_latency,
    simulate_availability,
)
from .harvest import Harvester, HarvestMode, HarvestScheduler, SourceUnavailable
from .index import (
    PureNegativeQuery,
    QuerySyntaxError,
    SearchIndex,
    UnknownField,
)
from .model import record_to_json
from .service import BadParameter, build_query, create_app
from .service.config import ConfigError, load_config
from .store import RecordStore


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_config(path: str | None):
    try:
        return load_config(path)
    except ConfigError as exc:
        _fail(str(exc), 2)


def _open_index(store: RecordStore) -> SearchIndex:
    index = SearchIndex()
    for record in store.live_records():
        index.upsert(record)
    return index


@click.group()
def main() -> None:
    """Metadata harvesting, indexing and search toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Config file path")
@click.option("--source", "source_id", required=True, help="source_id from the config")
@click.option("--full", is_flag=True, help="Full harvest (default: incremental)")
def harvest(config_path: str | None, source_id: str, full: bool) -> None:
    """Run one harvest and print its report as JSON."""
    config = _load_config(config_path)
    source = next((s for s in config.sources if s.source_id == source_id), None)
    if source is None:
        _fail(f"unknown source id {source_id!r}", 2)
    store = RecordStore(config.record_store_dir)
    index = _open_index(store)
    harvester = Harvester(store, index, config.harvest_state_path, config.audit_log_path)
    mode = HarvestMode.FULL if full else HarvestMode.INCREMENTAL
    try:
        report = harvester.harvest(source, mode)
    except SourceUnavailable as exc:
        if exc.report is not None:
            click.echo(json.dumps(exc.report.to_json(), indent=2))
        _fail(f"source unavailable: {exc}", 1)
    click.echo(json.dumps(report.to_json(), indent=2))


@main.command()
@click.argument("query")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--bbox", default=None, help="W,S,E,N bounding box filter")
@click.option("--spatial-rel", default="intersects", show_default=True)
@click.option("--start", default=None, help="ISO date, temporal filter start")
@click.option("--end", default=None, help="ISO date, temporal filter end")
@click.option("--page", default=0, show_default=True)
@click.option("--size", default=10, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Print the full JSON result")
def search(
    query: str,
    config_path: str | None,
    bbox: str | None,
    spatial_rel: str,
    start: str | None,
    end: str | None,
    page: int,
    size: int,
    as_json: bool,
) -> None:
    """One-shot search against the local record store."""
    config = _load_config(config_path)
    params = {"q": query, "bbox": bbox, "spatial_rel": bbox and spatial_rel,
              "start": start, "end": end}
    try:
        parsed = build_query({k: v for k, v in params.items() if v})
    except BadParameter as exc:
        _fail(str(exc), 2)
    except (QuerySyntaxError, UnknownField, PureNegativeQuery) as exc:
        _fail(str(exc), 2)

    store = RecordStore(config.record_store_dir)
    index = _open_index(store)
    result = index.search(parsed, page=page, page_size=size)
    if as_json:
        payload = {
            "total": result.total_hits,
            "hits": [
                {
                    "id": h.identifier,
                    "score": h.score,
                    "title": h.title,
                    "snippet": h.snippet,
                }
                for h in result.hits
            ],
        }
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(f"{result.total_hits} hit(s)")
        for hit in result.hits:
            click.echo(f"{hit.score:10.4f}  {hit.identifier}  {hit.title}")


@main.command("crosswalk")
@click.argument("xml_file", type=click.Path(path_type=Path))
@click.option("--source-id", default="local", show_default=True)
def crosswalk_cmd(xml_file: Path, source_id: str) -> None:
    """Detect the metadata standard of a file and print the unified record."""
    try:
        document = xml_file.read_bytes()
    except OSError as exc:
        _fail(str(exc), 2)
    try:
        schema = crosswalk.detect_schema(document)
        record = crosswalk.parse(schema, document, source_id)
    except (
        crosswalk.MalformedXml,
        crosswalk.UnknownSchema,
        crosswalk.MissingRequiredField,
        crosswalk.CoordinateOutOfRange,
        crosswalk.InvalidDate,
    ) as exc:
        _fail(f"{type(exc).__name__}: {exc}", 2)
    doc = record_to_json(record, include_raw=False)
    doc["schema"] = record.schema.value
    click.echo(json.dumps(doc, indent=2, ensure_ascii=False))


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
def serve(config_path: str | None) -> None:
    """Start the search service with its harvest scheduler."""
    import uvicorn

    config = _load_config(config_path)
    try:
        config.check_writable()
    except ConfigError as exc:
        _fail(str(exc), 2)

    # surface an occupied port before uvicorn swallows the error
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.bind, config.port))
    except OSError as exc:
        _fail(f"cannot bind {config.bind}:{config.port}: {exc}", 1)
    finally:
        probe.close()

    store = RecordStore(config.record_store_dir)
    index = _open_index(store)
    harvester = Harvester(store, index, config.harvest_state_path, config.audit_log_path)

    def run_source(source) -> None:
        harvester.harvest(source, HarvestMode.INCREMENTAL)

    scheduler = HarvestScheduler(config.sources, run_source)
    app = create_app(config, store, index, harvester, scheduler)

    import threading

    threading.Thread(target=scheduler.run_forever, daemon=True).start()
    try:
        uvicorn.run(app, host=config.bind, port=config.port, log_config=None)
    finally:
        scheduler.stop()


@main.command()
@click.argument("stats_file", type=click.Path(path_type=Path))
@click.option("--processing", default=0.0, show_default=True, help="Integration overhead (ms)")
@click.option("--trials", default=0, help="Also run a Monte Carlo check with this many trials")
@click.option("--seed", default=0, show_default=True)
def federation(stats_file: Path, processing: float, trials: int, seed: int) -> None:
    """Composite uptime and federated latency for a repository list."""
    try:
        raw = json.loads(stats_file.read_text(encoding="utf-8"))
        sources = [
            FederationSourceStats(
                uptime=float(doc["uptime"]),
                latency_ms=float(doc.get("latency_ms", doc.get("latency", 0.0))),
            )
            for doc in raw
        ]
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        _fail(f"unreadable stats file: {exc}", 2)

    out: dict = {"composite_uptime": composite_uptime(sources)}
    try:
        out["federated_latency_ms"] = federated_latency(sources, processing)
    except EmptyFederation:
        out["federated_latency_ms"] = None
    if trials:
        out["simulated_uptime"] = simulate_availability(sources, trials, seed)
    click.echo(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
