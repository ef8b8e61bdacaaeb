"""Harvesting engine: pulls metadata from configured sources into the record
store and search index, incrementally where the source allows it.

Change detection is fingerprint-based: a record whose content digest matches
what we already hold is counted unchanged and the index is left untouched.
Incremental OAI harvests request ``from = high_watermark`` (inclusive, so the
boundary second is re-fetched and deduplicated); directory sources re-read
files modified after the last successful run. Watermarks come from provider
datestamps, never the local clock.
"""

from __future__ import annotations

import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable
from urllib.parse import urljoin, urlparse

import httpx

from . import crosswalk
from .index import SearchIndex
from .model import (
    MetadataRecord,
    fingerprint,
    format_datestamp,
    parse_datestamp,
    qualify_identifier,
)
from .oaipmh.client import (
    HarvestedItem,
    MalformedResponse,
    OaiClient,
    OaiProtocolError,
    RecordHeader,
    TransportError,
)
from .store import RecordStore

log = logging.getLogger("metaharvest.harvest")

MIN_INTERVAL_SECONDS = 60
FAILURE_RATIO_LIMIT = 0.5  # a mostly-failing harvest keeps its old watermark

_PARSE_ERRORS = (
    crosswalk.MalformedXml,
    crosswalk.UnknownSchema,
    crosswalk.MissingRequiredField,
    crosswalk.CoordinateOutOfRange,
    crosswalk.InvalidDate,
)


class SourceKind(Enum):
    OAI_PMH = "oaipmh"
    DIRECTORY = "directory"
    HTTP_LISTING = "http_listing"


class HarvestMode(Enum):
    FULL = "full"
    INCREMENTAL = "incremental"


class SourceUnavailable(Exception):
    """The source could not be (fully) read; already-applied records stay."""

    def __init__(self, message: str, report: "HarvestReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class SourceDescriptor:
    source_id: str
    kind: SourceKind
    location: str
    metadata_prefix: str | None = None
    set_spec: str | None = None
    interval_seconds: int = 300
    enabled: bool = True

    def __post_init__(self) -> None:
        if not self.source_id:
            raise ValueError("source_id must be non-empty")
        if self.interval_seconds < MIN_INTERVAL_SECONDS:
            raise ValueError(
                f"interval {self.interval_seconds}s below minimum {MIN_INTERVAL_SECONDS}s"
            )


@dataclass
class HarvestState:
    source_id: str
    last_success: datetime | None = None
    high_watermark: datetime | None = None
    known: dict[str, str] = field(default_factory=dict)  # identifier -> fingerprint hex
    consecutive_failures: int = 0

    def to_json(self) -> dict:
        return {
            "source_id": self.source_id,
            "last_success": format_datestamp(self.last_success) if self.last_success else None,
            "high_watermark": format_datestamp(self.high_watermark)
            if self.high_watermark
            else None,
            "known": dict(self.known),
            "consecutive_failures": self.consecutive_failures,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "HarvestState":
        return cls(
            source_id=doc["source_id"],
            last_success=parse_datestamp(doc["last_success"]) if doc.get("last_success") else None,
            high_watermark=parse_datestamp(doc["high_watermark"])
            if doc.get("high_watermark")
            else None,
            known=dict(doc.get("known", {})),
            consecutive_failures=int(doc.get("consecutive_failures", 0)),
        )


@dataclass
class HarvestReport:
    """Outcome counts for one harvest run.

    fetched = added + updated + unchanged + deleted + failed. Records removed
    because a Full harvest found them absent from the provider count toward
    both fetched and deleted: the absence observation is the fetch.
    """

    source_id: str
    mode: str
    started: datetime
    finished: datetime | None = None
    fetched: int = 0
    added: int = 0
    updated: int = 0
    unchanged: int = 0
    deleted: int = 0
    failed: int = 0
    errors: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "source_id": self.source_id,
            "mode": self.mode,
            "started": format_datestamp(self.started),
            "finished": format_datestamp(self.finished) if self.finished else None,
            "fetched": self.fetched,
            "added": self.added,
            "updated": self.updated,
            "unchanged": self.unchanged,
            "deleted": self.deleted,
            "failed": self.failed,
            "errors": list(self.errors),
        }


def load_states(path: Path) -> dict[str, HarvestState]:
    if not path.exists():
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return {sid: HarvestState.from_json(doc) for sid, doc in data.items()}


def save_states(path: Path, states: dict[str, HarvestState]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump({sid: st.to_json() for sid, st in states.items()}, fh, indent=1)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Source readers: each yields HarvestedItem streams so one processing loop
# serves OAI endpoints, directory trees and HTTP listings alike.
# ---------------------------------------------------------------------------


def _read_oai(
    source: SourceDescriptor,
    state: HarvestState,
    mode: HarvestMode,
    client: OaiClient,
) -> Iterable[HarvestedItem]:
    from_ = None
    if mode is HarvestMode.INCREMENTAL and state.high_watermark is not None:
        from_ = format_datestamp(state.high_watermark)
    return client.list_records(
        metadata_prefix=source.metadata_prefix or "oai_dc",
        from_=from_,
        set_spec=source.set_spec,
    )


def _read_directory(
    source: SourceDescriptor, state: HarvestState, mode: HarvestMode
) -> Iterable[HarvestedItem]:
    base = Path(source.location)
    if not base.is_dir():
        raise SourceUnavailable(f"{source.location} is not a readable directory")
    cutoff = None
    if mode is HarvestMode.INCREMENTAL and state.last_success is not None:
        cutoff = state.last_success
    for path in sorted(base.rglob("*.xml")):
        mtime = datetime.fromtimestamp(int(path.stat().st_mtime), tz=timezone.utc)
        if cutoff is not None and mtime <= cutoff:
            continue
        local_id = path.relative_to(base).as_posix()
        header = RecordHeader(
            identifier=local_id, datestamp=mtime, deleted=False, sets=()
        )
        yield HarvestedItem(header=header, document=path.read_bytes())


_HREF_XML = re.compile(r'href="([^"]+\.xml)"', re.IGNORECASE)


def _read_http_listing(
    source: SourceDescriptor, http: httpx.Client
) -> Iterable[HarvestedItem]:
    # listings carry no usable change signal, so every file is fetched and
    # fingerprinting sorts added/updated/unchanged afterwards
    try:
        listing = http.get(source.location)
        listing.raise_for_status()
    except httpx.HTTPError as exc:
        raise SourceUnavailable(f"listing fetch failed: {exc}") from exc
    for href in _HREF_XML.findall(listing.text):
        url = urljoin(source.location, href)
        try:
            resp = http.get(url)
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise SourceUnavailable(f"file fetch failed for {url}: {exc}") from exc
        modified = resp.headers.get("Last-Modified")
        if modified:
            try:
                mtime = datetime.strptime(modified, "%a, %d %b %Y %H:%M:%S %Z").replace(
                    tzinfo=timezone.utc
                )
            except ValueError:
                mtime = datetime.now(timezone.utc).replace(microsecond=0)
        else:
            mtime = datetime.now(timezone.utc).replace(microsecond=0)
        local_id = urlparse(url).path.lstrip("/")
        header = RecordHeader(
            identifier=local_id, datestamp=mtime, deleted=False, sets=()
        )
        yield HarvestedItem(header=header, document=resp.content)


# ---------------------------------------------------------------------------
# The harvest itself
# ---------------------------------------------------------------------------


def run_harvest(
    source: SourceDescriptor,
    state: HarvestState,
    mode: HarvestMode,
    store: RecordStore,
    index: SearchIndex,
    *,
    client: OaiClient | None = None,
    http: httpx.Client | None = None,
    now: Callable[[], datetime] | None = None,
) -> tuple[HarvestReport, HarvestState]:
    """Run one harvest, applying each record to store and index as it
    arrives. Raises SourceUnavailable when the source cannot be read; records
    applied before the failure stay applied, and the watermark does not move.
    """
    if not source.enabled:
        raise ValueError(f"source {source.source_id} is disabled")
    now = now or (lambda: datetime.now(timezone.utc).replace(microsecond=0))
    report = HarvestReport(source_id=source.source_id, mode=mode.value, started=now())
    new_state = HarvestState(
        source_id=state.source_id,
        last_success=state.last_success,
        high_watermark=state.high_watermark,
        known=dict(state.known),
        consecutive_failures=state.consecutive_failures,
    )

    own_client = None
    own_http = None
    try:
        if source.kind is SourceKind.OAI_PMH:
            if client is None:
                client = own_client = OaiClient(source.location, http=http)
            items = _read_oai(source, new_state, mode, client)
        elif source.kind is SourceKind.DIRECTORY:
            items = _read_directory(source, new_state, mode)
        elif source.kind is SourceKind.HTTP_LISTING:
            if http is None:
                http = own_http = httpx.Client(timeout=30.0)
            items = _read_http_listing(source, http)
        else:
            raise AssertionError(f"unhandled source kind {source.kind}")

        seen: set[str] = set()
        max_stamp = new_state.high_watermark
        try:
            for item in items:
                report.fetched += 1
                identifier = qualify_identifier(source.source_id, item.header.identifier)
                seen.add(identifier)
                if max_stamp is None or item.header.datestamp > max_stamp:
                    max_stamp = item.header.datestamp
                if item.header.deleted:
                    _apply_deletion(store, index, new_state, identifier, item.header.datestamp)
                    report.deleted += 1
                    continue
                try:
                    record = _to_record(source, item, identifier)
                except _PARSE_ERRORS as exc:
                    report.failed += 1
                    report.errors.append(f"{identifier}: {type(exc).__name__}: {exc}")
                    continue
                digest = fingerprint(record).hex
                previous = new_state.known.get(identifier)
                if previous is None:
                    report.added += 1
                elif previous != digest:
                    report.updated += 1
                else:
                    report.unchanged += 1
                    continue
                store.apply(record)
                index.upsert(record)
                new_state.known[identifier] = digest
        except (TransportError, MalformedResponse, OaiProtocolError) as exc:
            raise SourceUnavailable(str(exc), report) from exc

        if mode is HarvestMode.FULL:
            for absent in sorted(set(new_state.known) - seen):
                _apply_deletion(store, index, new_state, absent, now())
                report.fetched += 1
                report.deleted += 1

        report.finished = now()
        mostly_failed = report.fetched > 0 and report.failed / report.fetched > FAILURE_RATIO_LIMIT
        if mostly_failed:
            report.errors.append(
                f"{report.failed}/{report.fetched} records failed; watermark not advanced"
            )
        else:
            if max_stamp is not None:
                new_state.high_watermark = max_stamp
            new_state.last_success = report.finished
        new_state.consecutive_failures = 0
        return report, new_state
    except SourceUnavailable as exc:
        report.finished = now()
        report.errors.append(str(exc))
        new_state.consecutive_failures += 1
        exc.report = report
        exc.new_state = new_state  # type: ignore[attr-defined]
        raise
    finally:
        if own_client is not None:
            own_client.close()
        if own_http is not None:
            own_http.close()


def _to_record(
    source: SourceDescriptor, item: HarvestedItem, identifier: str
) -> MetadataRecord:
    assert item.document is not None
    schema = crosswalk.detect_schema(item.document)
    record = crosswalk.parse(schema, item.document, source.source_id)
    return replace(
        record,
        identifier=identifier,
        datestamp=item.header.datestamp,
        sets=item.header.sets,
    )


def _apply_deletion(
    store: RecordStore,
    index: SearchIndex,
    state: HarvestState,
    identifier: str,
    stamp: datetime,
) -> None:
    existing = store.get(identifier)
    if existing is None or existing.deleted:
        state.known.pop(identifier, None)
        return
    tombstone = replace(existing, deleted=True, datestamp=stamp)
    store.apply(tombstone)
    index.delete(identifier)
    state.known.pop(identifier, None)


class Harvester:
    """Owns harvest state persistence and the audit log around run_harvest."""

    def __init__(
        self,
        store: RecordStore,
        index: SearchIndex,
        state_path: str | Path,
        audit_log_path: str | Path | None = None,
        http: httpx.Client | None = None,
    ):
        self.store = store
        self.index = index
        self.state_path = Path(state_path)
        self.audit_log_path = Path(audit_log_path) if audit_log_path else None
        self.http = http
        self.states = load_states(self.state_path)
        self.last_reports: dict[str, HarvestReport] = {}

    def state_for(self, source_id: str) -> HarvestState:
        return self.states.get(source_id) or HarvestState(source_id=source_id)

    def harvest(
        self,
        source: SourceDescriptor,
        mode: HarvestMode = HarvestMode.INCREMENTAL,
        client: OaiClient | None = None,
    ) -> HarvestReport:
        state = self.state_for(source.source_id)
        try:
            report, new_state = run_harvest(
                source, state, mode, self.store, self.index,
                client=client, http=self.http,
            )
        except SourceUnavailable as exc:
            if exc.report is not None:
                self._record(source.source_id, exc.report, getattr(exc, "new_state", state))
            raise
        self._record(source.source_id, report, new_state)
        return report

    def _record(self, source_id: str, report: HarvestReport, state: HarvestState) -> None:
        self.states[source_id] = state
        self.last_reports[source_id] = report
        save_states(self.state_path, self.states)
        if self.audit_log_path is not None:
            self.audit_log_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.audit_log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(report.to_json(), separators=(",", ":")) + "\n")


class HarvestScheduler:
    """Runs each enabled source at its interval.

    A tick that finds the source still running skips that run instead of
    queueing it; different sources harvest concurrently. ``clock`` and
    ``spawn`` are injectable so tests can drive time synchronously.
    """

    def __init__(
        self,
        sources: list[SourceDescriptor],
        runner: Callable[[SourceDescriptor], None],
        clock: Callable[[], float] = time.monotonic,
        spawn: Callable[[Callable[[], None]], None] | None = None,
        poll_seconds: float = 1.0,
    ):
        self.sources = [s for s in sources if s.enabled]
        self.runner = runner
        self.clock = clock
        self.spawn = spawn or self._thread_spawn
        self.poll_seconds = poll_seconds
        self._due: dict[str, float] = {}
        self._running: set[str] = set()
        self._lock = threading.Lock()
        self._stop = threading.Event()

    @staticmethod
    def _thread_spawn(job: Callable[[], None]) -> None:
        threading.Thread(target=job, daemon=True).start()

    def tick(self, now: float | None = None) -> list[str]:
        """Dispatch every source whose interval has elapsed; returns the
        source_ids started this tick."""
        now = self.clock() if now is None else now
        started: list[str] = []
        for source in self.sources:
            due = self._due.setdefault(source.source_id, now)
            if now < due:
                continue
            with self._lock:
                if source.source_id in self._running:
                    log.info("harvest of %s still running; tick skipped", source.source_id)
                    self._due[source.source_id] = now + source.interval_seconds
                    continue
                self._running.add(source.source_id)
            self._due[source.source_id] = now + source.interval_seconds
            started.append(source.source_id)

            def job(src: SourceDescriptor = source) -> None:
                try:
                    self.runner(src)
                except SourceUnavailable as exc:
                    log.warning("harvest of %s failed: %s", src.source_id, exc)
                except Exception:
                    log.exception("harvest of %s crashed", src.source_id)
                finally:
                    with self._lock:
                        self._running.discard(src.source_id)

            self.spawn(job)
        return started

    def run_forever(self) -> None:
        while not self._stop.is_set():
            self.tick()
            self._stop.wait(self.poll_seconds)

    def stop(self) -> None:
        self._stop.set()
