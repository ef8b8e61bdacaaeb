"""Unified metadata record model.

Every supported metadata standard is crosswalked into :class:`MetadataRecord`,
which is the unit of harvesting, indexing and search. Records are immutable
value objects; all mutation happens by constructing a replacement.

Normative formats defined here:

* the JSON object layout used by the record store and snapshot files
  (``record_to_json`` / ``record_from_json``), and
* the canonical binary serialization hashed by :func:`fingerprint`.
"""

from __future__ import annotations

import base64
import hashlib
import json
import re
import struct
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timezone
from enum import Enum


class SchemaKind(Enum):
    """The metadata standards a document can be crosswalked from."""

    FGDC = "FGDC"
    EML = "EML"
    DIF = "DIF"
    DUBLIN_CORE = "DublinCore"
    ISO19115 = "ISO19115"
    OAI_DC = "OaiDc"


class ModelError(ValueError):
    """Invalid field values at record construction time."""


_WS_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class GeoBoundingBox:
    """Rectangular spatial extent in degrees.

    ``west > east`` is legal and denotes a box crossing the antimeridian,
    covering ``[west, 180] ∪ [-180, east]``.
    """

    west: float
    east: float
    south: float
    north: float

    def __post_init__(self) -> None:
        for name in ("west", "east"):
            v = getattr(self, name)
            if not -180.0 <= v <= 180.0:
                raise ModelError(f"{name} longitude {v} outside [-180, 180]")
        for name in ("south", "north"):
            v = getattr(self, name)
            if not -90.0 <= v <= 90.0:
                raise ModelError(f"{name} latitude {v} outside [-90, 90]")
        if self.south > self.north:
            raise ModelError(f"south {self.south} > north {self.north}")

    @property
    def crosses_antimeridian(self) -> bool:
        return self.west > self.east

    def lon_spans(self) -> list[tuple[float, float]]:
        """Decompose into one or two ordinary west<=east longitude spans."""
        if self.crosses_antimeridian:
            return [(self.west, 180.0), (-180.0, self.east)]
        return [(self.west, self.east)]


@dataclass(frozen=True)
class TemporalExtent:
    """Temporal coverage; open ends are allowed but not both at once."""

    start: date | None = None
    end: date | None = None

    def __post_init__(self) -> None:
        if self.start is None and self.end is None:
            raise ModelError("temporal extent needs at least one of start/end")
        if self.start is not None and self.end is not None and self.start > self.end:
            raise ModelError(f"temporal start {self.start} > end {self.end}")


@dataclass(frozen=True)
class Fingerprint:
    """SHA-256 digest of a record's canonical serialization.

    Excludes ``raw_document`` and ``datestamp`` so that a provider
    re-serializing an unchanged record does not look like a change.
    """

    digest: bytes

    def __post_init__(self) -> None:
        if len(self.digest) != 32:
            raise ModelError("fingerprint digest must be 32 bytes")

    @property
    def hex(self) -> str:
        return self.digest.hex()


@dataclass(frozen=True)
class MetadataRecord:
    identifier: str
    source_id: str
    schema: SchemaKind
    title: str
    abstract: str = ""
    keywords: tuple[str, ...] = ()
    authors: tuple[str, ...] = ()
    data_urls: tuple[str, ...] = ()
    bbox: GeoBoundingBox | None = None
    temporal: TemporalExtent | None = None
    datestamp: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    deleted: bool = False
    sets: tuple[str, ...] = ()
    raw_document: bytes = b""

    def __post_init__(self) -> None:
        if not self.identifier:
            raise ModelError("identifier must be non-empty")
        if self.datestamp.tzinfo is None or self.datestamp.utcoffset() is None:
            raise ModelError("datestamp must be timezone-aware UTC")
        if not self.deleted and not self.title.strip():
            raise ModelError(f"non-deleted record {self.identifier!r} needs a title")
        # tuple-ize sequences so records built with lists stay hashable/immutable
        for name in ("keywords", "authors", "data_urls", "sets"):
            v = getattr(self, name)
            if not isinstance(v, tuple):
                object.__setattr__(self, name, tuple(v))


def qualify_identifier(source_id: str, local_id: str) -> str:
    """Source-qualify a provider-local identifier.

    Idempotent: an identifier already carrying the ``source_id:`` prefix is
    returned unchanged, so harvesting a repository under its own source name
    preserves identity.
    """
    prefix = source_id + ":"
    if local_id.startswith(prefix):
        return local_id
    return prefix + local_id


def canonicalize(record: MetadataRecord) -> MetadataRecord:
    """Normalize a record's text fields. Idempotent.

    Whitespace runs in title/abstract collapse to single spaces and the ends
    are trimmed; keywords and authors are trimmed, empty entries dropped, and
    keywords deduplicated case-insensitively keeping the first occurrence.
    """
    title = _WS_RUN.sub(" ", record.title).strip()
    abstract = _WS_RUN.sub(" ", record.abstract).strip()
    keywords: list[str] = []
    seen: set[str] = set()
    for kw in record.keywords:
        kw = kw.strip()
        if not kw:
            continue
        key = kw.casefold()
        if key in seen:
            continue
        seen.add(key)
        keywords.append(kw)
    authors = tuple(a.strip() for a in record.authors if a.strip())
    return replace(
        record,
        title=title,
        abstract=abstract,
        keywords=tuple(keywords),
        authors=authors,
    )


# ---------------------------------------------------------------------------
# Canonical binary serialization (fingerprint input)
#
# Layout, in this exact order:
#   identifier, source_id, schema name, title, abstract,
#   keywords, authors, data_urls, bbox, temporal, deleted, sets
# Strings are a big-endian u32 byte length followed by UTF-8 bytes; lists are
# a u32 count followed by their strings; bbox is one presence byte then
# west/east/south/north as big-endian IEEE-754 doubles; temporal is one
# presence byte then start and end each as presence byte + ISO date string;
# deleted is a single 0x00/0x01 byte. raw_document and datestamp are excluded.
# ---------------------------------------------------------------------------


def _put_str(out: bytearray, s: str) -> None:
    b = s.encode("utf-8")
    out += struct.pack(">I", len(b))
    out += b


def _put_list(out: bytearray, items: tuple[str, ...]) -> None:
    out += struct.pack(">I", len(items))
    for item in items:
        _put_str(out, item)


def canonical_bytes(record: MetadataRecord) -> bytes:
    out = bytearray()
    _put_str(out, record.identifier)
    _put_str(out, record.source_id)
    _put_str(out, record.schema.value)
    _put_str(out, record.title)
    _put_str(out, record.abstract)
    _put_list(out, record.keywords)
    _put_list(out, record.authors)
    _put_list(out, record.data_urls)
    if record.bbox is None:
        out += b"\x00"
    else:
        out += b"\x01"
        out += struct.pack(
            ">dddd", record.bbox.west, record.bbox.east, record.bbox.south, record.bbox.north
        )
    if record.temporal is None:
        out += b"\x00"
    else:
        out += b"\x01"
        for d in (record.temporal.start, record.temporal.end):
            if d is None:
                out += b"\x00"
            else:
                out += b"\x01"
                _put_str(out, d.isoformat())
    out += b"\x01" if record.deleted else b"\x00"
    _put_list(out, record.sets)
    return bytes(out)


def fingerprint(record: MetadataRecord) -> Fingerprint:
    return Fingerprint(hashlib.sha256(canonical_bytes(record)).digest())


# ---------------------------------------------------------------------------
# JSON codec (record store lines, snapshot sections, API bodies)
# ---------------------------------------------------------------------------

DATESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def format_datestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime(DATESTAMP_FORMAT)


def parse_datestamp(s: str) -> datetime:
    return datetime.strptime(s, DATESTAMP_FORMAT).replace(tzinfo=timezone.utc)


def record_to_json(record: MetadataRecord, include_raw: bool = True) -> dict:
    doc = {
        "identifier": record.identifier,
        "source_id": record.source_id,
        "schema": record.schema.value,
        "title": record.title,
        "abstract": record.abstract,
        "keywords": list(record.keywords),
        "authors": list(record.authors),
        "data_urls": list(record.data_urls),
        "bbox": None
        if record.bbox is None
        else {
            "west": record.bbox.west,
            "east": record.bbox.east,
            "south": record.bbox.south,
            "north": record.bbox.north,
        },
        "temporal": None
        if record.temporal is None
        else {
            "start": record.temporal.start.isoformat() if record.temporal.start else None,
            "end": record.temporal.end.isoformat() if record.temporal.end else None,
        },
        "datestamp": format_datestamp(record.datestamp),
        "deleted": record.deleted,
        "sets": list(record.sets),
    }
    if include_raw:
        doc["raw_document"] = base64.b64encode(record.raw_document).decode("ascii")
    return doc


def record_from_json(doc: dict) -> MetadataRecord:
    bbox = None
    if doc.get("bbox") is not None:
        b = doc["bbox"]
        bbox = GeoBoundingBox(west=b["west"], east=b["east"], south=b["south"], north=b["north"])
    temporal = None
    if doc.get("temporal") is not None:
        t = doc["temporal"]
        temporal = TemporalExtent(
            start=date.fromisoformat(t["start"]) if t.get("start") else None,
            end=date.fromisoformat(t["end"]) if t.get("end") else None,
        )
    raw = base64.b64decode(doc.get("raw_document", "") or "")
    return MetadataRecord(
        identifier=doc["identifier"],
        source_id=doc["source_id"],
        schema=SchemaKind(doc["schema"]),
        title=doc["title"],
        abstract=doc.get("abstract", ""),
        keywords=tuple(doc.get("keywords", ())),
        authors=tuple(doc.get("authors", ())),
        data_urls=tuple(doc.get("data_urls", ())),
        bbox=bbox,
        temporal=temporal,
        datestamp=parse_datestamp(doc["datestamp"]),
        deleted=bool(doc.get("deleted", False)),
        sets=tuple(doc.get("sets", ())),
        raw_document=raw,
    )


def record_to_line(record: MetadataRecord) -> str:
    """One canonical JSON object per line, keys in fixed order, UTF-8."""
    return json.dumps(record_to_json(record), ensure_ascii=False, separators=(",", ":"))


def record_from_line(line: str) -> MetadataRecord:
    return record_from_json(json.loads(line))
