"""Shared pieces for the per-standard crosswalk parsers."""

from __future__ import annotations

import hashlib
from datetime import date, datetime, timezone

from ..model import GeoBoundingBox, ModelError, TemporalExtent

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class MissingRequiredField(Exception):
    """Document lacks a field the unified record cannot do without."""


class CoordinateOutOfRange(Exception):
    """A bounding coordinate is non-numeric or outside valid degrees."""


class InvalidDate(Exception):
    """A temporal value cannot be read as a date, or the range is inverted."""


_DATE_FORMATS = ("%Y-%m-%d", "%Y%m%d", "%Y")


def parse_date(value: str) -> date:
    """Read ISO 8601 dates plus the compact YYYYMMDD and bare-year forms
    metadata standards use natively."""
    value = value.strip()
    if not value:
        raise InvalidDate("empty date")
    # full timestamps: keep the date part
    if "T" in value:
        value = value.split("T", 1)[0]
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(value, fmt).date()
        except ValueError:
            continue
    raise InvalidDate(f"unreadable date {value!r}")


def build_temporal(start_text: str, end_text: str) -> TemporalExtent | None:
    start = parse_date(start_text) if start_text.strip() else None
    end = parse_date(end_text) if end_text.strip() else None
    if start is None and end is None:
        return None
    try:
        return TemporalExtent(start=start, end=end)
    except ModelError as exc:
        raise InvalidDate(str(exc)) from exc


def build_bbox(west: str, east: str, south: str, north: str) -> GeoBoundingBox | None:
    """Range-checked box from coordinate texts; all-empty means no coverage."""
    texts = (west, east, south, north)
    if all(not t.strip() for t in texts):
        return None
    if any(not t.strip() for t in texts):
        return None  # partial boxes are treated as absent coverage
    try:
        values = [float(t.strip()) for t in texts]
    except ValueError as exc:
        raise CoordinateOutOfRange(f"non-numeric coordinate: {exc}") from exc
    try:
        return GeoBoundingBox(west=values[0], east=values[1], south=values[2], north=values[3])
    except ModelError as exc:
        raise CoordinateOutOfRange(str(exc)) from exc


def derived_local_id(title: str) -> str:
    """Stable identifier for standards without a native identifier element.

    Hashed over the whitespace-collapsed title so cosmetic re-serialization
    by a provider does not change record identity.
    """
    collapsed = " ".join(title.split())
    return hashlib.sha256(collapsed.encode("utf-8")).hexdigest()[:16]


def require_title(title: str) -> str:
    if not title.strip():
        raise MissingRequiredField("title")
    return title
