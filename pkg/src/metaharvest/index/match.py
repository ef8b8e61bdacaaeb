"""Spatial and temporal filter predicates.

Boxes that cross the antimeridian (west > east) are decomposed into at most
two ordinary boxes before comparison, so every relation reduces to interval
arithmetic on west<=east spans. All boundaries are inclusive.
"""

from __future__ import annotations

from datetime import date
from enum import Enum

from ..model import GeoBoundingBox, TemporalExtent


class SpatialRelation(Enum):
    INTERSECTS = "intersects"
    CONTAINS = "contains"
    WITHIN = "within"


def _spans_overlap(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def _span_contained(inner: tuple[float, float], outers: list[tuple[float, float]]) -> bool:
    # After decomposition no span straddles the seam, so containment never
    # needs two outer spans glued together.
    return any(o[0] <= inner[0] and inner[1] <= o[1] for o in outers)


def _lat_overlap(a: GeoBoundingBox, b: GeoBoundingBox) -> bool:
    return a.south <= b.north and b.south <= a.north


def _lat_contained(inner: GeoBoundingBox, outer: GeoBoundingBox) -> bool:
    return outer.south <= inner.south and inner.north <= outer.north


def _covers(outer: GeoBoundingBox, inner: GeoBoundingBox) -> bool:
    if not _lat_contained(inner, outer):
        return False
    outer_spans = outer.lon_spans()
    return all(_span_contained(span, outer_spans) for span in inner.lon_spans())


def spatial_match(
    record_bbox: GeoBoundingBox,
    query_bbox: GeoBoundingBox,
    relation: SpatialRelation = SpatialRelation.INTERSECTS,
) -> bool:
    """Test record coverage against a query box under the given relation.

    Intersects: the boxes share at least a boundary point.
    Contains: the record box covers the whole query box.
    Within: the query box covers the whole record box.
    """
    if relation is SpatialRelation.INTERSECTS:
        if not _lat_overlap(record_bbox, query_bbox):
            return False
        return any(
            _spans_overlap(r, q)
            for r in record_bbox.lon_spans()
            for q in query_bbox.lon_spans()
        )
    if relation is SpatialRelation.CONTAINS:
        return _covers(record_bbox, query_bbox)
    if relation is SpatialRelation.WITHIN:
        return _covers(query_bbox, record_bbox)
    raise ValueError(f"unknown spatial relation {relation!r}")


def temporal_match(
    record: TemporalExtent,
    query_start: date | None,
    query_end: date | None,
) -> bool:
    """Interval overlap with open ends treated as +/- infinity."""
    if query_start is None and query_end is None:
        raise ValueError("temporal query needs at least one bound")
    if query_end is not None and record.start is not None and record.start > query_end:
        return False
    if query_start is not None and record.end is not None and record.end < query_start:
        return False
    return True
