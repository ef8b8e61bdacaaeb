from __future__ import annotations

from datetime import date

import pytest
from hypothesis import given, settings, strategies as st

from metaharvest.index import SpatialRelation, spatial_match, temporal_match
from metaharvest.model import GeoBoundingBox, TemporalExtent

I, C, W = SpatialRelation.INTERSECTS, SpatialRelation.CONTAINS, SpatialRelation.WITHIN


def box(w, s, e, n):
    return GeoBoundingBox(west=w, east=e, south=s, north=n)


class TestSpatialExamples:
    def test_overlapping_rectangles_intersect(self):
        assert spatial_match(box(-100, 30, -90, 40), box(-95, 35, -85, 45), I)

    def test_dateline_record_intersects(self):
        record = box(170, -5, -170, 5)
        query = box(172, -10, 179, 10)
        assert spatial_match(record, query, I)

    def test_within_vs_contains_direction(self):
        record = box(0, 0, 10, 10)
        query = box(-1, -1, 11, 11)
        assert spatial_match(record, query, W)
        assert not spatial_match(record, query, C)

    def test_contains(self):
        assert spatial_match(box(-20, -20, 20, 20), box(-5, -5, 5, 5), C)

    def test_disjoint(self):
        assert not spatial_match(box(0, 0, 10, 10), box(50, 50, 60, 60), I)

    def test_touching_edges_intersect(self):
        assert spatial_match(box(0, 0, 10, 10), box(10, 0, 20, 10), I)

    def test_dateline_query_contains_parts(self):
        record = box(175, 0, -175, 10)  # crosses
        query = box(170, -5, -170, 15)  # wider crossing box
        assert spatial_match(record, query, W)
        assert spatial_match(query, record, C)


class TestSpatialDecomposition:
    @staticmethod
    def explicit_decompose(b: GeoBoundingBox) -> list[GeoBoundingBox]:
        if b.west > b.east:
            return [
                GeoBoundingBox(west=b.west, east=180.0, south=b.south, north=b.north),
                GeoBoundingBox(west=-180.0, east=b.east, south=b.south, north=b.north),
            ]
        return [b]

    boxes = st.builds(
        lambda w, e, s, n: GeoBoundingBox(west=w, east=e, south=min(s, n), north=max(s, n)),
        st.integers(-180, 180),
        st.integers(-180, 180),
        st.integers(-90, 90),
        st.integers(-90, 90),
    )

    @given(record=boxes, query=boxes)
    @settings(max_examples=300)
    def test_crossing_eval_equals_explicit_two_box_eval(self, record, query):
        direct = spatial_match(record, query, I)
        decomposed = any(
            spatial_match(r, q, I)
            for r in self.explicit_decompose(record)
            for q in self.explicit_decompose(query)
        )
        assert direct == decomposed

    @given(record=boxes, query=boxes)
    @settings(max_examples=300)
    def test_against_integer_grid_oracle(self, record, query):
        # inclusive integer-endpoint boxes: grid membership is an exact oracle
        def covers(b: GeoBoundingBox, lon: int, lat: int) -> bool:
            if not b.south <= lat <= b.north:
                return False
            if b.west <= b.east:
                return b.west <= lon <= b.east
            return lon >= b.west or lon <= b.east

        lons = range(-180, 181)
        lats = range(int(min(record.south, query.south)), int(max(record.north, query.north)) + 1)
        record_pts = {(x, y) for x in lons for y in lats if covers(record, x, y)}
        query_pts = {(x, y) for x in lons for y in lats if covers(query, x, y)}
        assert spatial_match(record, query, I) == bool(record_pts & query_pts)
        assert spatial_match(record, query, C) == (query_pts <= record_pts)
        assert spatial_match(record, query, W) == (record_pts <= query_pts)


class TestTemporal:
    def test_overlap(self):
        record = TemporalExtent(start=date(2000, 1, 1), end=date(2000, 12, 31))
        assert temporal_match(record, date(2000, 6, 1), date(2001, 6, 1))

    def test_disjoint_open_start_query(self):
        record = TemporalExtent(start=date(2002, 1, 1), end=None)
        assert not temporal_match(record, None, date(2001, 12, 31))

    def test_open_ended_record_overlaps(self):
        record = TemporalExtent(start=None, end=date(2005, 1, 1))
        assert temporal_match(record, date(2004, 1, 1), None)

    def test_boundary_touch_counts(self):
        record = TemporalExtent(start=date(2000, 1, 1), end=date(2000, 12, 31))
        assert temporal_match(record, date(2000, 12, 31), None)
        assert temporal_match(record, None, date(2000, 1, 1))

    def test_query_needs_a_bound(self):
        record = TemporalExtent(start=date(2000, 1, 1), end=None)
        with pytest.raises(ValueError):
            temporal_match(record, None, None)
