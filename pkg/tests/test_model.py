from __future__ import annotations

from dataclasses import replace
from datetime import date, datetime, timezone

import pytest
from hypothesis import given, strategies as st

from conftest import make_record
from metaharvest.model import (
    GeoBoundingBox,
    MetadataRecord,
    ModelError,
    SchemaKind,
    TemporalExtent,
    canonicalize,
    fingerprint,
    qualify_identifier,
    record_from_line,
    record_to_line,
)


class TestCanonicalize:
    def test_whitespace_runs_collapse(self):
        r = make_record(title="  Net  Primary\tProductivity ")
        assert r.title == "Net Primary Productivity"

    def test_keyword_dedup_case_insensitive_keeps_first(self):
        r = make_record(keywords=("NPP", "npp", "carbon"))
        assert r.keywords == ("NPP", "carbon")

    def test_idempotent(self):
        r = make_record(
            title="A  b\nc", abstract=" x\t y ", keywords=("K", "k", " j "),
            authors=(" a ", ""),
        )
        assert canonicalize(r) == r

    @given(
        title=st.text(min_size=1).filter(lambda s: s.strip()),
        abstract=st.text(),
        keywords=st.lists(st.text(), max_size=8),
        authors=st.lists(st.text(), max_size=4),
    )
    def test_idempotence_property(self, title, abstract, keywords, authors):
        r = MetadataRecord(
            identifier="s:1",
            source_id="s",
            schema=SchemaKind.OAI_DC,
            title=title,
            abstract=abstract,
            keywords=tuple(keywords),
            authors=tuple(authors),
            datestamp=datetime(2020, 1, 1, tzinfo=timezone.utc),
        )
        once = canonicalize(r)
        assert canonicalize(once) == once


class TestFingerprint:
    def test_datestamp_excluded(self):
        r = make_record()
        r2 = replace(r, datestamp=datetime(1999, 9, 9, tzinfo=timezone.utc))
        assert fingerprint(r) == fingerprint(r2)

    def test_raw_document_excluded(self):
        r = make_record()
        assert fingerprint(r) == fingerprint(replace(r, raw_document=b"<other/>"))

    def test_title_included(self):
        r = make_record()
        assert fingerprint(r) != fingerprint(replace(r, title="Changed"))

    def test_deterministic(self):
        r = make_record(keywords=("a", "b"), bbox=GeoBoundingBox(-10, 10, -5, 5))
        assert fingerprint(r).digest == fingerprint(r).digest

    @pytest.mark.parametrize(
        "mutation",
        [
            dict(identifier="s:other"),
            dict(source_id="other"),
            dict(schema=SchemaKind.FGDC),
            dict(title="Other title"),
            dict(abstract="other"),
            dict(keywords=("z",)),
            dict(authors=("Someone",)),
            dict(data_urls=("http://x/d",)),
            dict(bbox=GeoBoundingBox(-1, 1, -1, 1)),
            dict(temporal=TemporalExtent(start=date(2001, 2, 3))),
            dict(deleted=True),
            dict(sets=("extra",)),
        ],
    )
    def test_every_field_is_sensitive(self, mutation):
        r = make_record(title="Base title")
        assert fingerprint(r) != fingerprint(replace(r, **mutation))


class TestInvariants:
    def test_bbox_range_checked(self):
        with pytest.raises(ModelError):
            GeoBoundingBox(west=200, east=0, south=0, north=1)
        with pytest.raises(ModelError):
            GeoBoundingBox(west=0, east=0, south=5, north=-5)

    def test_bbox_antimeridian_is_legal(self):
        box = GeoBoundingBox(west=170, east=-170, south=-5, north=5)
        assert box.crosses_antimeridian
        assert box.lon_spans() == [(170, 180.0), (-180.0, -170)]

    def test_temporal_needs_one_bound(self):
        with pytest.raises(ModelError):
            TemporalExtent(start=None, end=None)
        with pytest.raises(ModelError):
            TemporalExtent(start=date(2020, 1, 2), end=date(2020, 1, 1))

    def test_non_deleted_needs_title(self):
        with pytest.raises(ModelError):
            make_record(title="   ")
        tombstone = MetadataRecord(
            identifier="s:1",
            source_id="s",
            schema=SchemaKind.OAI_DC,
            title="",
            deleted=True,
            datestamp=datetime(2020, 1, 1, tzinfo=timezone.utc),
        )
        assert tombstone.deleted

    def test_naive_datestamp_rejected(self):
        with pytest.raises(ModelError):
            make_record(datestamp=datetime(2020, 1, 1))


class TestJsonCodec:
    def test_round_trip_preserves_serialization(self):
        r = make_record(
            keywords=("a", "b"),
            authors=("X, Y",),
            data_urls=("http://x/1",),
            bbox=GeoBoundingBox(-100, -90, 30, 40),
            temporal=TemporalExtent(start=date(2003, 4, 1), end=date(2003, 10, 31)),
            raw_document=b"<metadata/>",
        )
        line = record_to_line(r)
        again = record_from_line(line)
        assert again == r
        assert record_to_line(again) == line

    def test_open_ended_temporal(self):
        r = make_record(temporal=TemporalExtent(start=None, end=date(2005, 1, 1)))
        assert record_from_line(record_to_line(r)) == r


def test_qualify_identifier_idempotent():
    assert qualify_identifier("src", "123") == "src:123"
    assert qualify_identifier("src", "src:123") == "src:123"
    assert qualify_identifier("src", "other:123") == "src:other:123"
