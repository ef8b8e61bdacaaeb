from __future__ import annotations

import sys
from datetime import datetime, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from metaharvest.harvest import Harvester
from metaharvest.index import SearchIndex
from metaharvest.model import GeoBoundingBox, MetadataRecord, SchemaKind, TemporalExtent, canonicalize
from metaharvest.service import create_app
from metaharvest.service.config import ServiceConfig
from metaharvest.store import RecordStore

FIXTURES = Path(__file__).parent / "fixtures"


def make_record(
    identifier: str = "src:1",
    source_id: str = "src",
    title: str = "A record title",
    abstract: str = "",
    keywords: tuple[str, ...] = (),
    authors: tuple[str, ...] = (),
    data_urls: tuple[str, ...] = (),
    bbox: GeoBoundingBox | None = None,
    temporal: TemporalExtent | None = None,
    datestamp: datetime | None = None,
    schema: SchemaKind = SchemaKind.OAI_DC,
    deleted: bool = False,
    sets: tuple[str, ...] = (),
    raw_document: bytes = b"",
) -> MetadataRecord:
    return canonicalize(
        MetadataRecord(
            identifier=identifier,
            source_id=source_id,
            schema=schema,
            title=title,
            abstract=abstract,
            keywords=keywords,
            authors=authors,
            data_urls=data_urls,
            bbox=bbox,
            temporal=temporal,
            datestamp=datestamp or datetime(2020, 6, 1, 12, 0, 0, tzinfo=timezone.utc),
            deleted=deleted,
            sets=sets,
            raw_document=raw_document,
        )
    )


def build_service(
    tmp_path: Path,
    records: list[MetadataRecord] = (),
    *,
    name: str = "Test Catalog",
    oai_page_size: int = 10,
    sources: list = (),
    with_harvester: bool = False,
):
    """A full service wired over a temp store, for in-process HTTP tests."""
    config = ServiceConfig(
        repository_name=name,
        base_url="http://testserver",
        data_dir=tmp_path / "data",
        oai_page_size=oai_page_size,
        sources=list(sources),
    )
    store = RecordStore(config.record_store_dir)
    index = SearchIndex()
    for record in records:
        store.apply(record)
        index.upsert(record)
    harvester = None
    if with_harvester:
        harvester = Harvester(store, index, config.harvest_state_path, config.audit_log_path)
    app = create_app(config, store, index, harvester)
    return app, store, index, config


@pytest.fixture
def eagles_corpus():
    a = make_record(
        identifier="music:a",
        source_id="music",
        title="The Eagles Greatest Hits",
        abstract="Compilation album released in 1976.",
        datestamp=datetime(2021, 3, 1, tzinfo=timezone.utc),
    )
    b = make_record(
        identifier="bio:b",
        source_id="bio",
        title="Raptor population assessment",
        abstract="Population survey of eagles (Haliaeetus) along the river corridor.",
        datestamp=datetime(2021, 4, 1, tzinfo=timezone.utc),
    )
    return [a, b]
