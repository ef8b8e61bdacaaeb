"""Acceptance suite: the project's exit criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion. Stated runtime bounds are asserted inside the tests.
"""

from __future__ import annotations

import json
import math
import random
import time
from contextlib import contextmanager
from dataclasses import replace
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

import oracle
from conftest import FIXTURES, build_service, make_record
from generators import random_corpus, random_query
from metaharvest import crosswalk
from metaharvest.federation import (
    FederationSourceStats,
    composite_uptime,
    federated_latency,
    simulate_availability,
)
from metaharvest.harvest import (
    Harvester,
    HarvestMode,
    SourceDescriptor,
    SourceKind,
    SourceUnavailable,
)
from metaharvest.index import SearchIndex, parse_query
from metaharvest.model import (
    MetadataRecord,
    SchemaKind,
    fingerprint,
    record_to_json,
)
from metaharvest.oaipmh import OaiClient, TransportError
from metaharvest.oaipmh.protocol import OaiErrorCode
from metaharvest.store import RecordStore


@contextmanager
def criterion(number: int, title: str):
    started = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {number} [{title}]: FAIL ({time.monotonic() - started:.1f}s)")
        raise
    print(f"\nACCEPTANCE {number} [{title}]: PASS ({time.monotonic() - started:.1f}s)")


def synthetic(n: int, source: str = "seed") -> list[MetadataRecord]:
    """OaiDc-native records that survive an oai_dc round trip bit-for-bit."""
    rng = random.Random(n * 7 + 1)
    out = []
    for i in range(n):
        out.append(
            make_record(
                identifier=f"{source}:r{i:05d}",
                source_id=source,
                schema=SchemaKind.OAI_DC,
                title=f"Synthetic record {i} " + " ".join(rng.choices(["soil", "flux", "snow"], k=2)),
                abstract=f"Body text {i}.",
                keywords=(f"kw{i % 11}", "acceptance"),
                authors=(f"Author {i % 5}",),
                datestamp=datetime(2022, 1, 1, tzinfo=timezone.utc) + timedelta(seconds=i),
                sets=(source,),
            )
        )
    return out


def oai_source(**kw) -> SourceDescriptor:
    defaults = dict(
        source_id="seed",
        kind=SourceKind.OAI_PMH,
        location="http://testserver/oai",
        metadata_prefix="oai_dc",
        interval_seconds=300,
    )
    defaults.update(kw)
    return SourceDescriptor(**defaults)


def test_criterion_1_oai_pmh_conformance(tmp_path):
    with criterion(1, "OAI-PMH conformance: verb/argument matrix + all error codes"):
        started = time.monotonic()
        app, store, *_ = build_service(tmp_path, synthetic(5), oai_page_size=2)
        http = TestClient(app)

        def call(**args):
            import xml.etree.ElementTree as ET

            resp = http.get("/oai", params=args)
            assert resp.status_code == 200
            root = ET.fromstring(resp.content)
            err = root.find("{http://www.openarchives.org/OAI/2.0/}error")
            return None if err is None else err.get("code")

        all_args = {
            "identifier": "seed:r00000",
            "metadataPrefix": "oai_dc",
            "from": "2022-01-01",
            "until": "2022-02-01",
            "set": "seed",
            "resumptionToken": "x",
        }
        legal = {
            "Identify": set(),
            "ListMetadataFormats": {"identifier"},
            "ListSets": {"resumptionToken"},
            "ListIdentifiers": {"metadataPrefix", "from", "until", "set", "resumptionToken"},
            "ListRecords": {"metadataPrefix", "from", "until", "set", "resumptionToken"},
            "GetRecord": {"identifier", "metadataPrefix"},
        }
        checks = 0
        assert call(verb="Bogus") == "badVerb"
        checks += 1
        for verb, legal_args in legal.items():
            for arg, value in all_args.items():
                if arg in legal_args:
                    continue
                assert call(verb=verb, **{arg: value}) == "badArgument", (verb, arg)
                checks += 1
        # legal requests answer without badVerb/badArgument
        legal_calls = [
            {"verb": "Identify"},
            {"verb": "ListMetadataFormats"},
            {"verb": "ListMetadataFormats", "identifier": "seed:r00000"},
            {"verb": "ListSets"},
            {"verb": "ListIdentifiers", "metadataPrefix": "oai_dc"},
            {"verb": "ListRecords", "metadataPrefix": "oai_dc", "from": "2022-01-01",
             "until": "2022-02-01", "set": "seed"},
            {"verb": "GetRecord", "identifier": "seed:r00000", "metadataPrefix": "oai_dc"},
        ]
        for args in legal_calls:
            assert call(**args) not in ("badVerb", "badArgument"), args
            checks += 1

        # all eight protocol error codes reachable by constructed requests
        tomb = replace(synthetic(7)[6], deleted=True)
        store.apply(tomb)
        empty_app, *_ = build_service(tmp_path / "empty")
        empty_http = TestClient(empty_app)

        import xml.etree.ElementTree as ET

        def code_of(client, **args):
            root = ET.fromstring(client.get("/oai", params=args).content)
            err = root.find("{http://www.openarchives.org/OAI/2.0/}error")
            return None if err is None else err.get("code")

        reachable = {
            "badVerb": code_of(http, verb="Nope"),
            "badArgument": code_of(http, verb="Identify", set="x"),
            "badResumptionToken": code_of(http, verb="ListRecords", resumptionToken="junk"),
            "cannotDisseminateFormat": code_of(
                http, verb="GetRecord", identifier="seed:r00000", metadataPrefix="marc21"
            ),
            "idDoesNotExist": code_of(
                http, verb="GetRecord", identifier="seed:missing", metadataPrefix="oai_dc"
            ),
            "noRecordsMatch": code_of(
                http, verb="ListRecords", metadataPrefix="oai_dc", **{"from": "2099-01-01"}
            ),
            "noMetadataFormats": code_of(
                http, verb="ListMetadataFormats", identifier=tomb.identifier
            ),
            "noSetHierarchy": code_of(empty_http, verb="ListSets"),
        }
        for code, got in reachable.items():
            assert got == code, f"{code} not reachable (got {got})"
            checks += 1
        assert set(reachable) == {c.value for c in OaiErrorCode}

        # pagination over HTTP with a non-divisor page size
        import xml.etree.ElementTree as ET

        oai_ns = "{http://www.openarchives.org/OAI/2.0/}"
        collected = []
        params = {"verb": "ListRecords", "metadataPrefix": "oai_dc"}
        while True:
            root = ET.fromstring(http.get("/oai", params=params).content)
            records = root.findall(f"{oai_ns}ListRecords/{oai_ns}record")
            collected.extend(
                r.find(f"{oai_ns}header/{oai_ns}identifier").text for r in records
            )
            token = root.find(f"{oai_ns}ListRecords/{oai_ns}resumptionToken")
            if token is None or not (token.text or "").strip():
                break
            params = {"verb": "ListRecords", "resumptionToken": token.text.strip()}
        assert sorted(collected) == collected and len(collected) == 6  # 5 live + tombstone
        checks += 1

        elapsed = time.monotonic() - started
        assert elapsed < 10.0, f"conformance suite took {elapsed:.1f}s (budget 10s)"
        print(f"  ({checks} matrix/fixture assertions, {elapsed:.2f}s)", end="")


def test_criterion_2_self_harvest_round_trip(tmp_path):
    with criterion(2, "self-harvest of 500 records at page size 37"):
        started = time.monotonic()
        originals = synthetic(500)
        app, *_ = build_service(tmp_path, originals, oai_page_size=37)
        client = OaiClient("http://testserver/oai", http=TestClient(app))

        harvested = []
        for item in client.list_records(metadata_prefix="oai_dc"):
            record = crosswalk.parse(SchemaKind.OAI_DC, item.document, item.header.sets[0])
            harvested.append(
                replace(
                    record,
                    identifier=item.header.identifier,
                    datestamp=item.header.datestamp,
                    sets=item.header.sets,
                )
            )

        assert len(harvested) == 500
        assert len({r.identifier for r in harvested}) == 500, "duplicate identifiers"
        assert sorted(fingerprint(r).hex for r in harvested) == sorted(
            fingerprint(r).hex for r in originals
        ), "fingerprint multisets differ"
        # page size 37 over 500 -> 14 requests (13 full + final partial)
        assert len(client.request_log) == math.ceil(500 / 37)
        elapsed = time.monotonic() - started
        assert elapsed < 30.0, f"self-harvest took {elapsed:.1f}s (budget 30s)"


def test_criterion_3_incremental_harvest_efficiency(tmp_path):
    with criterion(3, "incremental harvest fetches only the 7 mutated records"):
        provider_records = synthetic(500)
        app, provider_store, _, _ = build_service(tmp_path, provider_records, oai_page_size=100)

        store = RecordStore(tmp_path / "local")
        index = SearchIndex()
        harvester = Harvester(store, index, tmp_path / "state.json")
        harvester.harvest(
            oai_source(), HarvestMode.FULL,
            client=OaiClient("http://testserver/oai", http=TestClient(app)),
        )
        assert store.live_count() == 500

        watermark = harvester.states["seed"].high_watermark
        boundary_overlap = sum(
            1 for r in provider_records if r.datestamp == watermark
        )

        mutated = random.Random(3).sample(range(500), 7)
        stamp = datetime(2022, 6, 1, tzinfo=timezone.utc)
        for offset, i in enumerate(mutated):
            provider_store.apply(
                replace(
                    provider_records[i],
                    title=f"Mutated record {i}",
                    datestamp=stamp + timedelta(seconds=offset),
                )
            )

        client = OaiClient("http://testserver/oai", http=TestClient(app))
        report = harvester.harvest(oai_source(), HarvestMode.INCREMENTAL, client=client)

        chains = [p for p in client.request_log if "resumptionToken" not in p]
        assert len(chains) == 1, "more than one ListRecords chain on the wire"
        assert chains[0]["from"] is not None
        assert report.fetched <= 7 + boundary_overlap
        assert report.updated == 7
        assert report.added == 0


def test_criterion_4_search_oracle_equivalence():
    with criterion(4, "2000 records x 500 queries vs linear-scan oracle + BM25 1e-9"):
        rng = random.Random(20240)
        corpus = random_corpus(rng, 2000)
        idx = SearchIndex()
        for record in corpus:
            idx.upsert(record)
        ref = oracle.CorpusOracle(corpus)

        mismatches = 0
        for qn in range(500):
            text, query = random_query(rng)
            result = idx.search(query, page=0, page_size=1000)
            engine_ids = {h.identifier for h in result.hits}
            if result.total_hits > 1000:
                engine_ids = {
                    h.identifier
                    for page in range(0, result.total_hits // 1000 + 1)
                    for h in idx.search(query, page=page, page_size=1000).hits
                }
            expected = ref.hit_set(query)
            assert engine_ids == expected, f"query {qn}: {text!r}"
            assert result.total_hits == len(expected)

            expected_scores = ref.scores(query)
            for hit in result.hits:
                want = expected_scores[hit.identifier]
                got = hit.score
                if want == 0.0:
                    assert got == 0.0
                elif abs(got - want) / abs(want) >= 1e-9:
                    mismatches += 1
        assert mismatches == 0


def test_criterion_5_eagles_fielded_search(tmp_path, eagles_corpus):
    with criterion(5, "fielded search disambiguates the Eagles"):
        idx = SearchIndex()
        for record in eagles_corpus:
            idx.upsert(record)
        full = idx.search(parse_query("eagles"))
        assert {h.identifier for h in full.hits} == {"music:a", "bio:b"}
        fielded = idx.search(parse_query("title:eagles"))
        assert [h.identifier for h in fielded.hits] == ["music:a"]
        assert fielded.total_hits == 1


def test_criterion_6_federation_formulas():
    with criterion(6, "federation uptime product and slowest-member latency"):
        three_nines = [FederationSourceStats(uptime=0.99, latency_ms=0.0)] * 3
        value = composite_uptime(three_nines)
        # 0.99^3 is exactly 0.970299 in decimal; compare at float precision
        assert abs(value - 0.970299) < 1e-12

        measured = simulate_availability(three_nines, trials=1_000_000, seed=424242)
        assert abs(measured - 0.970299) <= 0.002

        rng = random.Random(6)
        for _ in range(100):
            sources = [
                FederationSourceStats(uptime=rng.random(), latency_ms=rng.uniform(0, 2000))
                for _ in range(rng.randint(1, 9))
            ]
            processing = rng.uniform(0, 250)
            assert federated_latency(sources, processing) == (
                max(s.latency_ms for s in sources) + processing
            )


def test_criterion_7_crosswalk_fixtures_and_fuzz():
    with criterion(7, "golden fixtures exact + 10k-input fuzz, typed errors only"):
        standards = {"fgdc", "eml", "dif", "dublincore", "iso19115"}
        seen = {}
        for directory in sorted(FIXTURES.iterdir()):
            assert directory.name in standards
            fixtures = sorted(directory.glob("*.xml"))
            seen[directory.name] = len(fixtures)
            for xml_path in fixtures:
                document = xml_path.read_bytes()
                schema = crosswalk.detect_schema(document)
                record = crosswalk.parse(schema, document, "fixtures")
                expected = json.loads(
                    xml_path.with_name(xml_path.stem + ".expected.json").read_text()
                )
                assert record_to_json(record, include_raw=False) == expected, xml_path
        assert set(seen) == standards
        assert all(count >= 2 for count in seen.values()), seen

        typed = (
            crosswalk.MalformedXml,
            crosswalk.UnknownSchema,
            crosswalk.MissingRequiredField,
            crosswalk.CoordinateOutOfRange,
            crosswalk.InvalidDate,
        )
        rng = random.Random(0xFEED)
        pieces = [
            "<", ">", "</", "/>", "dc", "DIF", "eml", "metadata", "idinfo", "title",
            "westbc", "Entry_ID", '"', "'", "&", "&#x00;", " ", "=", "xmlns", "xml",
            "\x00", "\xff", "2003", "-200", "box:",
        ]
        crashes = 0
        for i in range(10_000):
            if i % 2 == 0:
                blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 120)))
            else:
                blob = "".join(rng.choices(pieces, k=rng.randrange(0, 30))).encode()
            try:
                crosswalk.parse_auto(blob, "fuzz")
            except typed:
                pass
            except BaseException:
                crashes += 1
        assert crashes == 0


def test_criterion_8_desk_scale_performance(tmp_path):
    with criterion(8, "100k records: index <60s, p95 search <50ms, snapshot <30s"):
        rng = random.Random(88)
        vocab = [f"term{i:04d}" for i in range(5000)]
        base = datetime(2021, 1, 1, tzinfo=timezone.utc)

        def gen(i: int) -> MetadataRecord:
            return MetadataRecord(
                identifier=f"perf:{i:06d}",
                source_id=f"src{i % 7}",
                schema=SchemaKind.OAI_DC,
                title=" ".join(rng.choices(vocab, k=4)),
                abstract=" ".join(rng.choices(vocab, k=20)),
                keywords=tuple(rng.choices(vocab, k=3)),
                authors=(f"Author {i % 50}",),
                datestamp=base,
            )

        records = [gen(i) for i in range(100_000)]

        idx = SearchIndex()
        t0 = time.monotonic()
        for record in records:
            idx.upsert(record)
        index_time = time.monotonic() - t0
        assert index_time < 60.0, f"indexing took {index_time:.1f}s (budget 60s)"

        latencies = []
        for _ in range(200):
            term = rng.choice(vocab)
            query = parse_query(term)
            s = time.perf_counter()
            idx.search(query, page=0, page_size=10)
            latencies.append((time.perf_counter() - s) * 1000.0)
        latencies.sort()
        p95 = latencies[int(len(latencies) * 0.95) - 1]
        assert p95 < 50.0, f"p95 single-term latency {p95:.2f}ms (budget 50ms)"

        probes = [parse_query(rng.choice(vocab)) for _ in range(100)]
        before = [
            [(h.identifier, h.score) for h in idx.search(q, page_size=20).hits]
            for q in probes
        ]
        snap = tmp_path / "perf.snap"
        t1 = time.monotonic()
        idx.snapshot_save(snap)
        loaded = SearchIndex()
        loaded.snapshot_load(snap)
        snapshot_time = time.monotonic() - t1
        assert snapshot_time < 30.0, f"snapshot save+load took {snapshot_time:.1f}s (budget 30s)"
        after = [
            [(h.identifier, h.score) for h in loaded.search(q, page_size=20).hits]
            for q in probes
        ]
        assert before == after
        print(
            f"  (index {index_time:.1f}s, p95 {p95:.2f}ms, snapshot {snapshot_time:.1f}s)",
            end="",
        )


def test_criterion_9_crash_safety(tmp_path):
    with criterion(9, "20 interrupted harvests all converge with unique ids"):
        originals = synthetic(120)
        app, *_ = build_service(tmp_path, originals, oai_page_size=11)
        store = RecordStore(tmp_path / "local")
        index = SearchIndex()
        harvester = Harvester(store, index, tmp_path / "state.json")
        rng = random.Random(2024)

        class FaultyClient:
            def __init__(self, fail_after: int):
                self.inner = OaiClient("http://testserver/oai", http=TestClient(app))
                self.fail_after = fail_after
                self.request_log = self.inner.request_log

            def list_records(self, **kwargs):
                for i, item in enumerate(self.inner.list_records(**kwargs)):
                    if i >= self.fail_after:
                        raise TransportError("injected crash")
                    yield item

        expected = sorted(fingerprint(r).hex for r in originals)
        for round_no in range(20):
            cut = rng.randrange(1, 120)
            with pytest.raises(SourceUnavailable):
                harvester.harvest(oai_source(), HarvestMode.FULL, client=FaultyClient(cut))
            harvester.harvest(
                oai_source(), HarvestMode.FULL,
                client=OaiClient("http://testserver/oai", http=TestClient(app)),
            )
            live = store.live_records()
            identifiers = [r.identifier for r in live]
            assert len(identifiers) == len(set(identifiers)) == 120, f"round {round_no}"
            assert sorted(fingerprint(r).hex for r in live) == expected, f"round {round_no}"
