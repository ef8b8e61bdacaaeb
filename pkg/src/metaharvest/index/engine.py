"""Embedded inverted index with BM25 ranking, filters and facet counts.

Postings live in memory; persistence is a checksummed snapshot of the record
set from which postings are rebuilt on load. Writes are serialized and reads
take a shared lock, so every search evaluates against a consistent
point-in-time state.

Scoring: BM25 with k1=1.2 and b=0.75, per-field document lengths, and
idf = ln(1 + (N - df + 0.5) / (df + 0.5)). A document's score is the sum of
the contributions of every positive (non-negated) Term and Phrase leaf it
matches; a phrase contributes the sum of its constituent term scores, and a
MatchAll leaf contributes a flat 1.0. Ties are broken by identifier
ascending.
"""

from __future__ import annotations

import heapq
import math
import threading
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from ..model import MetadataRecord
from ..snapshots import read_snapshot, write_snapshot
from .analyze import tokenize
from .match import spatial_match, temporal_match
from .query import (
    And,
    IndexedField,
    MatchAll,
    Node,
    Not,
    Or,
    Phrase,
    Query,
    Term,
    UnknownField,
    positive_leaves,
)

K1 = 1.2
B = 0.75

MAX_PAGE_SIZE = 1000
MAX_PAGE_DEPTH = 100_000

FACET_FIELDS = (IndexedField.SOURCE, IndexedField.SCHEMA, IndexedField.KEYWORDS)
_TEXT_FIELDS = (IndexedField.TITLE, IndexedField.ABSTRACT, IndexedField.ALL)


class PageOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class FacetCount:
    value: str
    count: int


@dataclass(frozen=True)
class SearchHit:
    identifier: str
    score: float
    title: str
    snippet: str
    record: MetadataRecord


@dataclass(frozen=True)
class SearchResult:
    total_hits: int
    hits: tuple[SearchHit, ...]
    facets: dict[str, list[FacetCount]] = field(default_factory=dict)


def make_snippet(text: str, limit: int = 200) -> str:
    """First `limit` characters cut back to a word boundary, with ellipsis."""
    if len(text) <= limit:
        return text
    cut = text.rfind(" ", 0, limit + 1)
    if cut <= 0:
        cut = limit
    return text[:cut].rstrip() + "…"


def field_tokens(record: MetadataRecord) -> dict[IndexedField, list[str]]:
    """Analyzed token streams per indexed field; All is the concatenation."""
    title = tokenize(record.title)
    abstract = tokenize(record.abstract)
    kw = [t for k in record.keywords for t in tokenize(k)]
    au = [t for a in record.authors for t in tokenize(a)]
    return {
        IndexedField.TITLE: title,
        IndexedField.ABSTRACT: abstract,
        IndexedField.KEYWORDS: kw,
        IndexedField.AUTHOR: au,
        IndexedField.ALL: title + abstract + kw + au,
        IndexedField.SOURCE: tokenize(record.source_id),
        IndexedField.SCHEMA: tokenize(record.schema.value),
    }


class _RWLock:
    """Reader-preference lock: many readers or one writer."""

    def __init__(self) -> None:
        self._cond = threading.Condition()
        self._readers = 0
        self._writing = False

    @contextmanager
    def read(self):
        with self._cond:
            while self._writing:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if self._readers == 0:
                    self._cond.notify_all()

    @contextmanager
    def write(self):
        with self._cond:
            while self._writing or self._readers:
                self._cond.wait()
            self._writing = True
        try:
            yield
        finally:
            with self._cond:
                self._writing = False
                self._cond.notify_all()


class SearchIndex:
    def __init__(self) -> None:
        self._lock = _RWLock()
        self._ordinals: dict[str, int] = {}
        self._records: list[MetadataRecord | None] = []
        self._postings: dict[IndexedField, dict[str, dict[int, int]]] = {
            f: {} for f in IndexedField
        }
        self._fieldlen: dict[IndexedField, list[int]] = {f: [] for f in IndexedField}
        self._totallen: dict[IndexedField, int] = {f: 0 for f in IndexedField}
        self._alive: set[int] = set()

    # --- write path --------------------------------------------------------

    def upsert(self, record: MetadataRecord) -> None:
        """Make the record searchable, replacing any previous state for its
        identifier. Records flagged deleted are removed instead."""
        if record.deleted:
            self.delete(record.identifier)
            return
        with self._lock.write():
            ordinal = self._ordinals.get(record.identifier)
            if ordinal is not None:
                self._remove_postings(ordinal)
            else:
                ordinal = len(self._records)
                self._records.append(None)
                for f in IndexedField:
                    self._fieldlen[f].append(0)
                self._ordinals[record.identifier] = ordinal
            self._records[ordinal] = record
            self._alive.add(ordinal)
            for f, toks in field_tokens(record).items():
                self._fieldlen[f][ordinal] = len(toks)
                self._totallen[f] += len(toks)
                postings_f = self._postings[f]
                for term, tf in Counter(toks).items():
                    bucket = postings_f.get(term)
                    if bucket is None:
                        bucket = postings_f[term] = {}
                    bucket[ordinal] = tf

    def delete(self, identifier: str) -> None:
        """Remove the record from all future searches; unknown ids are a no-op."""
        with self._lock.write():
            ordinal = self._ordinals.pop(identifier, None)
            if ordinal is None:
                return
            self._remove_postings(ordinal)
            self._records[ordinal] = None
            self._alive.discard(ordinal)

    def _remove_postings(self, ordinal: int) -> None:
        old = self._records[ordinal]
        if old is None:
            return
        for f, toks in field_tokens(old).items():
            self._totallen[f] -= len(toks)
            self._fieldlen[f][ordinal] = 0
            postings_f = self._postings[f]
            for term in set(toks):
                bucket = postings_f.get(term)
                if bucket is not None:
                    bucket.pop(ordinal, None)
                    if not bucket:
                        del postings_f[term]

    # --- read path ---------------------------------------------------------

    def __len__(self) -> int:
        with self._lock.read():
            return len(self._alive)

    def get(self, identifier: str) -> MetadataRecord | None:
        with self._lock.read():
            ordinal = self._ordinals.get(identifier)
            return None if ordinal is None else self._records[ordinal]

    def search(
        self,
        query: Query,
        page: int = 0,
        page_size: int = 10,
        facet_fields: tuple[IndexedField, ...] = (),
    ) -> SearchResult:
        if page < 0 or not 1 <= page_size <= MAX_PAGE_SIZE:
            raise PageOutOfRange(f"page {page} / page_size {page_size} out of range")
        if page * page_size > MAX_PAGE_DEPTH:
            raise PageOutOfRange(f"paging beyond {MAX_PAGE_DEPTH} results is not supported")
        for f in facet_fields:
            if f not in FACET_FIELDS:
                raise UnknownField(f.value)
        with self._lock.read():
            candidates = self._candidates(query)
            scores = self._score(query.ast, candidates)
            offset = page * page_size
            records = self._records
            top = heapq.nsmallest(
                offset + page_size,
                candidates,
                key=lambda o: (-scores[o], records[o].identifier),
            )[offset:]
            hits = tuple(
                SearchHit(
                    identifier=records[o].identifier,
                    score=scores[o],
                    title=records[o].title,
                    snippet=make_snippet(records[o].abstract),
                    record=records[o],
                )
                for o in top
            )
            facets = {
                f.value: self._facet_counts(f, candidates) for f in facet_fields
            }
            return SearchResult(total_hits=len(candidates), hits=hits, facets=facets)

    def _candidates(self, query: Query) -> set[int]:
        candidates = self._eval(query.ast)
        if query.spatial is not None:
            qbox, rel = query.spatial
            candidates = {
                o
                for o in candidates
                if (r := self._records[o]).bbox is not None
                and spatial_match(r.bbox, qbox, rel)
            }
        if query.temporal is not None:
            qstart, qend = query.temporal
            candidates = {
                o
                for o in candidates
                if (r := self._records[o]).temporal is not None
                and temporal_match(r.temporal, qstart, qend)
            }
        return candidates

    def match_records(self, query: Query) -> list["MetadataRecord"]:
        """Every record the query matches, in no particular order."""
        with self._lock.read():
            return [self._records[o] for o in self._candidates(query)]

    def _eval(self, node: Node) -> set[int]:
        if isinstance(node, Term):
            bucket = self._postings[node.field].get(node.token)
            return set(bucket) if bucket else set()
        if isinstance(node, Phrase):
            return self._phrase_match(node)
        if isinstance(node, MatchAll):
            return set(self._alive)
        if isinstance(node, And):
            positive = [c for c in node.children if not isinstance(c, Not)]
            negative = [c for c in node.children if isinstance(c, Not)]
            sets = sorted((self._eval(c) for c in positive), key=len)
            out = sets[0] if sets else set(self._alive)
            for s in sets[1:]:
                out &= s
                if not out:
                    return out
            for n in negative:
                out -= self._eval(n.child)
                if not out:
                    break
            return out
        if isinstance(node, Or):
            out: set[int] = set()
            for c in node.children:
                out |= self._eval(c)
            return out
        raise TypeError(f"unexpected query node {node!r}")

    def _phrase_match(self, phrase: Phrase) -> set[int]:
        tokens = list(phrase.tokens)
        postings_f = self._postings[phrase.field]
        buckets = [postings_f.get(t) for t in tokens]
        if any(b is None for b in buckets):
            return set()
        candidates = set(min(buckets, key=len))
        for b in buckets:
            candidates &= set(b)
            if not candidates:
                return candidates
        if phrase.field in _TEXT_FIELDS:
            return {o for o in candidates if self._contains_run(o, phrase.field, tokens)}
        # keywords/author/source/schema: phrases match whole values
        out = set()
        for o in candidates:
            record = self._records[o]
            values = self._field_values(record, phrase.field)
            if any(tokenize(v) == tokens for v in values):
                out.add(o)
        return out

    def _contains_run(self, ordinal: int, fld: IndexedField, tokens: list[str]) -> bool:
        stream = field_tokens(self._records[ordinal])[fld]
        n, m = len(stream), len(tokens)
        first = tokens[0]
        for i in range(n - m + 1):
            if stream[i] == first and stream[i : i + m] == tokens:
                return True
        return False

    @staticmethod
    def _field_values(record: MetadataRecord, fld: IndexedField) -> tuple[str, ...]:
        if fld is IndexedField.KEYWORDS:
            return record.keywords
        if fld is IndexedField.AUTHOR:
            return record.authors
        if fld is IndexedField.SOURCE:
            return (record.source_id,)
        if fld is IndexedField.SCHEMA:
            return (record.schema.value,)
        raise ValueError(f"{fld} has no whole values")

    def _score(self, ast: Node, candidates: set[int]) -> dict[int, float]:
        scores = dict.fromkeys(candidates, 0.0)
        if not candidates:
            return scores
        n_docs = len(self._alive)
        for leaf in positive_leaves(ast):
            if isinstance(leaf, MatchAll):
                for o in candidates:
                    scores[o] += 1.0
            elif isinstance(leaf, Term):
                self._add_term_scores(leaf.field, leaf.token, candidates, scores, n_docs)
            elif isinstance(leaf, Phrase):
                matched = self._phrase_match(leaf) & candidates
                if not matched:
                    continue
                for token in leaf.tokens:
                    self._add_term_scores(leaf.field, token, matched, scores, n_docs)
        return scores

    def _add_term_scores(
        self,
        fld: IndexedField,
        token: str,
        docs: set[int],
        scores: dict[int, float],
        n_docs: int,
    ) -> None:
        bucket = self._postings[fld].get(token)
        if not bucket:
            return
        df = len(bucket)
        idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
        avg_len = self._totallen[fld] / n_docs
        if avg_len == 0:
            return
        lengths = self._fieldlen[fld]
        if len(bucket) <= len(docs):
            pairs = [(o, tf) for o, tf in bucket.items() if o in docs]
        else:
            pairs = [(o, bucket[o]) for o in docs if o in bucket]
        for o, tf in pairs:
            norm = K1 * (1.0 - B + B * lengths[o] / avg_len)
            scores[o] += idf * tf * (K1 + 1.0) / (tf + norm)

    def _facet_counts(self, fld: IndexedField, candidates: set[int], top: int = 10) -> list[FacetCount]:
        counter: Counter[str] = Counter()
        for o in candidates:
            counter.update(self._field_values(self._records[o], fld))
        ranked = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
        return [FacetCount(value=v, count=c) for v, c in ranked]

    # --- persistence -------------------------------------------------------

    def snapshot_save(self, path: str | Path) -> int:
        with self._lock.read():
            live = [self._records[o] for o in self._alive]
            return write_snapshot(Path(path), live)

    def snapshot_load(self, path: str | Path) -> int:
        """Replace index contents with the snapshot's records, rebuilding
        postings. Raises CorruptSnapshot on damaged files."""
        records = read_snapshot(Path(path))
        with self._lock.write():
            self._ordinals.clear()
            self._records.clear()
            self._alive.clear()
            self._postings = {f: {} for f in IndexedField}
            self._fieldlen = {f: [] for f in IndexedField}
            self._totallen = {f: 0 for f in IndexedField}
        for record in records:
            self.upsert(record)
        return len(records)

    def records(self) -> list[MetadataRecord]:
        with self._lock.read():
            return [self._records[o] for o in self._alive]
