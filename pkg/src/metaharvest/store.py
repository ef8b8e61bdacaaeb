"""On-disk record store: append-only JSON-lines log plus compaction snapshot.

The store is the source of truth for harvested records. Every apply() appends
one line to ``log.jsonl``; on load the snapshot is read first and the log
replayed on top, latest line per identifier winning. Deleted records are kept
as tombstones (``deleted: true``) so the OAI-PMH provider can report
persistent deletions.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from pathlib import Path

from .model import MetadataRecord, record_from_line, record_to_line
from .snapshots import read_snapshot, write_snapshot

LOG_NAME = "log.jsonl"
SNAPSHOT_NAME = "snapshot.mh"


@dataclass(frozen=True)
class StoreView:
    """Immutable point-in-time view, ordered by identifier ascending."""

    version: int
    records: tuple[MetadataRecord, ...]

    def live(self) -> tuple[MetadataRecord, ...]:
        return tuple(r for r in self.records if not r.deleted)


class RecordStore:
    """Latest-state record map persisted as snapshot + append-only log."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._log_path = self.directory / LOG_NAME
        self._snapshot_path = self.directory / SNAPSHOT_NAME
        self._lock = threading.Lock()
        self._records: dict[str, MetadataRecord] = {}
        self._version = 0
        self._view: StoreView | None = None
        self._log_fh = None
        self._load()

    def _load(self) -> None:
        if self._snapshot_path.exists():
            for record in read_snapshot(self._snapshot_path):
                self._records[record.identifier] = record
                self._version += 1
        if self._log_path.exists():
            with open(self._log_path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    record = record_from_line(line)
                    self._records[record.identifier] = record
                    self._version += 1
        self._log_fh = open(self._log_path, "a", encoding="utf-8")

    def close(self) -> None:
        with self._lock:
            if self._log_fh is not None:
                self._log_fh.close()
                self._log_fh = None

    def apply(self, record: MetadataRecord) -> None:
        """Insert or replace the record, appending it to the log."""
        with self._lock:
            if self._log_fh is None:
                raise RuntimeError("store is closed")
            self._log_fh.write(record_to_line(record) + "\n")
            self._log_fh.flush()
            self._records[record.identifier] = record
            self._version += 1
            self._view = None

    def get(self, identifier: str) -> MetadataRecord | None:
        with self._lock:
            return self._records.get(identifier)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def live_count(self) -> int:
        with self._lock:
            return sum(1 for r in self._records.values() if not r.deleted)

    def identifiers(self) -> list[str]:
        with self._lock:
            return sorted(self._records)

    def records(self) -> list[MetadataRecord]:
        """All latest-state records, tombstones included."""
        with self._lock:
            return list(self._records.values())

    def live_records(self) -> list[MetadataRecord]:
        with self._lock:
            return [r for r in self._records.values() if not r.deleted]

    @property
    def version(self) -> int:
        with self._lock:
            return self._version

    def view(self) -> StoreView:
        """Current immutable view; cached until the next mutation."""
        with self._lock:
            if self._view is None or self._view.version != self._version:
                ordered = tuple(sorted(self._records.values(), key=lambda r: r.identifier))
                self._view = StoreView(version=self._version, records=ordered)
            return self._view

    def compact(self) -> None:
        """Fold the log into the snapshot file and truncate the log."""
        with self._lock:
            if self._log_fh is None:
                raise RuntimeError("store is closed")
            write_snapshot(self._snapshot_path, list(self._records.values()))
            self._log_fh.close()
            self._log_fh = open(self._log_path, "w", encoding="utf-8")

    def writable(self) -> bool:
        return os.access(self.directory, os.W_OK)
