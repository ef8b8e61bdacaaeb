"""Checksummed snapshot files holding a record-store JSON-lines section.

Format: a header line ``MHSNAP1 <count> <sha256-hex>`` where the checksum
covers the body bytes, followed by one canonical record JSON object per line,
sorted by identifier. Used both for record-store compaction and for search
index persistence.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path
from typing import Iterable

from .model import MetadataRecord, record_from_line, record_to_line

SNAPSHOT_MAGIC = "MHSNAP1"


class CorruptSnapshot(Exception):
    """Snapshot file failed its structural or checksum validation."""


def write_snapshot(path: Path, records: Iterable[MetadataRecord]) -> int:
    """Write records to a checksummed snapshot file. Returns record count."""
    body_lines = [record_to_line(r) + "\n" for r in sorted(records, key=lambda r: r.identifier)]
    body = "".join(body_lines).encode("utf-8")
    digest = hashlib.sha256(body).hexdigest()
    header = f"{SNAPSHOT_MAGIC} {len(body_lines)} {digest}\n".encode("ascii")
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(body)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
    return len(body_lines)


def read_snapshot(path: Path) -> list[MetadataRecord]:
    try:
        with open(path, "rb") as fh:
            header = fh.readline().decode("ascii", errors="replace").rstrip("\n")
            body = fh.read()
    except OSError as exc:
        raise CorruptSnapshot(f"{path}: unreadable: {exc}") from exc
    parts = header.split(" ")
    if len(parts) != 3 or parts[0] != SNAPSHOT_MAGIC:
        raise CorruptSnapshot(f"{path}: bad snapshot header")
    try:
        count = int(parts[1])
    except ValueError:
        raise CorruptSnapshot(f"{path}: bad record count in header") from None
    if hashlib.sha256(body).hexdigest() != parts[2]:
        raise CorruptSnapshot(f"{path}: checksum mismatch")
    lines = body.decode("utf-8").splitlines()
    if len(lines) != count:
        raise CorruptSnapshot(f"{path}: expected {count} records, found {len(lines)}")
    try:
        return [record_from_line(line) for line in lines]
    except Exception as exc:
        raise CorruptSnapshot(f"{path}: undecodable record line: {exc}") from exc
