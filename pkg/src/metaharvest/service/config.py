"""Service configuration: a single JSON file describing the repository
identity, network binding, data paths and harvest sources.

Optional keys default relative to ``data_dir``:
  record_store_dir    {data_dir}/store
  harvest_state_path  {data_dir}/harvest_state.json
  audit_log_path      {data_dir}/harvests.jsonl
  snapshot_path       {data_dir}/index.snap

The config path can also come from the METAHARVEST_CONFIG environment
variable when the CLI is started without --config.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlparse

from ..harvest import SourceDescriptor, SourceKind

ENV_CONFIG = "METAHARVEST_CONFIG"


class ConfigError(Exception):
    pass


@dataclass
class ServiceConfig:
    repository_name: str
    base_url: str
    data_dir: Path
    bind: str = "127.0.0.1"
    port: int = 8765
    admin_email: str = "admin@example.org"
    page_size: int = 10
    oai_page_size: int = 100
    sources: list[SourceDescriptor] = field(default_factory=list)
    collections: dict[str, list[str]] = field(default_factory=dict)
    record_store_dir: Path | None = None
    harvest_state_path: Path | None = None
    audit_log_path: Path | None = None
    snapshot_path: Path | None = None
    ui_dir: Path | None = None

    def __post_init__(self) -> None:
        parsed = urlparse(self.base_url)
        if not parsed.scheme or not parsed.netloc:
            raise ConfigError(f"base_url {self.base_url!r} must be absolute")
        self.data_dir = Path(self.data_dir)
        if self.record_store_dir is None:
            self.record_store_dir = self.data_dir / "store"
        if self.harvest_state_path is None:
            self.harvest_state_path = self.data_dir / "harvest_state.json"
        if self.audit_log_path is None:
            self.audit_log_path = self.data_dir / "harvests.jsonl"
        if self.snapshot_path is None:
            self.snapshot_path = self.data_dir / "index.snap"

    @property
    def short_name(self) -> str:
        # OpenSearch caps ShortName at 16 characters
        return self.repository_name[:16]

    def check_writable(self) -> None:
        """Fail fast on unwritable data paths."""
        for directory in (
            self.data_dir,
            self.record_store_dir,
            self.harvest_state_path.parent,
            self.audit_log_path.parent,
            self.snapshot_path.parent,
        ):
            try:
                Path(directory).mkdir(parents=True, exist_ok=True)
                probe = Path(directory) / ".write-probe"
                probe.write_text("")
                probe.unlink()
            except OSError as exc:
                raise ConfigError(f"path {directory} is not writable: {exc}") from exc


def _parse_source(doc: dict) -> SourceDescriptor:
    try:
        kind = SourceKind(doc["kind"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"source {doc.get('source_id')!r}: bad kind: {exc}") from exc
    try:
        return SourceDescriptor(
            source_id=doc["source_id"],
            kind=kind,
            location=doc["location"],
            metadata_prefix=doc.get("metadata_prefix"),
            set_spec=doc.get("set"),
            interval_seconds=int(doc.get("interval_seconds", 300)),
            enabled=bool(doc.get("enabled", True)),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid source entry: {exc}") from exc


def load_config(path: str | Path | None = None) -> ServiceConfig:
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if path is None:
        raise ConfigError(f"no config path given and {ENV_CONFIG} is unset")
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    try:
        sources = [_parse_source(s) for s in doc.get("sources", [])]
        seen = set()
        for s in sources:
            if s.source_id in seen:
                raise ConfigError(f"duplicate source_id {s.source_id!r}")
            seen.add(s.source_id)
        return ServiceConfig(
            repository_name=doc["repository_name"],
            base_url=doc["base_url"],
            data_dir=Path(doc["data_dir"]),
            bind=doc.get("bind", "127.0.0.1"),
            port=int(doc.get("port", 8765)),
            admin_email=doc.get("admin_email", "admin@example.org"),
            page_size=int(doc.get("page_size", 10)),
            oai_page_size=int(doc.get("oai_page_size", 100)),
            sources=sources,
            collections={k: list(v) for k, v in doc.get("collections", {}).items()},
            record_store_dir=Path(doc["record_store_dir"]) if "record_store_dir" in doc else None,
            harvest_state_path=Path(doc["harvest_state_path"])
            if "harvest_state_path" in doc
            else None,
            audit_log_path=Path(doc["audit_log_path"]) if "audit_log_path" in doc else None,
            snapshot_path=Path(doc["snapshot_path"]) if "snapshot_path" in doc else None,
            ui_dir=Path(doc["ui_dir"]) if "ui_dir" in doc else None,
        )
    except KeyError as exc:
        raise ConfigError(f"config missing required key {exc}") from exc
