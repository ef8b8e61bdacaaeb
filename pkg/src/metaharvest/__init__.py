"""metaharvest: metadata harvesting, indexing and search toolkit."""

from .model import (
    Fingerprint,
    GeoBoundingBox,
    MetadataRecord,
    ModelError,
    SchemaKind,
    TemporalExtent,
    canonicalize,
    fingerprint,
    qualify_identifier,
)

__version__ = "0.1.0"

__all__ = [
    "MetadataRecord",
    "GeoBoundingBox",
    "TemporalExtent",
    "Fingerprint",
    "SchemaKind",
    "ModelError",
    "canonicalize",
    "fingerprint",
    "qualify_identifier",
    "__version__",
]
