"""Crosswalks: detect a document's metadata standard and map it into the
unified record model, or export a record as oai_dc.

Detection is by root-element signature and is never guessed: documents whose
root matches no known standard are rejected with :class:`UnknownSchema`.

Signature table:
  FGDC        root ``metadata`` with an ``idinfo`` child
  EML         root ``eml``
  DIF         root ``DIF``
  ISO19115    root ``MD_Metadata``
  OaiDc       root ``dc`` in the oai_dc namespace
  DublinCore  root ``dc`` in any other (or no) namespace
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..model import MetadataRecord, SchemaKind, canonicalize, qualify_identifier
from .common import (
    EPOCH,
    CoordinateOutOfRange,
    InvalidDate,
    MissingRequiredField,
)
from .dublin_core import OAI_DC_NS, build_oai_dc
from .xmlutil import MalformedXml, children_named, local_name, namespace_of, parse_xml
from . import dif, dublin_core, eml, fgdc, iso19115


class UnknownSchema(Exception):
    """No signature matched the document's root element."""


class DeletedRecord(Exception):
    """Deleted records cannot be exported."""


def detect_schema(document: bytes) -> SchemaKind:
    root = parse_xml(document)
    name = local_name(root.tag)
    if name == "metadata" and children_named(root, "idinfo"):
        return SchemaKind.FGDC
    if name == "eml":
        return SchemaKind.EML
    if name == "DIF":
        return SchemaKind.DIF
    if name == "MD_Metadata":
        return SchemaKind.ISO19115
    if name == "dc":
        if namespace_of(root.tag) == OAI_DC_NS:
            return SchemaKind.OAI_DC
        return SchemaKind.DUBLIN_CORE
    raise UnknownSchema(f"unrecognized root element {root.tag!r}")


_EXTRACTORS = {
    SchemaKind.FGDC: fgdc.extract,
    SchemaKind.EML: eml.extract,
    SchemaKind.DIF: dif.extract,
    SchemaKind.DUBLIN_CORE: dublin_core.extract,
    SchemaKind.OAI_DC: dublin_core.extract,
    SchemaKind.ISO19115: iso19115.extract,
}


def parse(schema: SchemaKind, document: bytes, source_id: str) -> MetadataRecord:
    """Crosswalk a document of the given standard into a canonical record.

    The record's identifier is ``{source_id}:{local}`` where ``local`` is the
    standard's native identifier when it defines one, else a digest of the
    title. The datestamp is set to the epoch; harvest callers overwrite it
    with provider metadata.

    Raises MalformedXml, MissingRequiredField, CoordinateOutOfRange or
    InvalidDate.
    """
    root = parse_xml(document)
    fields = _EXTRACTORS[schema](root)
    record = MetadataRecord(
        identifier=qualify_identifier(source_id, fields["local_id"]),
        source_id=source_id,
        schema=schema,
        title=fields["title"],
        abstract=fields["abstract"],
        keywords=tuple(fields["keywords"]),
        authors=tuple(fields["authors"]),
        data_urls=tuple(fields["data_urls"]),
        bbox=fields["bbox"],
        temporal=fields["temporal"],
        datestamp=EPOCH,
        deleted=False,
        sets=(),
        raw_document=bytes(document),
    )
    return canonicalize(record)


def parse_auto(document: bytes, source_id: str) -> MetadataRecord:
    """Detect the standard, then crosswalk."""
    return parse(detect_schema(document), document, source_id)


def to_oai_dc(record: MetadataRecord) -> bytes:
    """Render a record as an oai_dc document (UTF-8, XML declaration)."""
    if record.deleted:
        raise DeletedRecord(record.identifier)
    element = build_oai_dc(record)
    return ET.tostring(element, encoding="UTF-8", xml_declaration=True)


__all__ = [
    "detect_schema",
    "parse",
    "parse_auto",
    "to_oai_dc",
    "build_oai_dc",
    "UnknownSchema",
    "DeletedRecord",
    "MalformedXml",
    "MissingRequiredField",
    "CoordinateOutOfRange",
    "InvalidDate",
    "EPOCH",
]
