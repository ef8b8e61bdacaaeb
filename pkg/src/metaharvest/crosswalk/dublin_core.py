"""Dublin Core / oai_dc crosswalk, both directions.

Reading: direct dc:* mapping. dc:identifier values with a URL scheme become
data_urls; the first non-URL identifier becomes the local identifier.
dc:coverage is read for spatial extent only when it matches this toolkit's
"box: W,S,E,N" text encoding, and for temporal extent when it matches
"time: START/END" (either side may be empty for an open end); any other
coverage text is ignored.

Writing (:func:`build_oai_dc`) emits the same encodings, so records survive
an oai_dc round trip.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from .common import build_bbox, build_temporal, derived_local_id, require_title
from .xmlutil import local_name, text_of

OAI_DC_NS = "http://www.openarchives.org/OAI/2.0/oai_dc/"
DC_NS = "http://purl.org/dc/elements/1.1/"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"
OAI_DC_SCHEMA = "http://www.openarchives.org/OAI/2.0/oai_dc.xsd"

_URL_SCHEME = re.compile(r"^(https?|ftp)://", re.IGNORECASE)
_BOX = re.compile(r"^box:\s*([^,]+),\s*([^,]+),\s*([^,]+),\s*([^,]+)\s*$")
_TIME = re.compile(r"^time:\s*(\S*)/(\S*)\s*$")

ET.register_namespace("oai_dc", OAI_DC_NS)
ET.register_namespace("dc", DC_NS)
ET.register_namespace("xsi", XSI_NS)


def _dc_values(root: ET.Element, name: str) -> list[str]:
    return [
        text_of(el)
        for el in root.iter()
        if local_name(el.tag) == name and text_of(el)
    ]


def extract(root: ET.Element) -> dict:
    titles = _dc_values(root, "title")
    title = require_title(titles[0] if titles else "")
    descriptions = _dc_values(root, "description")
    keywords = _dc_values(root, "subject")
    authors = _dc_values(root, "creator")

    data_urls: list[str] = []
    local_id = ""
    for ident in _dc_values(root, "identifier"):
        if _URL_SCHEME.match(ident):
            data_urls.append(ident)
        elif not local_id:
            local_id = ident

    bbox = None
    temporal = None
    for coverage in _dc_values(root, "coverage"):
        if bbox is None and (m := _BOX.match(coverage)):
            # encoding order is W,S,E,N
            bbox = build_bbox(m.group(1), m.group(3), m.group(2), m.group(4))
        elif temporal is None and (m := _TIME.match(coverage)):
            temporal = build_temporal(m.group(1), m.group(2))

    return {
        "local_id": local_id or derived_local_id(title),
        "title": title,
        "abstract": descriptions[0] if descriptions else "",
        "keywords": keywords,
        "authors": authors,
        "data_urls": data_urls,
        "bbox": bbox,
        "temporal": temporal,
    }


def build_oai_dc(record) -> ET.Element:
    """oai_dc:dc element for a record; the caller owns serialization."""
    root = ET.Element(f"{{{OAI_DC_NS}}}dc")
    root.set(
        f"{{{XSI_NS}}}schemaLocation",
        f"{OAI_DC_NS} {OAI_DC_SCHEMA}",
    )

    def add(name: str, value: str) -> None:
        el = ET.SubElement(root, f"{{{DC_NS}}}{name}")
        el.text = value

    add("title", record.title)
    for author in record.authors:
        add("creator", author)
    for kw in record.keywords:
        add("subject", kw)
    if record.abstract:
        add("description", record.abstract)
    for url in record.data_urls:
        add("identifier", url)
    if record.bbox is not None:
        b = record.bbox
        add("coverage", f"box: {b.west!r},{b.south!r},{b.east!r},{b.north!r}")
    if record.temporal is not None:
        start = record.temporal.start.isoformat() if record.temporal.start else ""
        end = record.temporal.end.isoformat() if record.temporal.end else ""
        add("coverage", f"time: {start}/{end}")
    return root
