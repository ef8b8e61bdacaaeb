"""ISO 19115 (19139 XML encoding) crosswalk.

Element paths:
  local id   fileIdentifier/CharacterString
  title      identificationInfo/MD_DataIdentification/citation/CI_Citation/title
  abstract   identificationInfo/MD_DataIdentification/abstract
  keywords   MD_Keywords/keyword (anywhere under identificationInfo)
  bbox       EX_GeographicBoundingBox/{west,east,south,north}BoundLongitude/Latitude
  temporal   EX_TemporalExtent/extent/TimePeriod/{beginPosition,endPosition}
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .common import build_bbox, build_temporal, derived_local_id, require_title
from .xmlutil import find_path, iter_named, text_at, text_of


def extract(root: ET.Element) -> dict:
    ident = find_path(root, "identificationInfo", "MD_DataIdentification")
    title = ""
    abstract = ""
    keywords: list[str] = []
    if ident is not None:
        title = text_at(ident, "citation", "CI_Citation", "title")
        abstract = text_at(ident, "abstract")
        for kw_block in iter_named(ident, "MD_Keywords"):
            for kw in iter_named(kw_block, "keyword"):
                value = text_of(kw)
                if value:
                    keywords.append(value)
    title = require_title(title)

    bbox = None
    box_el = next(iter_named(root, "EX_GeographicBoundingBox"), None)
    if box_el is not None:
        bbox = build_bbox(
            text_at(box_el, "westBoundLongitude"),
            text_at(box_el, "eastBoundLongitude"),
            text_at(box_el, "southBoundLatitude"),
            text_at(box_el, "northBoundLatitude"),
        )

    temporal = None
    extent_el = next(iter_named(root, "EX_TemporalExtent"), None)
    if extent_el is not None:
        period = next(iter_named(extent_el, "TimePeriod"), None)
        if period is not None:
            temporal = build_temporal(
                text_at(period, "beginPosition"), text_at(period, "endPosition")
            )

    local_id = text_at(root, "fileIdentifier")
    return {
        "local_id": local_id or derived_local_id(title),
        "title": title,
        "abstract": abstract,
        "keywords": keywords,
        "authors": [],
        "data_urls": [],
        "bbox": bbox,
        "temporal": temporal,
    }
