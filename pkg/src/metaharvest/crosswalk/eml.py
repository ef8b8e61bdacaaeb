"""EML (Ecological Metadata Language) crosswalk.

Element paths:
  title      dataset/title
  abstract   dataset/abstract (full text content, para wrappers included)
  keywords   dataset/keywordSet/keyword
  authors    dataset/creator/individualName, rendered "surName, givenName"
  bbox       dataset/coverage/geographicCoverage/boundingCoordinates
  temporal   dataset/coverage/temporalCoverage/rangeOfDates
  local id   the eml root's packageId attribute
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .common import build_bbox, build_temporal, derived_local_id, require_title
from .xmlutil import find_path, findall_path, text_at, text_of


def _person_name(individual: ET.Element) -> str:
    surname = text_at(individual, "surName")
    given = " ".join(
        text_of(g) for g in findall_path(individual, "givenName") if text_of(g)
    )
    if surname and given:
        return f"{surname}, {given}"
    return surname or given


def extract(root: ET.Element) -> dict:
    title = require_title(text_at(root, "dataset", "title"))
    abstract = text_at(root, "dataset", "abstract")
    keywords = [
        text_of(el)
        for el in findall_path(root, "dataset", "keywordSet", "keyword")
        if text_of(el)
    ]
    authors = [
        name
        for el in findall_path(root, "dataset", "creator", "individualName")
        if (name := _person_name(el))
    ]

    bbox = None
    coords = find_path(
        root, "dataset", "coverage", "geographicCoverage", "boundingCoordinates"
    )
    if coords is not None:
        bbox = build_bbox(
            text_at(coords, "westBoundingCoordinate"),
            text_at(coords, "eastBoundingCoordinate"),
            text_at(coords, "southBoundingCoordinate"),
            text_at(coords, "northBoundingCoordinate"),
        )

    temporal = None
    range_el = find_path(root, "dataset", "coverage", "temporalCoverage", "rangeOfDates")
    if range_el is not None:
        temporal = build_temporal(
            text_at(range_el, "beginDate", "calendarDate"),
            text_at(range_el, "endDate", "calendarDate"),
        )

    package_id = (root.get("packageId") or "").strip()
    return {
        "local_id": package_id or derived_local_id(title),
        "title": title,
        "abstract": abstract,
        "keywords": keywords,
        "authors": authors,
        "data_urls": [],
        "bbox": bbox,
        "temporal": temporal,
    }
