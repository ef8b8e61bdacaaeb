"""GCMD DIF (Directory Interchange Format) crosswalk.

Element paths:
  local id   Entry_ID
  title      Entry_Title
  abstract   Summary (full text content)
  keywords   Keyword elements, plus each Parameters block's subfields
             joined with " > "
  bbox       Spatial_Coverage
  temporal   Temporal_Coverage/{Start_Date,Stop_Date}
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .common import build_bbox, build_temporal, derived_local_id, require_title
from .xmlutil import find_path, findall_path, text_at, text_of


def _parameter_chain(parameters: ET.Element) -> str:
    parts = [text_of(child) for child in parameters]
    return " > ".join(p for p in parts if p)


def extract(root: ET.Element) -> dict:
    title = require_title(text_at(root, "Entry_Title"))
    local_id = text_at(root, "Entry_ID")
    abstract = text_at(root, "Summary")

    keywords = [text_of(el) for el in findall_path(root, "Keyword") if text_of(el)]
    for parameters in findall_path(root, "Parameters"):
        chain = _parameter_chain(parameters)
        if chain:
            keywords.append(chain)

    bbox = None
    spatial = find_path(root, "Spatial_Coverage")
    if spatial is not None:
        bbox = build_bbox(
            text_at(spatial, "Westernmost_Longitude"),
            text_at(spatial, "Easternmost_Longitude"),
            text_at(spatial, "Southernmost_Latitude"),
            text_at(spatial, "Northernmost_Latitude"),
        )

    temporal = None
    coverage = find_path(root, "Temporal_Coverage")
    if coverage is not None:
        temporal = build_temporal(
            text_at(coverage, "Start_Date"), text_at(coverage, "Stop_Date")
        )

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
