"""FGDC CSDGM crosswalk.

Element paths:
  title      idinfo/citation/citeinfo/title
  authors    idinfo/citation/citeinfo/origin
  abstract   idinfo/descript/abstract
  keywords   idinfo/keywords/theme/themekey
  bbox       idinfo/spdom/bounding/{westbc,eastbc,southbc,northbc}
  temporal   idinfo/timeperd/timeinfo (sngdate/caldate or rngdates/{begdate,enddate})

FGDC has no native identifier element; a digest of the title stands in.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .common import build_bbox, build_temporal, derived_local_id, require_title
from .xmlutil import find_path, findall_path, text_at, text_of


def extract(root: ET.Element) -> dict:
    title = require_title(text_at(root, "idinfo", "citation", "citeinfo", "title"))
    authors = [
        text_of(el)
        for el in findall_path(root, "idinfo", "citation", "citeinfo", "origin")
        if text_of(el)
    ]
    abstract = text_at(root, "idinfo", "descript", "abstract")
    keywords = [
        text_of(el)
        for el in findall_path(root, "idinfo", "keywords", "theme", "themekey")
        if text_of(el)
    ]

    bounding = find_path(root, "idinfo", "spdom", "bounding")
    bbox = None
    if bounding is not None:
        bbox = build_bbox(
            text_at(bounding, "westbc"),
            text_at(bounding, "eastbc"),
            text_at(bounding, "southbc"),
            text_at(bounding, "northbc"),
        )

    temporal = None
    timeinfo = find_path(root, "idinfo", "timeperd", "timeinfo")
    if timeinfo is not None:
        single = text_at(timeinfo, "sngdate", "caldate")
        if single.strip():
            temporal = build_temporal(single, single)
        else:
            temporal = build_temporal(
                text_at(timeinfo, "rngdates", "begdate"),
                text_at(timeinfo, "rngdates", "enddate"),
            )

    return {
        "local_id": derived_local_id(title),
        "title": title,
        "abstract": abstract,
        "keywords": keywords,
        "authors": authors,
        "data_urls": [],
        "bbox": bbox,
        "temporal": temporal,
    }
