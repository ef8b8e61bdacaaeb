"""RSS 2.0 feed and OpenSearch 1.1 description documents."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from datetime import datetime, timezone
from urllib.parse import quote

from ..index.engine import make_snippet
from ..model import MetadataRecord

OPENSEARCH_NS = "http://a9.com/-/spec/opensearch/1.1/"
ET.register_namespace("", OPENSEARCH_NS)

# RFC 822 needs English names whatever the process locale says
_DAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
_MONTHS = (
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
)


def rfc822_date(dt: datetime) -> str:
    dt = dt.astimezone(timezone.utc)
    return (
        f"{_DAYS[dt.weekday()]}, {dt.day:02d} {_MONTHS[dt.month - 1]} {dt.year} "
        f"{dt.hour:02d}:{dt.minute:02d}:{dt.second:02d} GMT"
    )


def rss_feed(
    repository_name: str,
    base_url: str,
    query_text: str,
    records: list[MetadataRecord],
) -> bytes:
    """RSS 2.0 document: one item per record, in the order given."""
    rss = ET.Element("rss", version="2.0")
    channel = ET.SubElement(rss, "channel")
    title = repository_name if not query_text else f"{repository_name}: {query_text}"
    ET.SubElement(channel, "title").text = title
    ET.SubElement(channel, "link").text = base_url
    ET.SubElement(channel, "description").text = f"Search results from {repository_name}"

    for record in records:
        item = ET.SubElement(channel, "item")
        ET.SubElement(item, "title").text = record.title
        ET.SubElement(item, "link").text = (
            f"{base_url}/api/records/{quote(record.identifier, safe='')}"
        )
        ET.SubElement(item, "description").text = make_snippet(record.abstract)
        ET.SubElement(item, "pubDate").text = rfc822_date(record.datestamp)
        guid = ET.SubElement(item, "guid", isPermaLink="false")
        guid.text = record.identifier
    return ET.tostring(rss, encoding="UTF-8", xml_declaration=True)


def opensearch_description(repository_name: str, short_name: str, base_url: str) -> bytes:
    """OpenSearch 1.1 description advertising the JSON search endpoint."""
    root = ET.Element(f"{{{OPENSEARCH_NS}}}OpenSearchDescription")
    ET.SubElement(root, f"{{{OPENSEARCH_NS}}}ShortName").text = short_name[:16]
    ET.SubElement(root, f"{{{OPENSEARCH_NS}}}Description").text = (
        f"Search the {repository_name} metadata catalog"
    )
    url = ET.SubElement(root, f"{{{OPENSEARCH_NS}}}Url")
    url.set("type", "application/json")
    url.set("template", f"{base_url}/api/search?q={{searchTerms}}&page={{startPage?}}")
    return ET.tostring(root, encoding="UTF-8", xml_declaration=True)
