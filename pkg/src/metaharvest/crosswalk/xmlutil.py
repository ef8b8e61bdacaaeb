"""Namespace-tolerant XML helpers.

Harvested documents are inconsistently namespaced in the wild, so element
lookup here matches on local name: a namespaced document and its plain
counterpart walk the same paths.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET


class MalformedXml(Exception):
    """Input is not well-formed XML."""


def parse_xml(data: bytes) -> ET.Element:
    if not data or not data.strip():
        raise MalformedXml("empty document")
    try:
        return ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc


def local_name(tag) -> str:
    if not isinstance(tag, str):  # comments/PIs have non-str tags
        return ""
    if tag.startswith("{"):
        return tag.rsplit("}", 1)[1]
    return tag


def namespace_of(tag: str) -> str:
    if isinstance(tag, str) and tag.startswith("{"):
        return tag[1:].split("}", 1)[0]
    return ""


def children_named(el: ET.Element, name: str) -> list[ET.Element]:
    return [c for c in el if local_name(c.tag) == name]


def find_path(el: ET.Element, *path: str) -> ET.Element | None:
    """First element reached by walking local-name steps, document order."""
    current = [el]
    for step in path:
        nxt: list[ET.Element] = []
        for c in current:
            nxt.extend(children_named(c, step))
        if not nxt:
            return None
        current = nxt
    return current[0]


def findall_path(el: ET.Element, *path: str) -> list[ET.Element]:
    current = [el]
    for step in path:
        nxt: list[ET.Element] = []
        for c in current:
            nxt.extend(children_named(c, step))
        current = nxt
    return current


def iter_named(el: ET.Element, name: str):
    """All descendants (any depth) with the given local name."""
    for node in el.iter():
        if local_name(node.tag) == name:
            yield node


def text_of(el: ET.Element | None) -> str:
    if el is None:
        return ""
    return "".join(el.itertext()).strip()


def text_at(el: ET.Element, *path: str) -> str:
    return text_of(find_path(el, *path))
