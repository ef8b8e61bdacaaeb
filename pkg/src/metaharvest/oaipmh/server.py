"""OAI-PMH 2.0 repository: verb dispatch over a record-store view, and the
normative XML serialization of responses.

Lists paginate at a configured page size. Tokens pin the store view they
were issued against, so one list chain always partitions a single snapshot;
records applied mid-harvest only show up in later list requests. Deleted
records surface as header-only entries with status="deleted" and the
repository declares persistent deleted-record support.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Sequence

from ..crosswalk.dublin_core import OAI_DC_NS, OAI_DC_SCHEMA, build_oai_dc
from ..model import MetadataRecord, SchemaKind, format_datestamp
from ..store import StoreView
from .protocol import (
    OaiError,
    OaiErrorCode,
    OaiRequest,
    Verb,
    validate_request,
    window_bounds,
)
from .tokens import BadToken, decode_token, encode_token

OAI_NS = "http://www.openarchives.org/OAI/2.0/"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"
OAI_SCHEMA = "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd"

ET.register_namespace("oai", OAI_NS)
ET.register_namespace("xsi", XSI_NS)

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class FormatInfo:
    prefix: str
    schema_url: str
    namespace_uri: str


FORMATS: dict[str, FormatInfo] = {
    "oai_dc": FormatInfo("oai_dc", OAI_DC_SCHEMA, OAI_DC_NS),
    "fgdc": FormatInfo(
        "fgdc",
        "https://www.fgdc.gov/metadata/fgdc-std-001-1998.xsd",
        "https://www.fgdc.gov/metadata/csdgm",
    ),
    "eml": FormatInfo(
        "eml",
        "https://eml.ecoinformatics.org/eml-2.2.0/eml.xsd",
        "https://eml.ecoinformatics.org/eml-2.2.0",
    ),
    "dif": FormatInfo(
        "dif",
        "https://gcmd.gsfc.nasa.gov/Aboutus/xml/dif/dif_v9.8.2.xsd",
        "https://gcmd.gsfc.nasa.gov/Aboutus/xml/dif/",
    ),
    "iso19115": FormatInfo(
        "iso19115",
        "https://www.isotc211.org/2005/gmd/gmd.xsd",
        "https://www.isotc211.org/2005/gmd",
    ),
}

NATIVE_PREFIX: dict[SchemaKind, str] = {
    SchemaKind.FGDC: "fgdc",
    SchemaKind.EML: "eml",
    SchemaKind.DIF: "dif",
    SchemaKind.ISO19115: "iso19115",
    SchemaKind.DUBLIN_CORE: "oai_dc",
    SchemaKind.OAI_DC: "oai_dc",
}


@dataclass(frozen=True)
class TokenInfo:
    value: str  # empty string on the final page of a multi-page list
    cursor: int
    complete_list_size: int


@dataclass(frozen=True)
class IdentifyPayload:
    repository_name: str
    base_url: str
    admin_email: str
    earliest_datestamp: datetime


@dataclass(frozen=True)
class FormatsPayload:
    formats: tuple[FormatInfo, ...]


@dataclass(frozen=True)
class SetsPayload:
    sets: tuple[str, ...]


@dataclass(frozen=True)
class ListPayload:
    verb: Verb
    prefix: str
    items: tuple[MetadataRecord, ...]
    token: TokenInfo | None


@dataclass(frozen=True)
class RecordPayload:
    record: MetadataRecord
    prefix: str


@dataclass(frozen=True)
class OaiResponse:
    response_date: datetime
    base_url: str
    echo_args: dict[str, str]  # empty on badVerb/badArgument per protocol
    payload: object | None = None
    errors: tuple[OaiError, ...] = ()


@dataclass
class OaiServerConfig:
    repository_name: str
    base_url: str
    admin_email: str = "admin@example.org"
    page_size: int = 100
    token_ttl_seconds: int = 3600
    secret: bytes = b""
    # extra set tags: tag -> source_ids it applies to
    collections: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.secret:
            self.secret = f"{self.repository_name}\x1f{self.base_url}".encode("utf-8")


class OaiServer:
    """Protocol handler; a pure function of (request, pinned store view)."""

    PINNED_VIEWS = 16

    def __init__(self, config: OaiServerConfig, view_source: Callable[[], StoreView]):
        self.config = config
        self._view_source = view_source
        self._pinned: OrderedDict[int, StoreView] = OrderedDict()

    # --- dispatch ------------------------------------------------------

    def handle_request(
        self, raw_args: Sequence[tuple[str, str]], now: datetime | None = None
    ) -> OaiResponse:
        now = now or datetime.now(timezone.utc).replace(microsecond=0)
        validated = validate_request(list(raw_args))
        if isinstance(validated, OaiError):
            return OaiResponse(now, self.config.base_url, {}, errors=(validated,))
        echo = {"verb": validated.verb.value, **validated.arguments}
        result = self._dispatch(validated, now)
        if isinstance(result, OaiError):
            return OaiResponse(now, self.config.base_url, echo, errors=(result,))
        return OaiResponse(now, self.config.base_url, echo, payload=result)

    def _dispatch(self, request: OaiRequest, now: datetime):
        verb = request.verb
        if verb is Verb.IDENTIFY:
            return self._identify()
        if verb is Verb.LIST_METADATA_FORMATS:
            return self._list_formats(request.arguments)
        if verb is Verb.LIST_SETS:
            return self._list_sets(request.arguments)
        if verb in (Verb.LIST_IDENTIFIERS, Verb.LIST_RECORDS):
            return self._list(verb, request.arguments, now)
        if verb is Verb.GET_RECORD:
            return self._get_record(request.arguments)
        raise AssertionError(f"unhandled verb {verb}")

    # --- verb handlers ---------------------------------------------------

    def _identify(self) -> IdentifyPayload:
        view = self._view_source()
        earliest = min((r.datestamp for r in view.records), default=EPOCH)
        return IdentifyPayload(
            repository_name=self.config.repository_name,
            base_url=self.config.base_url,
            admin_email=self.config.admin_email,
            earliest_datestamp=earliest,
        )

    def _list_formats(self, args: dict[str, str]):
        identifier = args.get("identifier")
        if identifier is None:
            return FormatsPayload(tuple(FORMATS[p] for p in sorted(FORMATS)))
        record = self._find(identifier)
        if record is None:
            return OaiError(OaiErrorCode.ID_DOES_NOT_EXIST, identifier)
        if record.deleted:
            return OaiError(
                OaiErrorCode.NO_METADATA_FORMATS,
                f"{identifier} is deleted; no formats can be disseminated",
            )
        prefixes = {"oai_dc"}
        native = NATIVE_PREFIX[record.schema]
        if record.raw_document and native != "oai_dc":
            prefixes.add(native)
        return FormatsPayload(tuple(FORMATS[p] for p in sorted(prefixes)))

    def _list_sets(self, args: dict[str, str]):
        if "resumptionToken" in args:
            # set lists are never paginated, so any token is stale
            return OaiError(OaiErrorCode.BAD_RESUMPTION_TOKEN, "no set list in progress")
        view = self._view_source()
        sets: set[str] = set()
        for record in view.records:
            sets.update(self._effective_sets(record))
        if not sets:
            return OaiError(OaiErrorCode.NO_SET_HIERARCHY, "this repository has no sets")
        return SetsPayload(tuple(sorted(sets)))

    def _list(self, verb: Verb, args: dict[str, str], now: datetime):
        if "resumptionToken" in args:
            try:
                payload = decode_token(
                    self.config.secret, args["resumptionToken"], now.timestamp()
                )
            except BadToken as exc:
                return OaiError(OaiErrorCode.BAD_RESUMPTION_TOKEN, str(exc))
            if payload["v"] != verb.value:
                return OaiError(
                    OaiErrorCode.BAD_RESUMPTION_TOKEN, "token was issued for another verb"
                )
            view = self._resolve_view(payload["n"])
            if view is None:
                return OaiError(
                    OaiErrorCode.BAD_RESUMPTION_TOKEN,
                    "list snapshot expired; restart the harvest",
                )
            prefix = payload["p"]
            lo, hi = window_bounds(payload["f"], payload["u"])
            set_val = payload["s"]
            offset = int(payload["c"])
            from_val, until_val = payload["f"], payload["u"]
        else:
            prefix = args["metadataPrefix"]
            if prefix not in FORMATS:
                return OaiError(OaiErrorCode.CANNOT_DISSEMINATE_FORMAT, prefix)
            view = self._view_source()
            from_val, until_val = args.get("from"), args.get("until")
            lo, hi = window_bounds(from_val, until_val)
            set_val = args.get("set")
            offset = 0

        matches = [
            r
            for r in view.records
            if self._in_window(r, lo, hi)
            and self._in_set(r, set_val)
            and self._servable(r, prefix)
        ]
        if not matches:
            return OaiError(OaiErrorCode.NO_RECORDS_MATCH, "no records match the request")

        page = tuple(matches[offset : offset + self.config.page_size])
        token: TokenInfo | None = None
        next_offset = offset + self.config.page_size
        if next_offset < len(matches):
            self._pin_view(view)
            value = encode_token(
                self.config.secret,
                verb=verb.value,
                prefix=prefix,
                from_val=from_val,
                until_val=until_val,
                set_val=set_val,
                offset=next_offset,
                snapshot_version=view.version,
                expires_at=now.timestamp() + self.config.token_ttl_seconds,
            )
            token = TokenInfo(value=value, cursor=offset, complete_list_size=len(matches))
        elif offset > 0:
            token = TokenInfo(value="", cursor=offset, complete_list_size=len(matches))
        return ListPayload(verb=verb, prefix=prefix, items=page, token=token)

    def _get_record(self, args: dict[str, str]):
        prefix = args["metadataPrefix"]
        if prefix not in FORMATS:
            return OaiError(OaiErrorCode.CANNOT_DISSEMINATE_FORMAT, prefix)
        record = self._find(args["identifier"])
        if record is None:
            return OaiError(OaiErrorCode.ID_DOES_NOT_EXIST, args["identifier"])
        if not record.deleted and not self._servable(record, prefix):
            return OaiError(
                OaiErrorCode.CANNOT_DISSEMINATE_FORMAT,
                f"{args['identifier']} is not available as {prefix}",
            )
        return RecordPayload(record=record, prefix=prefix)

    # --- helpers ---------------------------------------------------------

    def _find(self, identifier: str) -> MetadataRecord | None:
        for record in self._view_source().records:
            if record.identifier == identifier:
                return record
        return None

    def _effective_sets(self, record: MetadataRecord) -> set[str]:
        out = {record.source_id, *record.sets}
        for tag, sources in self.config.collections.items():
            if record.source_id in sources:
                out.add(tag)
        return out

    @staticmethod
    def _in_window(record: MetadataRecord, lo: datetime | None, hi: datetime | None) -> bool:
        if lo is not None and record.datestamp < lo:
            return False
        if hi is not None and record.datestamp > hi:
            return False
        return True

    def _in_set(self, record: MetadataRecord, set_val: str | None) -> bool:
        return set_val is None or set_val in self._effective_sets(record)

    @staticmethod
    def _servable(record: MetadataRecord, prefix: str) -> bool:
        if record.deleted:
            return True  # header-only entries appear in every format's lists
        if prefix == "oai_dc":
            return True
        return NATIVE_PREFIX[record.schema] == prefix and bool(record.raw_document)

    def _pin_view(self, view: StoreView) -> None:
        self._pinned[view.version] = view
        self._pinned.move_to_end(view.version)
        while len(self._pinned) > self.PINNED_VIEWS:
            self._pinned.popitem(last=False)

    def _resolve_view(self, version: int) -> StoreView | None:
        view = self._pinned.get(version)
        if view is not None:
            return view
        current = self._view_source()
        if current.version == version:
            return current
        return None


# ---------------------------------------------------------------------------
# Serialization: the normative response layout. Stable element and attribute
# ordering makes serialization byte-identical for identical responses.
# ---------------------------------------------------------------------------


def _el(tag: str, text: str | None = None, **attrs: str) -> ET.Element:
    e = ET.Element(f"{{{OAI_NS}}}{tag}")
    for k, v in attrs.items():
        e.set(k, v)
    if text is not None:
        e.text = text
    return e


def _header_el(server: OaiServer, record: MetadataRecord) -> ET.Element:
    header = _el("header")
    if record.deleted:
        header.set("status", "deleted")
    header.append(_el("identifier", record.identifier))
    header.append(_el("datestamp", format_datestamp(record.datestamp)))
    for spec in sorted(server._effective_sets(record)):
        header.append(_el("setSpec", spec))
    return header


def _metadata_tree(record: MetadataRecord, prefix: str) -> ET.Element:
    if prefix == "oai_dc":
        return build_oai_dc(record)
    return ET.fromstring(record.raw_document)


def _record_el(server: OaiServer, record: MetadataRecord, prefix: str) -> ET.Element:
    rec = _el("record")
    rec.append(_header_el(server, record))
    if not record.deleted:
        meta = _el("metadata")
        meta.append(_metadata_tree(record, prefix))
        rec.append(meta)
    return rec


def _token_el(token: TokenInfo) -> ET.Element:
    el = _el(
        "resumptionToken",
        token.value or None,
        completeListSize=str(token.complete_list_size),
        cursor=str(token.cursor),
    )
    return el


def serialize_response(server: OaiServer, response: OaiResponse) -> bytes:
    root = _el("OAI-PMH")
    root.set(f"{{{XSI_NS}}}schemaLocation", f"{OAI_NS} {OAI_SCHEMA}")
    root.append(_el("responseDate", format_datestamp(response.response_date)))
    request_el = _el("request", response.base_url)
    for key, value in response.echo_args.items():
        request_el.set(key, value)
    root.append(request_el)

    for err in response.errors:
        root.append(_el("error", err.message, code=err.code.value))

    payload = response.payload
    if isinstance(payload, IdentifyPayload):
        container = _el("Identify")
        container.append(_el("repositoryName", payload.repository_name))
        container.append(_el("baseURL", payload.base_url))
        container.append(_el("protocolVersion", "2.0"))
        container.append(_el("adminEmail", payload.admin_email))
        container.append(_el("earliestDatestamp", format_datestamp(payload.earliest_datestamp)))
        container.append(_el("deletedRecord", "persistent"))
        container.append(_el("granularity", "YYYY-MM-DDThh:mm:ssZ"))
        root.append(container)
    elif isinstance(payload, FormatsPayload):
        container = _el("ListMetadataFormats")
        for fmt in payload.formats:
            fmt_el = _el("metadataFormat")
            fmt_el.append(_el("metadataPrefix", fmt.prefix))
            fmt_el.append(_el("schema", fmt.schema_url))
            fmt_el.append(_el("metadataNamespace", fmt.namespace_uri))
            container.append(fmt_el)
        root.append(container)
    elif isinstance(payload, SetsPayload):
        container = _el("ListSets")
        for spec in payload.sets:
            set_el = _el("set")
            set_el.append(_el("setSpec", spec))
            set_el.append(_el("setName", spec))
            container.append(set_el)
        root.append(container)
    elif isinstance(payload, ListPayload):
        container = _el(payload.verb.value)
        for record in payload.items:
            if payload.verb is Verb.LIST_RECORDS:
                container.append(_record_el(server, record, payload.prefix))
            else:
                container.append(_header_el(server, record))
        if payload.token is not None:
            container.append(_token_el(payload.token))
        root.append(container)
    elif isinstance(payload, RecordPayload):
        container = _el("GetRecord")
        container.append(_record_el(server, payload.record, payload.prefix))
        root.append(container)

    return ET.tostring(root, encoding="UTF-8", xml_declaration=True)
