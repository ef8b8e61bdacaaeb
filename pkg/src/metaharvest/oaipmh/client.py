"""OAI-PMH harvesting client.

Streams ListRecords/ListIdentifiers results, following resumption tokens to
exhaustion. In-band protocol errors other than noRecordsMatch raise
:class:`OaiProtocolError`; noRecordsMatch is an empty harvest, not a fault.
Transport failures retry with bounded exponential backoff (1s, 2s, 4s) and a
Retry-After header, when a provider sends one, is honored up to 60 seconds.
"""

from __future__ import annotations

import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Iterator

import httpx

from ..model import parse_datestamp
from .server import OAI_NS

MAX_ATTEMPTS = 3
BACKOFF_SECONDS = (1.0, 2.0, 4.0)
RETRY_AFTER_CAP = 60.0


class OaiProtocolError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.oai_message = message


class TransportError(Exception):
    pass


class MalformedResponse(Exception):
    pass


@dataclass(frozen=True)
class RecordHeader:
    identifier: str
    datestamp: datetime
    deleted: bool
    sets: tuple[str, ...]


@dataclass(frozen=True)
class HarvestedItem:
    header: RecordHeader
    document: bytes | None  # None for deleted records


def _q(tag: str) -> str:
    return f"{{{OAI_NS}}}{tag}"


class OaiClient:
    """Client for one repository base URL.

    ``http`` may be any httpx.Client, which is how tests route requests to an
    in-process ASGI app; every HTTP request's parameters are appended to
    ``request_log`` for wire-level assertions and audits.
    """

    def __init__(
        self,
        base_url: str,
        http: httpx.Client | None = None,
        sleep: Callable[[float], None] = time.sleep,
        timeout: float = 30.0,
    ):
        self.base_url = base_url
        self._own_http = http is None
        self._http = http or httpx.Client(timeout=timeout)
        self._sleep = sleep
        self.request_log: list[dict[str, str]] = []

    def close(self) -> None:
        if self._own_http:
            self._http.close()

    def __enter__(self) -> "OaiClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # --- request plumbing ------------------------------------------------

    def _fetch(self, params: dict[str, str]) -> ET.Element:
        self.request_log.append(dict(params))
        last_error: Exception | None = None
        for attempt in range(MAX_ATTEMPTS):
            try:
                resp = self._http.get(self.base_url, params=params)
            except httpx.HTTPError as exc:
                last_error = exc
                if attempt + 1 < MAX_ATTEMPTS:
                    self._sleep(BACKOFF_SECONDS[attempt])
                continue
            if resp.status_code >= 500:
                last_error = TransportError(f"HTTP {resp.status_code}")
                if attempt + 1 < MAX_ATTEMPTS:
                    self._sleep(self._retry_delay(resp, attempt))
                continue
            if resp.status_code != 200:
                raise TransportError(f"HTTP {resp.status_code} from {self.base_url}")
            try:
                return ET.fromstring(resp.content)
            except ET.ParseError as exc:
                raise MalformedResponse(f"unparseable OAI response: {exc}") from exc
        raise TransportError(
            f"{self.base_url} unreachable after {MAX_ATTEMPTS} attempts: {last_error}"
        )

    @staticmethod
    def _retry_delay(resp: httpx.Response, attempt: int) -> float:
        retry_after = resp.headers.get("Retry-After")
        if retry_after is not None:
            try:
                return min(float(retry_after), RETRY_AFTER_CAP)
            except ValueError:
                pass
        return BACKOFF_SECONDS[attempt]

    @staticmethod
    def _protocol_error(root: ET.Element) -> OaiProtocolError | None:
        err = root.find(_q("error"))
        if err is None:
            return None
        return OaiProtocolError(err.get("code", "unknown"), (err.text or "").strip())

    # --- verbs -----------------------------------------------------------

    def identify(self) -> dict[str, str]:
        root = self._fetch({"verb": "Identify"})
        error = self._protocol_error(root)
        if error is not None:
            raise error
        container = root.find(_q("Identify"))
        if container is None:
            raise MalformedResponse("Identify response lacks Identify element")
        return {child.tag.split("}", 1)[-1]: (child.text or "") for child in container}

    def list_records(
        self,
        metadata_prefix: str = "oai_dc",
        from_: str | None = None,
        until: str | None = None,
        set_spec: str | None = None,
    ) -> Iterator[HarvestedItem]:
        """Yield every record of a ListRecords chain.

        noRecordsMatch yields nothing; other protocol errors raise.
        """
        params: dict[str, str] = {"verb": "ListRecords", "metadataPrefix": metadata_prefix}
        if from_ is not None:
            params["from"] = from_
        if until is not None:
            params["until"] = until
        if set_spec is not None:
            params["set"] = set_spec

        while True:
            root = self._fetch(params)
            error = self._protocol_error(root)
            if error is not None:
                if error.code == "noRecordsMatch":
                    return
                raise error
            container = root.find(_q("ListRecords"))
            if container is None:
                raise MalformedResponse("ListRecords response lacks ListRecords element")
            for record_el in container.findall(_q("record")):
                yield self._item_from(record_el)
            token_el = container.find(_q("resumptionToken"))
            token = (token_el.text or "").strip() if token_el is not None else ""
            if not token:
                return
            params = {"verb": "ListRecords", "resumptionToken": token}

    def _item_from(self, record_el: ET.Element) -> HarvestedItem:
        header_el = record_el.find(_q("header"))
        if header_el is None:
            raise MalformedResponse("record without header")
        identifier = (header_el.findtext(_q("identifier")) or "").strip()
        datestamp_text = (header_el.findtext(_q("datestamp")) or "").strip()
        if not identifier or not datestamp_text:
            raise MalformedResponse("header missing identifier or datestamp")
        try:
            datestamp = parse_datestamp(datestamp_text)
        except ValueError:
            try:  # some providers stamp at day granularity
                datestamp = datetime.strptime(datestamp_text, "%Y-%m-%d").replace(
                    tzinfo=timezone.utc
                )
            except ValueError as exc:
                raise MalformedResponse(f"bad datestamp {datestamp_text!r}") from exc
        deleted = header_el.get("status") == "deleted"
        sets = tuple(
            (el.text or "").strip() for el in header_el.findall(_q("setSpec")) if el.text
        )
        document: bytes | None = None
        if not deleted:
            metadata_el = record_el.find(_q("metadata"))
            if metadata_el is None or len(metadata_el) == 0:
                raise MalformedResponse(f"record {identifier} has no metadata payload")
            document = ET.tostring(metadata_el[0], encoding="UTF-8", xml_declaration=True)
        header = RecordHeader(
            identifier=identifier, datestamp=datestamp, deleted=deleted, sets=sets
        )
        return HarvestedItem(header=header, document=document)
