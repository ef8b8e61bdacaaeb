"""Stateless resumption tokens.

A token is ``base64url(json payload) . hmac16`` — self-contained, so flow
control survives server restarts with no session table. The payload carries
the original query (verb, prefix, window, set), the next cursor offset, the
store snapshot version it was issued against, an expiry instant, and a hash
of the query fields; the HMAC rejects tampering.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import time


class BadToken(Exception):
    pass


def _mac(secret: bytes, payload: bytes) -> str:
    return hmac.new(secret, payload, hashlib.sha256).hexdigest()[:16]


def query_hash(verb: str, prefix: str, from_val, until_val, set_val) -> str:
    key = "\x1f".join(
        [verb, prefix or "", from_val or "", until_val or "", set_val or ""]
    )
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:12]


def encode_token(
    secret: bytes,
    *,
    verb: str,
    prefix: str,
    from_val: str | None,
    until_val: str | None,
    set_val: str | None,
    offset: int,
    snapshot_version: int,
    expires_at: float,
) -> str:
    payload = {
        "v": verb,
        "p": prefix,
        "f": from_val,
        "u": until_val,
        "s": set_val,
        "c": offset,
        "n": snapshot_version,
        "e": int(expires_at),
        "q": query_hash(verb, prefix, from_val, until_val, set_val),
    }
    blob = json.dumps(payload, separators=(",", ":"), sort_keys=True).encode("utf-8")
    b64 = base64.urlsafe_b64encode(blob).decode("ascii").rstrip("=")
    return f"{b64}.{_mac(secret, blob)}"


def decode_token(secret: bytes, token: str, now: float | None = None) -> dict:
    """Verify and unpack a token; raises BadToken on any defect."""
    now = time.time() if now is None else now
    try:
        b64, mac = token.rsplit(".", 1)
        blob = base64.urlsafe_b64decode(b64 + "=" * (-len(b64) % 4))
    except Exception as exc:
        raise BadToken(f"undecodable token: {exc}") from exc
    if not hmac.compare_digest(_mac(secret, blob), mac):
        raise BadToken("token signature mismatch")
    try:
        payload = json.loads(blob)
    except json.JSONDecodeError as exc:
        raise BadToken("token payload is not JSON") from exc
    expected = {"v", "p", "f", "u", "s", "c", "n", "e", "q"}
    if not expected.issubset(payload):
        raise BadToken("token payload incomplete")
    if payload["e"] < now:
        raise BadToken("token expired")
    if payload["q"] != query_hash(
        payload["v"], payload["p"], payload["f"], payload["u"], payload["s"]
    ):
        raise BadToken("token query hash mismatch")
    return payload
