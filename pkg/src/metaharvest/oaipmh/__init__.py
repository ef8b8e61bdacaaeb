from .client import (
    HarvestedItem,
    MalformedResponse,
    OaiClient,
    OaiProtocolError,
    RecordHeader,
    TransportError,
)
from .protocol import OaiError, OaiErrorCode, OaiRequest, Verb, validate_request
from .server import (
    FORMATS,
    NATIVE_PREFIX,
    OaiResponse,
    OaiServer,
    OaiServerConfig,
    serialize_response,
)

__all__ = [
    "OaiClient",
    "OaiProtocolError",
    "TransportError",
    "MalformedResponse",
    "HarvestedItem",
    "RecordHeader",
    "OaiError",
    "OaiErrorCode",
    "OaiRequest",
    "Verb",
    "validate_request",
    "OaiServer",
    "OaiServerConfig",
    "OaiResponse",
    "serialize_response",
    "FORMATS",
    "NATIVE_PREFIX",
]
