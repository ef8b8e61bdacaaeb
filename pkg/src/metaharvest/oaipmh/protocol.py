"""OAI-PMH 2.0 protocol surface: verbs, argument legality, error codes,
datestamp handling.

Argument validation happens before dispatch. Each verb admits an exact set
of arguments; ``resumptionToken`` is exclusive where allowed; duplicate or
unknown arguments are rejected. ``from``/``until`` accept the two protocol
granularities (``YYYY-MM-DD`` and ``YYYY-MM-DDThh:mm:ssZ``) and must agree
with each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, time, timezone
from enum import Enum


class Verb(Enum):
    IDENTIFY = "Identify"
    LIST_METADATA_FORMATS = "ListMetadataFormats"
    LIST_SETS = "ListSets"
    LIST_IDENTIFIERS = "ListIdentifiers"
    LIST_RECORDS = "ListRecords"
    GET_RECORD = "GetRecord"


class OaiErrorCode(Enum):
    BAD_VERB = "badVerb"
    BAD_ARGUMENT = "badArgument"
    BAD_RESUMPTION_TOKEN = "badResumptionToken"
    CANNOT_DISSEMINATE_FORMAT = "cannotDisseminateFormat"
    ID_DOES_NOT_EXIST = "idDoesNotExist"
    NO_RECORDS_MATCH = "noRecordsMatch"
    NO_METADATA_FORMATS = "noMetadataFormats"
    NO_SET_HIERARCHY = "noSetHierarchy"


@dataclass(frozen=True)
class OaiError:
    code: OaiErrorCode
    message: str


@dataclass(frozen=True)
class OaiRequest:
    verb: Verb
    arguments: dict[str, str]


# verb -> (required argument names, optional argument names, token allowed)
_ARG_RULES: dict[Verb, tuple[frozenset, frozenset, bool]] = {
    Verb.IDENTIFY: (frozenset(), frozenset(), False),
    Verb.LIST_METADATA_FORMATS: (frozenset(), frozenset({"identifier"}), False),
    Verb.LIST_SETS: (frozenset(), frozenset(), True),
    Verb.LIST_IDENTIFIERS: (
        frozenset({"metadataPrefix"}),
        frozenset({"from", "until", "set"}),
        True,
    ),
    Verb.LIST_RECORDS: (
        frozenset({"metadataPrefix"}),
        frozenset({"from", "until", "set"}),
        True,
    ),
    Verb.GET_RECORD: (frozenset({"identifier", "metadataPrefix"}), frozenset(), False),
}


def validate_request(args: list[tuple[str, str]]) -> OaiRequest | OaiError:
    """Check verb and argument legality on raw key/value pairs.

    Raw pairs (not a dict) so that duplicated arguments are caught.
    """
    seen: dict[str, str] = {}
    for key, value in args:
        if key in seen:
            return OaiError(OaiErrorCode.BAD_ARGUMENT, f"argument {key!r} repeated")
        seen[key] = value

    verb_name = seen.pop("verb", None)
    if verb_name is None:
        return OaiError(OaiErrorCode.BAD_VERB, "missing verb argument")
    try:
        verb = Verb(verb_name)
    except ValueError:
        return OaiError(OaiErrorCode.BAD_VERB, f"illegal verb {verb_name!r}")

    required, optional, token_ok = _ARG_RULES[verb]
    if "resumptionToken" in seen:
        if not token_ok:
            return OaiError(
                OaiErrorCode.BAD_ARGUMENT, f"{verb.value} does not accept resumptionToken"
            )
        if len(seen) > 1:
            return OaiError(
                OaiErrorCode.BAD_ARGUMENT, "resumptionToken is an exclusive argument"
            )
        return OaiRequest(verb=verb, arguments=dict(seen))

    unknown = set(seen) - required - optional
    if unknown:
        return OaiError(
            OaiErrorCode.BAD_ARGUMENT,
            f"illegal argument(s) for {verb.value}: {', '.join(sorted(unknown))}",
        )
    missing = required - set(seen)
    if missing:
        return OaiError(
            OaiErrorCode.BAD_ARGUMENT,
            f"missing required argument(s): {', '.join(sorted(missing))}",
        )

    if verb in (Verb.LIST_IDENTIFIERS, Verb.LIST_RECORDS):
        err = _check_datestamps(seen.get("from"), seen.get("until"))
        if err is not None:
            return err
    return OaiRequest(verb=verb, arguments=dict(seen))


DAY_FORM = "%Y-%m-%d"
SECOND_FORM = "%Y-%m-%dT%H:%M:%SZ"


def parse_utc_arg(value: str) -> tuple[datetime, str]:
    """Parse a from/until value; returns (instant, granularity form used)."""
    for fmt in (SECOND_FORM, DAY_FORM):
        try:
            parsed = datetime.strptime(value, fmt).replace(tzinfo=timezone.utc)
            return parsed, fmt
        except ValueError:
            continue
    raise ValueError(f"invalid datestamp {value!r}")


def _check_datestamps(from_val: str | None, until_val: str | None) -> OaiError | None:
    forms = []
    for value in (from_val, until_val):
        if value is None:
            continue
        try:
            _, fmt = parse_utc_arg(value)
        except ValueError as exc:
            return OaiError(OaiErrorCode.BAD_ARGUMENT, str(exc))
        forms.append(fmt)
    if len(forms) == 2 and forms[0] != forms[1]:
        return OaiError(
            OaiErrorCode.BAD_ARGUMENT, "from and until must share one granularity"
        )
    return None


def window_bounds(
    from_val: str | None, until_val: str | None
) -> tuple[datetime | None, datetime | None]:
    """Inclusive instant window from validated from/until arguments.

    A day-granularity ``until`` covers its whole day.
    """
    lo = hi = None
    if from_val is not None:
        lo, _ = parse_utc_arg(from_val)
    if until_val is not None:
        hi, fmt = parse_utc_arg(until_val)
        if fmt == DAY_FORM:
            hi = datetime.combine(hi.date(), time(23, 59, 59), tzinfo=timezone.utc)
    return lo, hi
