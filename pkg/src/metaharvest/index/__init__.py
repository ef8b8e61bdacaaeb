from .analyze import tokenize
from .engine import FacetCount, SearchHit, SearchIndex, SearchResult, PageOutOfRange
from .match import SpatialRelation, spatial_match, temporal_match
from .query import (
    And,
    IndexedField,
    MatchAll,
    Not,
    Or,
    Phrase,
    PureNegativeQuery,
    Query,
    QuerySyntaxError,
    Term,
    UnknownField,
    parse_query,
)

__all__ = [
    "tokenize",
    "SearchIndex",
    "SearchResult",
    "SearchHit",
    "FacetCount",
    "PageOutOfRange",
    "SpatialRelation",
    "spatial_match",
    "temporal_match",
    "IndexedField",
    "Query",
    "Term",
    "Phrase",
    "And",
    "Or",
    "Not",
    "MatchAll",
    "parse_query",
    "QuerySyntaxError",
    "UnknownField",
    "PureNegativeQuery",
]
