"""Search query language: AST types and the recursive-descent parser.

Grammar (whitespace separates tokens; keywords are uppercase)::

    query    := or_expr
    or_expr  := and_expr ("OR" and_expr)*
    and_expr := unary (["AND"] unary)*        # plain adjacency is conjunction
    unary    := "NOT" unary | primary
    primary  := "(" query ")" | [field ":"] (word | quoted phrase)

Precedence NOT > AND > OR. Field names are case-insensitive and must name an
indexed field; a bare term searches the combined ``all`` field. Words and
quoted phrases run through the analyzer, so a word that analyzes to several
tokens (``co2-flux``) becomes a phrase. Negation is only legal inside a
conjunction that has at least one positive operand; queries that could only
be answered by enumerating non-matches are rejected as pure-negative.

Errors carry 0-based character positions where one can be attributed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from enum import Enum

from .analyze import tokenize
from .match import SpatialRelation
from ..model import GeoBoundingBox


class IndexedField(Enum):
    ALL = "all"
    TITLE = "title"
    ABSTRACT = "abstract"
    KEYWORDS = "keywords"
    AUTHOR = "author"
    SOURCE = "source"
    SCHEMA = "schema"

    @classmethod
    def from_name(cls, name: str) -> "IndexedField":
        try:
            return cls(name.lower())
        except ValueError:
            raise UnknownField(name) from None


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownField(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown field {name!r}")
        self.field_name = name


class PureNegativeQuery(ValueError):
    def __init__(self) -> None:
        super().__init__("negation must be paired with at least one positive term")


@dataclass(frozen=True)
class Term:
    field: IndexedField
    token: str


@dataclass(frozen=True)
class Phrase:
    field: IndexedField
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class MatchAll:
    pass


Node = object


@dataclass(frozen=True)
class Query:
    """Parsed expression plus the sidecar spatial/temporal filters."""

    ast: Node
    spatial: tuple[GeoBoundingBox, SpatialRelation] | None = None
    temporal: tuple[date | None, date | None] | None = None


# --- lexer -----------------------------------------------------------------

_LPAREN = "("
_RPAREN = ")"
_COLON = ":"


@dataclass(frozen=True)
class _Tok:
    kind: str  # "(" | ")" | ":" | "word" | "quoted" | "eof"
    text: str
    pos: int


def _lex(q: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, n = 0, len(q)
    while i < n:
        c = q[i]
        if c.isspace():
            i += 1
            continue
        if c in (_LPAREN, _RPAREN, _COLON):
            toks.append(_Tok(c, c, i))
            i += 1
            continue
        if c == '"':
            j = q.find('"', i + 1)
            if j < 0:
                raise QuerySyntaxError("unterminated quote", i)
            toks.append(_Tok("quoted", q[i + 1 : j], i))
            i = j + 1
            continue
        j = i
        while j < n and not q[j].isspace() and q[j] not in '():"':
            j += 1
        toks.append(_Tok("word", q[i:j], i))
        i = j
    toks.append(_Tok("eof", "", n))
    return toks


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, q: str):
        self.toks = _lex(q)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def parse(self) -> Node:
        if self.cur.kind == "eof":
            raise QuerySyntaxError("empty query", 0)
        node = self.or_expr()
        if self.cur.kind != "eof":
            raise QuerySyntaxError(f"unexpected {self.cur.text!r}", self.cur.pos)
        return node

    def or_expr(self) -> Node:
        children = [self.and_expr()]
        while self.cur.kind == "word" and self.cur.text == "OR":
            self.advance()
            children.append(self.and_expr())
        if len(children) == 1:
            return children[0]
        return Or(tuple(children))

    def and_expr(self) -> Node:
        children = [self.unary()]
        while True:
            tok = self.cur
            if tok.kind == "word" and tok.text == "AND":
                self.advance()
                children.append(self.unary())
                continue
            if tok.kind in ("word", "quoted", "(") and not (
                tok.kind == "word" and tok.text == "OR"
            ):
                children.append(self.unary())
                continue
            break
        if len(children) == 1:
            return children[0]
        return And(tuple(children))

    def unary(self) -> Node:
        tok = self.cur
        if tok.kind == "word" and tok.text == "NOT":
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Node:
        tok = self.cur
        if tok.kind == "(":
            self.advance()
            node = self.or_expr()
            if self.cur.kind != ")":
                raise QuerySyntaxError("expected ')'", self.cur.pos)
            self.advance()
            return node
        if tok.kind == "word" and self.toks[self.i + 1].kind == ":":
            fld = IndexedField.from_name(tok.text)
            self.advance()
            self.advance()
            val = self.cur
            if val.kind not in ("word", "quoted"):
                raise QuerySyntaxError(f"expected term after '{tok.text}:'", val.pos)
            self.advance()
            return _leaf(fld, val)
        if tok.kind in ("word", "quoted"):
            if tok.kind == "word" and tok.text in ("OR", "AND", "NOT"):
                raise QuerySyntaxError(f"unexpected {tok.text}", tok.pos)
            self.advance()
            return _leaf(IndexedField.ALL, tok)
        raise QuerySyntaxError(f"unexpected {tok.text or 'end of query'!r}", tok.pos)


def _leaf(fld: IndexedField, tok: _Tok) -> Node:
    tokens = tokenize(tok.text)
    if not tokens:
        raise QuerySyntaxError("term has no searchable characters", tok.pos)
    if len(tokens) == 1:
        return Term(fld, tokens[0])
    return Phrase(fld, tuple(tokens))


def _check_negation(node: Node, parent_is_and: bool = False) -> None:
    if isinstance(node, Not):
        if not parent_is_and:
            raise PureNegativeQuery()
        _check_negation(node.child, parent_is_and=False)
    elif isinstance(node, And):
        if not any(not isinstance(c, Not) for c in node.children):
            raise PureNegativeQuery()
        for c in node.children:
            _check_negation(c, parent_is_and=True)
    elif isinstance(node, Or):
        for c in node.children:
            _check_negation(c, parent_is_and=False)


def parse_query(q: str) -> Query:
    """Parse a query string into a :class:`Query` with no sidecar filters.

    Raises QuerySyntaxError, UnknownField or PureNegativeQuery.
    """
    ast = _Parser(q).parse()
    _check_negation(ast)
    return Query(ast=ast)


def positive_leaves(node: Node) -> list[Node]:
    """Term/Phrase/MatchAll leaves not under a Not, in AST order."""
    out: list[Node] = []

    def walk(n: Node) -> None:
        if isinstance(n, (Term, Phrase, MatchAll)):
            out.append(n)
        elif isinstance(n, (And, Or)):
            for c in n.children:
                walk(c)
        # Not subtrees filter only; they never contribute score

    walk(node)
    return out
