"""Datalog surface syntax: AST, lexer, parser, canonical printer.

The grammar covers exactly what the engine needs: conjunctive queries
(`?(H1,H2):- atom, atom.`), mapping rules (`head(args):- src.rel(args).`)
and source-level statements.  Identifiers are `[A-Za-z_][A-Za-z0-9_]*`;
variables begin with an uppercase letter; constants are written `<...>`
and carried as opaque strings; atom namespaces are `class:`,
`relationship:` and `attribute:`; source atoms are `[:]schema.relation(args)`
where the optional leading `:` is accepted and normalized away.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


class DatalogError(Exception):
    """Base for all errors raised by this module."""


class ParseError(DatalogError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SafetyError(DatalogError):
    """A head variable does not occur in the body."""

    def __init__(self, variable: str):
        super().__init__(f"head variable {variable} does not occur in the body")
        self.variable = variable


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    value: str


@dataclass(frozen=True)
class FreshVar:
    """Placeholder variable introduced by rewriting, printed ``VAR_<index>``.

    ``scope`` keeps fresh variables from distinct rewritten atoms apart even
    when their display indices coincide (each rewritten atom prints as its
    own statement, so indices restart per atom).
    """

    index: int
    scope: int = 0


Term = Union[Variable, Constant, FreshVar]

_FRESH_RE = re.compile(r"^VAR_(\d+)$")


def term_text(term: Term) -> str:
    if isinstance(term, Variable):
        return term.name
    if isinstance(term, Constant):
        return f"<{term.value}>"
    return f"VAR_{term.index}"


# ---------------------------------------------------------------------------
# Atoms


@dataclass(frozen=True)
class ClassAtom:
    class_name: str
    term: Term

    @property
    def terms(self) -> tuple[Term, ...]:
        return (self.term,)


@dataclass(frozen=True)
class RelAtom:
    prop_name: str
    terms: tuple[Term, ...]

    def __post_init__(self):
        if len(self.terms) < 2:
            raise DatalogError(
                f"relationship atom {self.prop_name} needs at least 2 terms"
            )


@dataclass(frozen=True)
class AttrAtom:
    prop_name: str
    subject: Term
    value: Term

    @property
    def terms(self) -> tuple[Term, ...]:
        return (self.subject, self.value)


@dataclass(frozen=True)
class SourceAtom:
    schema: str
    relation: str
    terms: tuple[Term, ...]

    @property
    def qualified_name(self) -> str:
        return f"{self.schema}.{self.relation}"


Atom = Union[ClassAtom, RelAtom, AttrAtom, SourceAtom]


def atom_terms(atom: Atom) -> tuple[Term, ...]:
    return atom.terms


def atom_variables(atom: Atom) -> list[Variable]:
    return [t for t in atom.terms if isinstance(t, Variable)]


# ---------------------------------------------------------------------------
# Statements


@dataclass(frozen=True)
class DatalogQuery:
    head_vars: tuple[Variable, ...]
    body: tuple[Atom, ...]

    def body_variables(self) -> list[Variable]:
        seen: list[Variable] = []
        for atom in self.body:
            for v in atom_variables(atom):
                if v not in seen:
                    seen.append(v)
        return seen

    def is_safe(self) -> bool:
        body_vars = set(self.body_variables())
        return all(v in body_vars for v in self.head_vars)


@dataclass(frozen=True)
class MappingRule:
    """``head(args) :- schema.relation(args).`` with a single body atom."""

    head: Atom
    body: SourceAtom


@dataclass(frozen=True)
class QueryUnion:
    branches: tuple[DatalogQuery, ...]


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<IMPLIES>:-)
  | (?P<CONST><[^>]*>)
  | (?P<NAME>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<QMARK>\?)
  | (?P<LPAREN>\()
  | (?P<RPAREN>\))
  | (?P<COMMA>,)
  | (?P<DOT>\.)
  | (?P<COLON>:)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok_text = m.group(0)
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, tok_text, line, col))
        newlines = tok_text.count("\n")
        if newlines:
            line += newlines
            col = len(tok_text) - tok_text.rfind("\n")
        else:
            col += len(tok_text)
        pos = m.end()
    tokens.append(_Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"expected {kind}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.column,
            )
        return self.next()

    def at_end(self) -> bool:
        return self.peek().kind == "EOF"

    # -- grammar ------------------------------------------------------

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "CONST":
            self.next()
            return Constant(tok.text[1:-1])
        if tok.kind == "NAME":
            self.next()
            m = _FRESH_RE.match(tok.text)
            if m:
                return FreshVar(int(m.group(1)))
            if not tok.text[0].isupper():
                raise ParseError(
                    f"term {tok.text!r} must be a variable (uppercase) or <constant>",
                    tok.line,
                    tok.column,
                )
            return Variable(tok.text)
        raise ParseError(
            f"expected a term, found {tok.text or 'end of input'!r}",
            tok.line,
            tok.column,
        )

    def parse_term_list(self) -> tuple[Term, ...]:
        self.expect("LPAREN")
        terms = [self.parse_term()]
        while self.peek().kind == "COMMA":
            self.next()
            terms.append(self.parse_term())
        self.expect("RPAREN")
        return tuple(terms)

    def parse_atom(self, default_kind: Optional[str] = None) -> Atom:
        tok = self.peek()
        if tok.kind == "COLON":  # Table-5 style leading colon on source atoms
            self.next()
            tok = self.peek()
        name = self.expect("NAME")
        nxt = self.peek()
        if nxt.kind == "COLON":
            self.next()
            pred = self.expect("NAME")
            terms = self.parse_term_list()
            return self._namespaced_atom(name, pred.text, terms)
        if nxt.kind == "DOT" and self.peek(1).kind == "NAME":
            self.next()
            rel = self.expect("NAME")
            terms = self.parse_term_list()
            return SourceAtom(name.text, rel.text, terms)
        if nxt.kind == "LPAREN":
            terms = self.parse_term_list()
            if default_kind is None:
                raise ParseError(
                    f"atom {name.text!r} needs a namespace "
                    "(class:/relationship:/attribute:)",
                    name.line,
                    name.column,
                )
            return self._namespaced_atom(name, default_kind, terms, bare=True)
        raise ParseError(
            f"malformed atom starting at {name.text!r}", name.line, name.column
        )

    def _namespaced_atom(self, ns_tok, pred_or_kind, terms, bare=False) -> Atom:
        if bare:
            kind, pred = pred_or_kind, ns_tok.text
        else:
            kind, pred = ns_tok.text, pred_or_kind
        if kind == "class":
            if len(terms) != 1:
                raise ParseError(
                    f"class atom {pred} takes exactly one term",
                    ns_tok.line,
                    ns_tok.column,
                )
            return ClassAtom(pred, terms[0])
        if kind == "relationship":
            if len(terms) < 2:
                raise ParseError(
                    f"relationship atom {pred} needs at least 2 terms",
                    ns_tok.line,
                    ns_tok.column,
                )
            return RelAtom(pred, terms)
        if kind == "attribute":
            if len(terms) != 2:
                raise ParseError(
                    f"attribute atom {pred} takes exactly 2 terms",
                    ns_tok.line,
                    ns_tok.column,
                )
            return AttrAtom(pred, terms[0], terms[1])
        raise ParseError(
            f"unknown atom namespace {kind!r}", ns_tok.line, ns_tok.column
        )

    def parse_query(self) -> DatalogQuery:
        self.expect("QMARK")
        self.expect("LPAREN")
        head = [self._head_var()]
        while self.peek().kind == "COMMA":
            self.next()
            head.append(self._head_var())
        self.expect("RPAREN")
        self.expect("IMPLIES")
        body = [self.parse_atom()]
        while self.peek().kind == "COMMA":
            self.next()
            body.append(self.parse_atom())
        self.expect("DOT")
        return DatalogQuery(tuple(head), tuple(body))

    def _head_var(self) -> Variable:
        tok = self.expect("NAME")
        if not tok.text[0].isupper():
            raise ParseError(
                f"head variable {tok.text!r} must start uppercase",
                tok.line,
                tok.column,
            )
        return Variable(tok.text)

    def parse_rule(self, default_kind: Optional[str]) -> MappingRule:
        head = self.parse_atom(default_kind=default_kind)
        self.expect("IMPLIES")
        body = self.parse_atom()
        self.expect("DOT")
        if not isinstance(body, SourceAtom):
            raise ParseError(
                "mapping rule body must be a single source atom",
                self.peek().line,
                self.peek().column,
            )
        head_vars = set(atom_variables(head))
        body_vars = set(atom_variables(body))
        missing = [v.name for v in head.terms
                   if isinstance(v, Variable) and v not in body_vars]
        if missing:
            raise SafetyError(missing[0])
        del head_vars
        return MappingRule(head, body)


# ---------------------------------------------------------------------------
# Public parse API


def parse_query(text: str, *, require_safety: bool = True) -> DatalogQuery:
    """Parse a query statement.

    ``require_safety=False`` admits sub-query fragments whose head mentions
    variables bound only by later (omitted) atoms.
    """
    p = _Parser(text)
    query = p.parse_query()
    if not p.at_end():
        tok = p.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.column)
    if require_safety and not query.is_safe():
        body_vars = set(query.body_variables())
        for v in query.head_vars:
            if v not in body_vars:
                raise SafetyError(v.name)
    return query


_SECTION_RE = re.compile(r"^\s*#\s*(relationship|attribute|class)\s*$")


def parse_mapping_rules(text: str) -> list[MappingRule]:
    """Parse a mapping-rule file.

    Optional ``# relationship`` / ``# attribute`` section headers set the
    head kind for bare (un-namespaced) heads; namespaced heads work anywhere.
    """
    rules: list[MappingRule] = []
    section: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(raw)
        if m:
            section = m.group(1)
            continue
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        p = _Parser(stripped)
        try:
            rule = p.parse_rule(default_kind=section)
        except ParseError as exc:
            raise ParseError(str(exc).rsplit(" (line", 1)[0], lineno, exc.column) \
                from None
        if not p.at_end():
            tok = p.peek()
            raise ParseError(f"trailing input {tok.text!r}", lineno, tok.column)
        rules.append(rule)
    return rules


# ---------------------------------------------------------------------------
# Canonical printing


def _atom_text(atom: Atom, fresh_name) -> str:
    def t(term: Term) -> str:
        if isinstance(term, FreshVar):
            return fresh_name(term)
        return term_text(term)

    if isinstance(atom, ClassAtom):
        return f"class:{atom.class_name}({t(atom.term)})"
    if isinstance(atom, RelAtom):
        return f"relationship:{atom.prop_name}({','.join(t(x) for x in atom.terms)})"
    if isinstance(atom, AttrAtom):
        return f"attribute:{atom.prop_name}({t(atom.subject)},{t(atom.value)})"
    return f"{atom.qualified_name}({','.join(t(x) for x in atom.terms)})"


def print_canonical(stmt: Union[DatalogQuery, MappingRule, QueryUnion]) -> str:
    """Deterministic text form.

    Fresh variables are renumbered ``VAR_1..VAR_n`` in first-occurrence
    order across the whole statement, so structurally equal statements
    (up to fresh-variable naming) print identically.
    """
    if isinstance(stmt, QueryUnion):
        return "\n".join(print_canonical(b) for b in stmt.branches)

    numbering: dict[FreshVar, int] = {}

    def fresh_name(fv: FreshVar) -> str:
        if fv not in numbering:
            numbering[fv] = len(numbering) + 1
        return f"VAR_{numbering[fv]}"

    if isinstance(stmt, DatalogQuery):
        head = ",".join(v.name for v in stmt.head_vars)
        body = ", ".join(_atom_text(a, fresh_name) for a in stmt.body)
        return f"?({head}):- {body}."
    head = _atom_text(stmt.head, fresh_name)
    body = _atom_text(stmt.body, fresh_name)
    return f"{head}:- {body}."


def print_source_statements(query: DatalogQuery) -> str:
    """Render a rewritten query's body one statement per line.

    Fresh variables keep their per-atom positional indices, matching the
    convention of printing each rewritten atom as a standalone statement.
    """
    lines = []
    for atom in query.body:
        lines.append(_atom_text(atom, lambda fv: f"VAR_{fv.index}") + ".")
    return "\n".join(lines)


def canonical_eq(a, b) -> bool:
    """Structural equality up to fresh-variable renumbering."""
    return print_canonical(a) == print_canonical(b)
