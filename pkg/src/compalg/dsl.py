"""A small declaration language for grounds, measurements, sequences,
paths, and assignments, with source-located diagnostics.

Grammar::

    doc         := stmt*
    stmt        := elements | measurement | sequence | path | assignment
    elements    := "elements" NAME "=" "{" id ("," id)* "}"
    measurement := "measurement" NAME "over" NAME "=" "{" block ("," block)* "}"
    block       := "{" id ("," id)* "}"
    sequence    := "sequence" NAME "=" "[" NAME ("," NAME)* "]"
    path        := "path" NAME "over" NAME "=" "[" block ("," block)* "]"
    assignment  := "assignment" NAME "over" NAME "algebra" ALG "from" STRING

ALG is one of R, C, C', H, H', O, O' (ASCII apostrophe marks the split
form).  Comments run from "#" to end of line.  The STRING names a JSON
file with the step matrices, resolved relative to the document.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algebra import AlgebraKind, make_algebra
from .engine import Assignment
from .errors import CompalgError
from .model import (
    GroundSet,
    Measurement,
    MeasurementSequence,
    Path,
    measurement,
    sequence,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    col_start: int
    col_end: int

    def __str__(self):
        return f"{self.line}:{self.col_start}-{self.col_end}"


class ParseError(CompalgError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span


class SemanticError(CompalgError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span


_PUNCT = {"{", "}", "[", "]", ",", "="}
_KEYWORDS = {"elements", "measurement", "sequence", "path", "assignment",
             "over", "algebra", "from"}


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "string", or the punctuation itself
    text: str
    span: SourceSpan


def _tokenize(text: str) -> List[Token]:
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        i = 0
        while i < len(line):
            ch = line[i]
            if ch == "#":
                break
            if ch.isspace():
                i += 1
                continue
            if ch in _PUNCT:
                tokens.append(Token(ch, ch, SourceSpan(lineno, i + 1, i + 2)))
                i += 1
                continue
            if ch == '"':
                j = line.find('"', i + 1)
                if j < 0:
                    raise ParseError("unterminated string",
                                     SourceSpan(lineno, i + 1, len(line) + 1))
                tokens.append(Token("string", line[i + 1:j],
                                    SourceSpan(lineno, i + 1, j + 2)))
                i = j + 1
                continue
            if ch.isalnum() or ch == "_":
                j = i
                while j < len(line) and (line[j].isalnum() or line[j] in "_'"):
                    j += 1
                tokens.append(Token("name", line[i:j],
                                    SourceSpan(lineno, i + 1, j + 1)))
                i = j
                continue
            raise ParseError(f"unexpected character {ch!r}",
                             SourceSpan(lineno, i + 1, i + 2))
    return tokens


@dataclass
class Workspace:
    grounds: Dict[str, GroundSet] = field(default_factory=dict)
    measurements: Dict[str, Measurement] = field(default_factory=dict)
    sequences: Dict[str, MeasurementSequence] = field(default_factory=dict)
    paths: Dict[str, Path] = field(default_factory=dict)
    assignments: Dict[str, Assignment] = field(default_factory=dict)
    #: source text of assignment statements, kept for canonical printing
    assignment_sources: Dict[str, Tuple[str, str, str]] = field(default_factory=dict)

    def __eq__(self, other):
        return isinstance(other, Workspace) and (
            self.grounds, self.measurements, self.sequences,
            self.paths, self.assignments,
        ) == (
            other.grounds, other.measurements, other.sequences,
            other.paths, other.assignments,
        )

    def to_canonical_dsl(self) -> str:
        lines = []
        for name in sorted(self.grounds):
            g = self.grounds[name]
            lines.append(f"elements {name} = {{{', '.join(g.elements)}}}")
        for name in sorted(self.measurements):
            m = self.measurements[name]
            blocks = ", ".join(
                "{" + ", ".join(sorted(b)) + "}"
                for b in sorted(m.blocks, key=lambda b: sorted(b)))
            lines.append(f"measurement {name} over {m.ground.id} = {{{blocks}}}")
        for name in sorted(self.sequences):
            s = self.sequences[name]
            lines.append(f"sequence {name} = [{', '.join(m.id for m in s.steps)}]")
        for name in sorted(self.paths):
            p = self.paths[name]
            seq_name = self._sequence_name_of(p)
            blocks = ", ".join(
                "{" + ", ".join(sorted(r)) + "}" for r in p.results)
            lines.append(f"path {name} over {seq_name} = [{blocks}]")
        for name in sorted(self.assignment_sources):
            seq_name, alg, filename = self.assignment_sources[name]
            lines.append(
                f'assignment {name} over {seq_name} algebra {alg} from "{filename}"')
        return "\n".join(lines) + ("\n" if lines else "")

    def _sequence_name_of(self, p: Path) -> str:
        for name, s in self.sequences.items():
            if s == p.sequence:
                return name
        raise KeyError("path sequence is not a named sequence")


class _Parser:
    def __init__(self, tokens: List[Token], base_dir: Optional[str]):
        self.tokens = tokens
        self.pos = 0
        self.base_dir = base_dir
        self.ws = Workspace()

    def _eof_span(self) -> SourceSpan:
        if self.tokens:
            return self.tokens[-1].span
        return SourceSpan(1, 1, 1)

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expect: Optional[str] = None, what: str = "") -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of document, expected {expect or what}",
                             self._eof_span())
        if expect is not None and tok.kind != expect:
            raise ParseError(
                f"expected {what or expect}, found {tok.text!r}", tok.span)
        self.pos += 1
        return tok

    def parse(self) -> Workspace:
        while self.peek() is not None:
            tok = self.next("name", "a statement keyword")
            handler = {
                "elements": self.parse_elements,
                "measurement": self.parse_measurement,
                "sequence": self.parse_sequence,
                "path": self.parse_path,
                "assignment": self.parse_assignment,
            }.get(tok.text)
            if handler is None:
                raise ParseError(
                    f"unknown statement {tok.text!r}", tok.span)
            handler()
        return self.ws

    def _declare(self, table: dict, name_tok: Token, kind: str):
        if name_tok.text in table:
            raise SemanticError(
                f"duplicate {kind} name {name_tok.text!r}", name_tok.span)

    def _keyword(self, word: str):
        tok = self.next("name", f"'{word}'")
        if tok.text != word:
            raise ParseError(f"expected '{word}', found {tok.text!r}", tok.span)
        return tok

    def _id_list(self) -> List[str]:
        self.next("{")
        ids = [self.next("name", "an element id").text]
        while self.peek() and self.peek().kind == ",":
            self.next(",")
            ids.append(self.next("name", "an element id").text)
        self.next("}", "'}'")
        return ids

    def parse_elements(self):
        name = self.next("name", "a ground set name")
        self._declare(self.ws.grounds, name, "ground set")
        self.next("=", "'='")
        ids = self._id_list()
        if len(set(ids)) != len(ids):
            raise SemanticError("duplicate element id", name.span)
        self.ws.grounds[name.text] = GroundSet(name.text, tuple(ids))

    def _resolve(self, table: dict, tok: Token, kind: str):
        if tok.text not in table:
            raise SemanticError(f"unknown {kind} {tok.text!r}", tok.span)
        return table[tok.text]

    def parse_measurement(self):
        name = self.next("name", "a measurement name")
        self._declare(self.ws.measurements, name, "measurement")
        self._keyword("over")
        ground_tok = self.next("name", "a ground set name")
        ground = self._resolve(self.ws.grounds, ground_tok, "ground set")
        self.next("=", "'='")
        self.next("{")
        blocks = [self._id_list()]
        while self.peek() and self.peek().kind == ",":
            self.next(",")
            blocks.append(self._id_list())
        self.next("}", "'}'")
        try:
            m = measurement(name.text, ground, blocks)
        except ValueError as exc:
            raise SemanticError(f"not a partition: {exc}", name.span) from exc
        self.ws.measurements[name.text] = m

    def parse_sequence(self):
        name = self.next("name", "a sequence name")
        self._declare(self.ws.sequences, name, "sequence")
        self.next("=", "'='")
        self.next("[", "'['")
        steps = [self._resolve(self.ws.measurements,
                               self.next("name", "a measurement name"),
                               "measurement")]
        while self.peek() and self.peek().kind == ",":
            self.next(",")
            steps.append(self._resolve(self.ws.measurements,
                                       self.next("name", "a measurement name"),
                                       "measurement"))
        self.next("]", "']'")
        try:
            s = sequence(steps)
        except ValueError as exc:
            raise SemanticError(str(exc), name.span) from exc
        self.ws.sequences[name.text] = s

    def parse_path(self):
        name = self.next("name", "a path name")
        self._declare(self.ws.paths, name, "path")
        self._keyword("over")
        seq_tok = self.next("name", "a sequence name")
        s = self._resolve(self.ws.sequences, seq_tok, "sequence")
        self.next("=", "'='")
        self.next("[", "'['")
        blocks = [frozenset(self._id_list())]
        while self.peek() and self.peek().kind == ",":
            self.next(",")
            blocks.append(frozenset(self._id_list()))
        self.next("]", "']'")
        try:
            p = Path(s, tuple(blocks))
        except ValueError as exc:
            raise SemanticError(str(exc), name.span) from exc
        self.ws.paths[name.text] = p

    def parse_assignment(self):
        name = self.next("name", "an assignment name")
        self._declare(self.ws.assignments, name, "assignment")
        self._keyword("over")
        seq_tok = self.next("name", "a sequence name")
        s = self._resolve(self.ws.sequences, seq_tok, "sequence")
        self._keyword("algebra")
        alg_tok = self.next("name", "an algebra label")
        try:
            kind = AlgebraKind.from_label(alg_tok.text)
        except ValueError as exc:
            raise SemanticError(str(exc), alg_tok.span) from exc
        self._keyword("from")
        file_tok = self.next("string", "a file name")
        filename = file_tok.text
        full = filename if self.base_dir is None \
            else os.path.join(self.base_dir, filename)
        try:
            with open(full, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise SemanticError(f"cannot read matrix file: {exc}", file_tok.span)
        except json.JSONDecodeError as exc:
            raise SemanticError(f"invalid JSON in matrix file: {exc}", file_tok.span)
        try:
            asg = load_assignment_json(doc, self.ws.measurements, kind)
        except (ValueError, CompalgError) as exc:
            raise SemanticError(f"invalid assignment: {exc}", file_tok.span)
        self.ws.assignments[name.text] = asg
        self.ws.assignment_sources[name.text] = (seq_tok.text, kind.label, filename)


def _coefficient(value) -> object:
    if isinstance(value, str):
        num, _, den = value.partition("/")
        return Fraction(int(num), int(den or "1"))
    if isinstance(value, bool):
        raise ValueError("boolean is not a coefficient")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value
    raise ValueError(f"bad coefficient {value!r}")


def load_assignment_json(doc: dict, measurements: Dict[str, Measurement],
                         kind: AlgebraKind) -> Assignment:
    """Build an Assignment from the JSON matrix-file format.

    Top level: {"algebra": "C", "steps": [{"from": id, "to": id,
    "matrix": rows}]} where rows[i][j] is a coefficient array of the
    algebra's dimension, indexed by the declared element order of the two
    measurements' ground sets.  Rationals are "p/q" strings.
    """
    label = doc.get("algebra")
    if label is not None and AlgebraKind.from_label(label) is not kind:
        raise ValueError(
            f"matrix file algebra {label!r} does not match declared {kind.label!r}")
    algebra = make_algebra(kind)
    matrices = {}
    for step in doc.get("steps", []):
        m_from = measurements.get(step.get("from"))
        m_to = measurements.get(step.get("to"))
        if m_from is None or m_to is None:
            raise ValueError(
                f"unknown measurement in step {step.get('from')!r} -> {step.get('to')!r}")
        rows = step["matrix"]
        g_from, g_to = m_from.ground, m_to.ground
        if len(rows) != len(g_from.elements):
            raise ValueError("matrix row count does not match source ground")
        table = {}
        for i, x in enumerate(g_from.elements):
            if len(rows[i]) != len(g_to.elements):
                raise ValueError("matrix column count does not match target ground")
            for j, y in enumerate(g_to.elements):
                coeffs = [_coefficient(v) for v in rows[i][j]]
                table[(x, y)] = algebra.amplitude(coeffs)
        key = (g_from, g_to)
        if (g_from.element_set(), g_to.element_set()) in \
                {(a.element_set(), b.element_set()) for a, b in matrices}:
            raise ValueError("duplicate matrix for one ground pair")
        matrices[key] = table
    return Assignment(algebra, matrices)


def parse(document: str, base_dir: Optional[str] = None) -> Workspace:
    """Parse a DSL document into a validated workspace."""
    tokens = _tokenize(document)
    return _Parser(tokens, base_dir).parse()
