"""N-Triples reading and writing.

Only the line-based N-Triples syntax is supported. Triples that mention a
blank node are skipped (lenient mode) or rejected (strict mode), like any
other line that cannot be turned into a resource-level statement.
"""
from __future__ import annotations

import gzip
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, NamedTuple, Optional, Union

_WS = re.compile(r"\s")


class Resource(str):
    """An IRI. Equality and hashing are those of the IRI string."""

    __slots__ = ()

    def __new__(cls, iri: str):
        if not iri or _WS.search(iri):
            raise ValueError(f"invalid IRI: {iri!r}")
        return super().__new__(cls, iri)

    @property
    def iri(self) -> str:
        return str(self)

    def __repr__(self):
        return f"Resource({str(self)!r})"


class Literal(NamedTuple):
    text: str
    language: Optional[str] = None
    datatype: Optional[str] = None


class Triple(NamedTuple):
    subject: Resource
    predicate: Resource
    object: Union[Resource, Literal]


class ParseError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass
class ParseStats:
    lines: int = 0
    triples: int = 0
    skipped: int = 0
    blank_nodes: int = 0


_IRI = r'<((?:[^<>"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)>'
_BNODE = r"(_:[^\s.]+(?:\.[^\s.]+)*)"
_LITERAL = (
    r'"((?:[^"\\\n\r]|\\.)*)"'
    r"(?:@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)|\^\^" + _IRI + r")?"
)
_LINE = re.compile(
    r"^[ \t]*(?:" + _IRI + "|" + _BNODE + r")[ \t]+" + _IRI + r"[ \t]*"
    r"(?:" + _IRI + "|" + _BNODE + "|" + _LITERAL + r")[ \t]*\.[ \t]*(?:#.*)?$"
)
_SKIP = re.compile(r"^[ \t]*(?:#.*)?$")
_ESCAPE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))", re.S)
_ECHARS = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str) -> str:
    if "\\" not in text:
        return text

    def repl(m: re.Match) -> str:
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        try:
            return _ECHARS[m.group(3)]
        except KeyError:
            raise ValueError(f"bad escape \\{m.group(3)}") from None

    return _ESCAPE.sub(repl, text)


class _BlankNode(ValueError):
    pass


def parse_line(line: str) -> Optional[Triple]:
    """Parse one statement. Returns None for blank/comment lines.

    Raises ValueError with a reason for malformed or blank-node statements.
    """
    m = _LINE.match(line.rstrip("\r\n"))
    if m is None:
        if _SKIP.match(line.rstrip("\r\n")):
            return None
        raise ValueError("malformed statement")
    s_iri, s_bnode, pred, o_iri, o_bnode, lit, lang, dtype = m.groups()
    if s_bnode or o_bnode:
        raise _BlankNode("blank node")
    subject = Resource(_unescape(s_iri))
    predicate = Resource(_unescape(pred))
    if o_iri is not None:
        obj: Union[Resource, Literal] = Resource(_unescape(o_iri))
    else:
        obj = Literal(_unescape(lit), lang, _unescape(dtype) if dtype else None)
    return Triple(subject, predicate, obj)


def parse_ntriples(
    stream: Iterable[Union[bytes, str]],
    strict: bool = False,
    stats: Optional[ParseStats] = None,
) -> Iterator[Triple]:
    """Yield triples from an iterable of N-Triples lines (bytes or str).

    In lenient mode bad lines are counted in ``stats.skipped``; in strict
    mode the first one raises :class:`ParseError`.
    """
    if stats is None:
        stats = ParseStats()
    for lineno, raw in enumerate(stream, 1):
        stats.lines += 1
        try:
            line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
            triple = parse_line(line)
        except UnicodeDecodeError:
            if strict:
                raise ParseError(lineno, "invalid UTF-8") from None
            stats.skipped += 1
            continue
        except _BlankNode:
            if strict:
                raise ParseError(lineno, "blank node") from None
            stats.blank_nodes += 1
            stats.skipped += 1
            continue
        except ValueError as exc:
            if strict:
                raise ParseError(lineno, str(exc)) from None
            stats.skipped += 1
            continue
        if triple is not None:
            stats.triples += 1
            yield triple


def open_maybe_gzip(path: Union[str, Path]) -> IO[bytes]:
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def read_ntriples_files(
    paths: Iterable[Union[str, Path]], strict: bool = False, stats: Optional[ParseStats] = None
) -> Iterator[Triple]:
    if stats is None:
        stats = ParseStats()
    for path in paths:
        with open_maybe_gzip(path) as fh:
            yield from parse_ntriples(fh, strict=strict, stats=stats)


def _escape_literal(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def serialize_triple(triple: Triple) -> str:
    s, p, o = triple
    if isinstance(o, Literal):
        obj = f'"{_escape_literal(o.text)}"'
        if o.language:
            obj += f"@{o.language}"
        elif o.datatype:
            obj += f"^^<{o.datatype}>"
    else:
        obj = f"<{o}>"
    return f"<{s}> <{p}> {obj} ."


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    buf = io.StringIO()
    for t in triples:
        buf.write(serialize_triple(t))
        buf.write("\n")
    return buf.getvalue()
