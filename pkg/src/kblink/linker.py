"""End-to-end linking of one document, plus the JSON request/response shapes."""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from .candidates import Candidate, Document, Mention, SpanError, coreference_heads, generate_candidates
from .config import LinkerConfig
from .disambiguation import Assignment, DisambiguationGraph, disambiguate
from .index import IndexBundle


class RequestError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass(frozen=True)
class LinkRequest:
    text: str
    spans: tuple
    language: str = "en"
    config_overrides: Optional[Mapping[str, Any]] = None

    @classmethod
    def from_json(cls, payload: Any) -> "LinkRequest":
        if not isinstance(payload, dict):
            raise RequestError("BAD_REQUEST", "request body must be a JSON object")
        text = payload.get("text")
        if not isinstance(text, str):
            raise RequestError("BAD_REQUEST", "'text' must be a string")
        raw = payload.get("mentions", [])
        if not isinstance(raw, list):
            raise RequestError("SPAN_INVALID", "'mentions' must be a list")
        spans = []
        for item in raw:
            if isinstance(item, dict):
                start, end = item.get("start"), item.get("end")
            elif isinstance(item, (list, tuple)) and len(item) == 2:
                start, end = item
            else:
                raise RequestError("SPAN_INVALID", f"bad mention entry: {item!r}")
            if type(start) is not int or type(end) is not int:
                raise RequestError("SPAN_INVALID", f"span offsets must be integers: {item!r}")
            spans.append((start, end))
        overrides = payload.get("configOverrides", payload.get("config_overrides"))
        if overrides is not None and not isinstance(overrides, dict):
            raise RequestError("CONFIG_INVALID", "'configOverrides' must be an object")
        if overrides:
            try:
                LinkerConfig().with_overrides(overrides)
            except (KeyError, ValueError) as exc:
                raise RequestError("CONFIG_INVALID", str(exc)) from None
        language = payload.get("language", "en")
        if not isinstance(language, str):
            raise RequestError("BAD_REQUEST", "'language' must be a string")
        return cls(text, tuple(spans), language, overrides or None)

    def document(self) -> Document:
        try:
            return Document.from_spans(self.text, self.spans)
        except SpanError as exc:
            raise RequestError("SPAN_INVALID", str(exc)) from None


@dataclass
class LinkResult:
    document: Document
    assignments: List[Assignment]
    candidates: Dict[Mention, List[Candidate]]
    graph: DisambiguationGraph


class Linker:
    """Links documents against one loaded index. Safe for concurrent use."""

    def __init__(self, index: IndexBundle, config: Optional[LinkerConfig] = None):
        self.index = index
        self.config = config or LinkerConfig()

    def link_document(self, document: Document, config: Optional[LinkerConfig] = None) -> LinkResult:
        config = config or self.config
        heads = coreference_heads(document.mentions) if config.use_coreference else {}
        by_head: Dict[Mention, List[Candidate]] = {}
        per_mention: Dict[Mention, List[Candidate]] = {}
        for m in document.mentions:
            head = heads.get(m, m)
            if head not in by_head:
                by_head[head] = generate_candidates(document, head, self.index, config, heads)
            per_mention[m] = by_head[head]
        graph, assignments = disambiguate(per_mention, self.index.graph, config, document.mentions)
        return LinkResult(document, assignments, per_mention, graph)

    def link(self, text: str, spans: Iterable, config: Optional[LinkerConfig] = None) -> List[Assignment]:
        return self.link_document(Document.from_spans(text, spans), config).assignments

    def handle(self, request: LinkRequest, cli_overrides: Optional[Mapping[str, Any]] = None, timing: bool = True) -> dict:
        """Run one request; returns the response body. Raises RequestError."""
        started = time.perf_counter()
        document = request.document()
        config = self.config.with_overrides({"language": request.language})
        config = config.with_overrides(request.config_overrides).with_overrides(cli_overrides)
        result = self.link_document(document, config)
        elapsed = int(round((time.perf_counter() - started) * 1000)) if timing else 0
        return response_body(result.assignments, elapsed, self.index.index_version)

    def handle_many(
        self, requests: Sequence[LinkRequest], workers: int = 1, cli_overrides=None, timing: bool = False
    ) -> List[dict]:
        def one(req):
            try:
                return self.handle(req, cli_overrides, timing)
            except RequestError as exc:
                return {"error": exc.as_dict()}

        if workers <= 1:
            return [one(r) for r in requests]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, requests))


def response_body(assignments: Sequence[Assignment], timing_ms: int, index_version: str) -> dict:
    return {
        "assignments": [
            {
                "start": a.mention.start,
                "end": a.mention.end,
                "iri": a.iri,
                "emergent": a.emergent,
                "score": a.score,
            }
            for a in assignments
        ],
        "timingMs": timing_ms,
        "indexVersion": index_version,
    }


def dumps_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
