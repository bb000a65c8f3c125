"""D2KB scoring: micro precision/recall/F1 over given mention spans.

Per mention, with epsilon meaning "not in the KB":

    system == gold, both KB IRIs    -> tp
    system != gold, both KB IRIs    -> fp and fn
    system KB IRI, gold epsilon     -> fp
    system epsilon, gold KB IRI     -> fn
    both epsilon                    -> nothing
"""
from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
from urllib.parse import unquote

from .config import LinkerConfig
from .disambiguation import Assignment
from .kbgraph import PopularityTable
from .linker import Linker

EMERGENT = "EMERGENT"


class MentionMismatch(ValueError):
    pass


class TypesUnavailable(RuntimeError):
    code = "TYPES_UNAVAILABLE"


@dataclass(frozen=True)
class GoldMention:
    start: int
    end: int
    iri: Optional[str]  # None is epsilon


@dataclass(frozen=True)
class GoldDocument:
    text: str
    gold: Tuple[GoldMention, ...]

    @property
    def spans(self) -> List[Tuple[int, int]]:
        return [(g.start, g.end) for g in self.gold]


@dataclass
class GoldDataset:
    name: str
    language: str
    documents: List[GoldDocument]

    @classmethod
    def load(cls, path, name: Optional[str] = None) -> "GoldDataset":
        docs = []
        language = "en"
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                row = json.loads(line)
                language = row.get("language", language)
                gold = []
                for g in row.get("gold", row.get("mentions", [])):
                    iri = g.get("iri")
                    if iri is None or iri == EMERGENT:
                        iri = None
                    if not 0 <= g["start"] < g["end"] <= len(row["text"]):
                        raise ValueError(f"{path}:{lineno}: gold span out of bounds")
                    gold.append(GoldMention(g["start"], g["end"], iri))
                docs.append(GoldDocument(row["text"], tuple(gold)))
        return cls(name or Path(path).stem, language, docs)

    def dump(self) -> str:
        return "".join(
            json.dumps(
                {
                    "text": d.text,
                    "language": self.language,
                    "gold": [{"start": g.start, "end": g.end, "iri": g.iri or EMERGENT} for g in d.gold],
                },
                ensure_ascii=False,
            )
            + "\n"
            for d in self.documents
        )

    @property
    def mention_count(self) -> int:
        return sum(len(d.gold) for d in self.documents)


def normalize_iri(iri: str) -> str:
    iri = iri.strip()
    if iri.startswith("<") and iri.endswith(">"):
        iri = iri[1:-1]
    return unquote(iri)


@dataclass(frozen=True)
class MentionOutcome:
    doc: int
    start: int
    end: int
    gold: Optional[str]
    predicted: Optional[str]


Prediction = Union[Assignment, str, None]


def _predicted_iri(p: Prediction) -> Optional[str]:
    if p is None:
        return None
    if isinstance(p, Assignment):
        return None if p.emergent else normalize_iri(p.iri)
    return None if p == EMERGENT else normalize_iri(p)


def outcomes(gold: GoldDataset, predicted: Sequence[Sequence[Prediction]]) -> List[MentionOutcome]:
    if len(predicted) != len(gold.documents):
        raise MentionMismatch(f"{len(predicted)} predicted documents for {len(gold.documents)} gold documents")
    out = []
    for d, (doc, preds) in enumerate(zip(gold.documents, predicted)):
        if len(preds) != len(doc.gold):
            raise MentionMismatch(f"document {d}: {len(preds)} answers for {len(doc.gold)} gold mentions")
        for g, p in zip(doc.gold, preds):
            if isinstance(p, Assignment) and (p.mention.start, p.mention.end) != (g.start, g.end):
                raise MentionMismatch(
                    f"document {d}: answer span [{p.mention.start}, {p.mention.end}) != gold [{g.start}, {g.end})"
                )
            gold_iri = normalize_iri(g.iri) if g.iri is not None else None
            out.append(MentionOutcome(d, g.start, g.end, gold_iri, _predicted_iri(p)))
    return out


@dataclass
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def add(self, o: MentionOutcome) -> None:
        if o.predicted is not None and o.gold is not None:
            if o.predicted == o.gold:
                self.tp += 1
            else:
                self.fp += 1
                self.fn += 1
        elif o.predicted is not None:
            self.fp += 1
        elif o.gold is not None:
            self.fn += 1

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0


def count(items: Iterable[MentionOutcome]) -> Counts:
    c = Counts()
    for o in items:
        c.add(o)
    return c


@dataclass
class EvalReport:
    micro_precision: float
    micro_recall: float
    micro_f1: float
    tp: int
    fp: int
    fn: int
    per_filter: Dict[str, Tuple[float, Counts]] = field(default_factory=dict)

    @classmethod
    def from_counts(cls, c: Counts) -> "EvalReport":
        return cls(c.precision, c.recall, c.f1, c.tp, c.fp, c.fn)


def score_outcomes(items: Sequence[MentionOutcome], filters: Optional[Mapping[str, Sequence[MentionOutcome]]] = None) -> EvalReport:
    report = EvalReport.from_counts(count(items))
    for name, subset in (filters or {}).items():
        c = count(subset)
        report.per_filter[name] = (c.f1, c)
    return report


def score_d2kb(gold: GoldDataset, predicted: Sequence[Sequence[Prediction]]) -> EvalReport:
    return score_outcomes(outcomes(gold, predicted))


def filter_persons(
    items: Sequence[MentionOutcome],
    type_table: Optional[Mapping[str, Iterable[str]]],
    person_types: Iterable[str],
) -> List[MentionOutcome]:
    if type_table is None:
        raise TypesUnavailable("no type table loaded")
    persons = set(person_types)
    return [o for o in items if o.gold is not None and persons & set(type_table.get(o.gold, ()))]


class PopularityBin(str, enum.Enum):
    TOP10 = "pr10"
    MID_10_55 = "pr10-55"
    BOTTOM_55_100 = "pr55-100"


def popularity_bin_of(rank: int, total: int) -> PopularityBin:
    """Bin for a 1-based rank; boundaries are closed on the right."""
    if rank * 100 <= 10 * total:
        return PopularityBin.TOP10
    if rank * 100 <= 55 * total:
        return PopularityBin.MID_10_55
    return PopularityBin.BOTTOM_55_100


def filter_popularity_bin(
    items: Sequence[MentionOutcome], popularity: PopularityTable, which: PopularityBin
) -> List[MentionOutcome]:
    """Keep gold mentions whose resource falls in the popularity percentile bin.

    Resources missing from the table rank after every known resource.
    """
    which = PopularityBin(which)
    ranked = popularity.ranked()
    rank = {iri: i for i, iri in enumerate(ranked, 1)}
    total = len(ranked)
    out = []
    for o in items:
        if o.gold is None:
            continue
        if not total:
            found = PopularityBin.BOTTOM_55_100
        else:
            found = popularity_bin_of(rank.get(o.gold, total), total)
        if found is which:
            out.append(o)
    return out


def predict(linker: Linker, dataset: GoldDataset, config: Optional[LinkerConfig] = None) -> List[List[Assignment]]:
    config = (config or linker.config).with_overrides({"language": dataset.language})
    return [linker.link(doc.text, doc.spans, config) for doc in dataset.documents]


def evaluate(
    linker: Linker,
    dataset: GoldDataset,
    config: Optional[LinkerConfig] = None,
    filters: Sequence[str] = (),
    person_types: Sequence[str] = (),
) -> EvalReport:
    items = outcomes(dataset, predict(linker, dataset, config))
    subsets = {}
    for name in filters:
        if name == "persons":
            types = linker.index.types if linker.index.types else None
            subsets[name] = filter_persons(items, types, person_types)
        else:
            subsets[name] = filter_popularity_bin(items, linker.index.popularity, PopularityBin(name))
    return score_outcomes(items, subsets)


@dataclass
class AblationRow:
    name: str
    config: LinkerConfig
    report: EvalReport


def run_ablation(
    linker: Linker,
    dataset: GoldDataset,
    grid: Sequence[Tuple[str, Mapping]],
    filters: Sequence[str] = (),
    person_types: Sequence[str] = (),
) -> List[AblationRow]:
    rows = []
    for name, overrides in grid:
        config = linker.config.with_overrides(overrides)
        rows.append(AblationRow(name, config, evaluate(linker, dataset, config, filters, person_types)))
    return rows


def read_grid(path) -> List[Tuple[str, dict]]:
    """Grid file: JSON list of {"name": ..., "overrides": {...}}."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [(item["name"], dict(item.get("overrides", {}))) for item in data]


def _row_values(row: AblationRow, baseline: Optional[EvalReport]) -> List[str]:
    r = row.report
    delta = "" if baseline is None else f"{r.micro_f1 - baseline.micro_f1:+.4f}"
    vals = [row.name, f"{r.micro_precision:.4f}", f"{r.micro_recall:.4f}", f"{r.micro_f1:.4f}", delta, str(r.tp), str(r.fp), str(r.fn)]
    for name in sorted(r.per_filter):
        vals.append(f"{r.per_filter[name][0]:.4f}")
    return vals


def _header(rows: Sequence[AblationRow]) -> List[str]:
    filters = sorted(rows[0].report.per_filter) if rows else []
    return ["variant", "precision", "recall", "f1", "delta_f1", "tp", "fp", "fn", *[f"f1[{f}]" for f in filters]]


def format_table(rows: Sequence[AblationRow]) -> str:
    header = _header(rows)
    base = rows[0].report if rows else None
    body = [_row_values(r, base) for r in rows]
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(line.rstrip() for line in lines) + "\n"


def format_csv(rows: Sequence[AblationRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_header(rows))
    base = rows[0].report if rows else None
    for r in rows:
        writer.writerow(_row_values(r, base))
    return buf.getvalue()
