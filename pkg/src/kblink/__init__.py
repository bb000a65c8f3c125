"""Knowledge-base-agnostic entity linking: index building, candidate
generation, graph disambiguation and D2KB evaluation."""
from .candidates import Candidate, Document, Mention, generate_candidates
from .config import Algorithm, LinkerConfig
from .disambiguation import Assignment, disambiguate
from .evaluation import EvalReport, GoldDataset, score_d2kb
from .index import IndexBundle, build_index, build_index_from_files
from .ingest import IngestConfig
from .linker import Linker, LinkRequest

__all__ = [
    "Algorithm",
    "Assignment",
    "Candidate",
    "Document",
    "EvalReport",
    "GoldDataset",
    "IndexBundle",
    "IngestConfig",
    "LinkRequest",
    "Linker",
    "LinkerConfig",
    "Mention",
    "build_index",
    "build_index_from_files",
    "disambiguate",
    "generate_candidates",
    "score_d2kb",
]
