import json
from math import factorial

import pytest

from kblink.ingest import (
    IngestConfig,
    SurfaceSource,
    build_context_documents,
    collect,
    extract_surface_forms,
    extract_types,
    person_name_permutations,
    surface_records,
)
from kblink.rdf import Literal, Resource, Triple

import oracles

LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
NAME = "http://xmlns.com/foaf/0.1/name"
TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
COMMENT = "http://www.w3.org/2000/01/rdf-schema#comment"
PERSON = "http://dbpedia.org/ontology/Person"


def lab(s, text, lang="en", pred=LABEL):
    return Triple(Resource(s), Resource(pred), Literal(text, lang))


@pytest.fixture
def config():
    return IngestConfig.default()


def test_one_record_per_label(config):
    recs = extract_surface_forms([lab("nyc", "New York City"), lab("nyc", "NY"), lab("nyc", "Big Apple")], config)
    assert len(recs) == 3
    assert {r.resource for r in recs} == {"nyc"}
    assert [r.surface for r in recs if r.is_principal] == ["New York City"]


def test_no_labels_no_records(config):
    assert extract_surface_forms([Triple(Resource("a"), Resource(TYPE), Resource(PERSON))], config) == []


def test_shared_label(config):
    recs = extract_surface_forms([lab("state", "New York"), lab("city", "New York")], config)
    assert sorted(r.resource for r in recs) == ["city", "state"]
    assert {r.surface for r in recs} == {"New York"}


def test_principal_prefers_first_predicate_and_language(config):
    triples = [lab("x", "Name Only", pred=NAME), lab("x", "Lisboa", "pt"), lab("x", "Lisbon", "en")]
    recs = extract_surface_forms(triples, config)
    assert [r.surface for r in recs if r.is_principal] == ["Lisbon"]


def test_types(config):
    types = extract_types([Triple(Resource("a"), Resource(TYPE), Resource(PERSON))], config)
    assert types == {"a": frozenset({PERSON})}


def test_permutation_examples():
    out = person_name_permutations("Beyoncé Giselle Knowles-Carter")
    assert "Beyoncé Knowles" in out and "Beyoncé Carter" in out
    assert person_name_permutations("Plato") == {"Plato"}
    assert person_name_permutations("Ada Lovelace") == {"Ada", "Lovelace", "Ada Lovelace", "Lovelace Ada"}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_permutation_count(n):
    tokens = [f"T{i}" for i in range(n)]
    out = person_name_permutations(" ".join(tokens))
    assert len(out) == sum(factorial(n) // factorial(n - k) for k in range(1, n + 1))
    assert out == oracles.subset_orderings(tokens)


def test_permutation_cap():
    name = "A B C D E F"
    assert person_name_permutations(name, max_tokens=5) == {name, "A", "B", "C", "D", "E", "F"}


def test_context_documents():
    t = [lab("a", "the Big Apple")]
    assert build_context_documents(t, "a", frozenset({"the"})) == {"big": 1, "apple": 1}
    assert build_context_documents(t, "b") == {}
    t = [lab("a", "actor"), Triple(Resource("a"), Resource(COMMENT), Literal("American actor"))]
    assert build_context_documents(t, "a") == {"actor": 2, "american": 1}


def test_person_and_rare_records(config):
    triples = [
        lab("mj", "Michael Jackson"),
        Triple(Resource("mj"), Resource(TYPE), Resource(PERSON)),
        Triple(Resource("mj"), Resource(COMMENT), Literal("Michael Jackson was an American singer.", "en")),
        Triple(Resource("mj"), Resource(COMMENT), Literal("Ein deutscher Sänger.", "de")),
    ]
    recs = surface_records(collect(triples, config), config)
    by_source = {}
    for r in recs:
        by_source.setdefault(r.source, set()).add(r.surface)
    assert by_source[SurfaceSource.LABEL] == {"Michael Jackson"}
    assert by_source[SurfaceSource.PERSON_PERMUTATION] == {"Michael", "Jackson", "Jackson Michael"}
    assert by_source[SurfaceSource.RARE_REFERENCE] == {"American singer"}


def test_config_file_merges_over_defaults(tmp_path):
    path = tmp_path / "ingest.json"
    path.write_text(json.dumps({"language": "de", "kb_name": "dewiki"}))
    cfg = IngestConfig.from_file(path)
    assert cfg.language == "de" and cfg.label_predicates == IngestConfig.default().label_predicates
    path.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ValueError):
        IngestConfig.from_file(path)
