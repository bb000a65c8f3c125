from kblink.rdf import serialize_ntriples
from kblink.synthetic import generate_kb, low_density_dataset, scale_kb, synthetic_documents


def test_kb_is_seeded():
    a, b = generate_kb(n_persons=30, seed=4), generate_kb(n_persons=30, seed=4)
    assert a.triples == b.triples and a.acronyms == b.acronyms
    assert generate_kb(n_persons=30, seed=5).triples != a.triples


def test_kb_shape():
    kb = generate_kb(n_persons=30, n_places=5, n_org_fragments=4, orgs_per_fragment=3)
    assert len(kb.by_kind("person")) == 30 and len(kb.by_kind("org")) == 12
    assert len({e.iri for e in kb.entities}) == len(kb.entities)
    assert all(len(v) >= 1 for v in kb.acronyms.values())
    assert serialize_ntriples(kb.triples).count("\n") == len(kb.triples)


def test_scale_kb_size():
    assert len(scale_kb(5000).triples) == 5000


def test_documents_spans_match_labels():
    kb = generate_kb(n_persons=40)
    labels = {e.iri: e for e in kb.entities}
    data = synthetic_documents(kb, n_docs=30)
    assert len(data.documents) == 30
    for doc in data.documents:
        for g in doc.gold:
            e = labels[g.iri]
            assert doc.text[g.start:g.end] in (e.label, e.first)


def test_low_density():
    kb = generate_kb()
    data = low_density_dataset(kb, n_docs=500)
    assert 1.7 <= data.mention_count / len(data.documents) <= 1.9
    emergent = sum(g.iri is None for d in data.documents for g in d.gold)
    assert 0 < emergent < data.mention_count
    assert low_density_dataset(kb, n_docs=500).dump() == data.dump()
