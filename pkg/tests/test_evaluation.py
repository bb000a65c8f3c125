import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kblink.candidates import Mention
from kblink.config import LinkerConfig
from kblink.disambiguation import Assignment
from kblink.evaluation import (
    Counts,
    GoldDataset,
    GoldDocument,
    GoldMention,
    MentionMismatch,
    MentionOutcome,
    PopularityBin,
    TypesUnavailable,
    count,
    evaluate,
    filter_persons,
    filter_popularity_bin,
    format_csv,
    format_table,
    normalize_iri,
    outcomes,
    popularity_bin_of,
    predict,
    run_ablation,
    score_d2kb,
    score_outcomes,
)
from kblink.ingest import IngestConfig
from kblink.kbgraph import PopularityMethod, PopularityTable

import oracles
from conftest import DBR


def ds(*docs):
    return GoldDataset("t", "en", [GoldDocument(text, tuple(GoldMention(*g) for g in gold)) for text, gold in docs])


def test_each_rule_once():
    # correct, wrong, spurious on an emerging mention, missed
    gold = ds(("a b c d", [(0, 1, "A"), (2, 3, "B"), (4, 5, None), (6, 7, "D")]))
    c = count(outcomes(gold, [["A", "X", "C", None]]))
    assert (c.tp, c.fp, c.fn) == (1, 2, 2)


def test_four_sevenths():
    # two correct, one wrong IRI (fp and fn), one missed (fn)
    gold = ds(("a b c d", [(0, 1, "A"), (2, 3, "B"), (4, 5, "C"), (6, 7, "D")]))
    report = score_d2kb(gold, [["A", "B", "X", None]])
    assert (report.tp, report.fp, report.fn) == (2, 1, 2)
    assert report.micro_precision == pytest.approx(2 / 3)
    assert report.micro_recall == pytest.approx(1 / 2)
    assert report.micro_f1 == pytest.approx(4 / 7)


def test_epsilon_pairs_count_nothing():
    gold = ds(("x", [(0, 1, None)]))
    assert count(outcomes(gold, [[None]])) == Counts(0, 0, 0)
    assert count(outcomes(gold, [["EMERGENT"]])) == Counts(0, 0, 0)
    r = score_d2kb(gold, [[None]])
    assert (r.micro_precision, r.micro_recall, r.micro_f1) == (0.0, 0.0, 0.0)


def test_emergent_assignments_are_epsilon():
    gold = ds(("Zzyzx", [(0, 5, None)]))
    a = Assignment(Mention(0, 5, "Zzyzx"), "urn:e:Zzyzx", True)
    assert count(outcomes(gold, [[a]])) == Counts(0, 0, 0)


def test_iri_normalisation():
    assert normalize_iri(" <http://x/Caf%C3%A9> ") == "http://x/Café"
    gold = ds(("x", [(0, 1, "http://x/Café")]))
    assert count(outcomes(gold, [["<http://x/Caf%C3%A9>"]])).tp == 1


iri = st.one_of(st.none(), st.sampled_from("ABCD"))


@given(st.lists(st.lists(st.tuples(iri, iri), max_size=6), max_size=8))
def test_matches_confusion_oracle(docs):
    gold = ds(*[(" " * (2 * len(d) + 1), [(2 * i, 2 * i + 1, g) for i, (g, _) in enumerate(d)]) for d in docs])
    report = score_d2kb(gold, [[p for _, p in d] for d in docs])
    tp, fp, fn = oracles.confusion([pair for d in docs for pair in d])
    assert (report.tp, report.fp, report.fn) == (tp, fp, fn)
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    assert report.micro_f1 == pytest.approx(2 * p * r / (p + r) if p + r else 0.0)


@given(st.lists(st.lists(st.tuples(iri, iri), min_size=1, max_size=4), min_size=1, max_size=6), st.randoms())
def test_document_order_is_irrelevant(docs, rnd):
    def score(ds_docs):
        gold = ds(*[("  " * len(d), [(2 * i, 2 * i + 1, g) for i, (g, _) in enumerate(d)]) for d in ds_docs])
        r = score_d2kb(gold, [[p for _, p in d] for d in ds_docs])
        return r.tp, r.fp, r.fn

    shuffled = list(docs)
    rnd.shuffle(shuffled)
    assert score(docs) == score(shuffled)


def test_mismatches():
    gold = ds(("ab", [(0, 1, "A"), (1, 2, "B")]))
    with pytest.raises(MentionMismatch):
        outcomes(gold, [["A"]])
    with pytest.raises(MentionMismatch):
        outcomes(gold, [])
    wrong_span = Assignment(Mention(0, 2, "ab"), "A", False)
    with pytest.raises(MentionMismatch):
        outcomes(gold, [[wrong_span, "B"]])


def test_dataset_roundtrip(tmp_path):
    gold = ds(("Obama spoke", [(0, 5, DBR + "Barack_Obama")]), ("Zzyzx", [(0, 5, None)]))
    p = tmp_path / "g.jsonl"
    p.write_text(gold.dump())
    back = GoldDataset.load(p)
    assert back.documents == gold.documents and back.mention_count == 2
    p.write_text('{"text": "ab", "gold": [{"start": 1, "end": 9, "iri": "A"}]}\n')
    with pytest.raises(ValueError):
        GoldDataset.load(p)


def test_persons_filter():
    types = {"p1": ["Person"], "p2": ["Actor", "Person"], "c": ["City"]}
    items = [MentionOutcome(0, i, i + 1, g, g) for i, g in enumerate(["p1", "p2", "c", "unknown", None])]
    kept = filter_persons(items, types, ["Person"])
    assert [o.gold for o in kept] == ["p1", "p2"]
    with pytest.raises(TypesUnavailable) as info:
        filter_persons(items, None, ["Person"])
    assert info.value.code == "TYPES_UNAVAILABLE"


def test_bin_boundaries():
    assert [popularity_bin_of(r, 10).value for r in range(1, 11)] == (
        ["pr10"] + ["pr10-55"] * 4 + ["pr55-100"] * 5
    )
    assert popularity_bin_of(1, 20) is PopularityBin.TOP10
    assert popularity_bin_of(2, 20) is PopularityBin.TOP10
    assert popularity_bin_of(3, 20) is PopularityBin.MID_10_55
    assert popularity_bin_of(11, 20) is PopularityBin.MID_10_55
    assert popularity_bin_of(12, 20) is PopularityBin.BOTTOM_55_100


def test_ten_resource_top_bin():
    table = PopularityTable({f"r{i}": float(10 - i) for i in range(10)}, PopularityMethod.PAGERANK)
    items = [MentionOutcome(0, i, i + 1, f"r{i}", None) for i in range(10)]
    assert [o.gold for o in filter_popularity_bin(items, table, PopularityBin.TOP10)] == ["r0"]


def test_bins_partition_and_match_oracle(mini_index):
    pop = mini_index.popularity
    golds = sorted(pop.scores)
    items = [MentionOutcome(0, i, i + 1, g, g) for i, g in enumerate(golds)] + [MentionOutcome(1, 0, 1, None, "x")]
    by_bin = {b: filter_popularity_bin(items, pop, b) for b in PopularityBin}
    seen = [o for b in PopularityBin for o in by_bin[b]]
    assert sorted(seen, key=lambda o: o.gold) == [o for o in items if o.gold is not None]
    expected = oracles.percentile_bins(pop.scores)
    for b, subset in by_bin.items():
        assert all(expected[o.gold] == b.value for o in subset)


def test_missing_resource_lands_in_bottom_bin(mini_index):
    items = [MentionOutcome(0, 0, 1, "http://nowhere/x", None)]
    assert filter_popularity_bin(items, mini_index.popularity, PopularityBin.BOTTOM_55_100) == items


def test_score_outcomes_filters():
    items = [MentionOutcome(0, 0, 1, "A", "A"), MentionOutcome(0, 1, 2, "B", "C")]
    report = score_outcomes(items, {"first": items[:1]})
    assert report.per_filter["first"][0] == 1.0 and report.micro_f1 == 0.5


@pytest.fixture(scope="module")
def small_gold():
    return ds(
        ("Angelina, her father Jon, and her partner Brad never played together in the same movie.",
         [(0, 8, DBR + "Angelina_Jolie"), (21, 24, DBR + "Jon_Voight"), (42, 46, DBR + "Brad_Pitt")]),
        ("Obama was born in Honolulu", [(0, 5, DBR + "Barack_Obama"), (18, 26, DBR + "Honolulu")]),
        ("Zzyzx Qwer is new", [(0, 10, None)]),
    )


# the fixture KB types actors as dbo:Actor only, with no class hierarchy
PERSONS = IngestConfig.default().person_type_iris + ["http://dbpedia.org/ontology/Actor"]


def test_evaluate_end_to_end(mini_linker, small_gold):
    report = evaluate(mini_linker, small_gold, filters=["persons", "pr10"], person_types=PERSONS)
    assert (report.tp, report.fp, report.fn) == (5, 0, 0)
    assert report.per_filter["persons"][1].tp == 4
    preds = predict(mini_linker, small_gold)
    assert [len(p) for p in preds] == [3, 2, 1] and preds[2][0].emergent


def test_ablation(mini_linker, small_gold):
    grid = [("full", {}), ("no-coref", {"coref": False}), ("pagerank", {"algorithm": "pagerank"})]
    rows = run_ablation(mini_linker, small_gold, grid, ["pr10"])
    assert [r.name for r in rows] == ["full", "no-coref", "pagerank"]
    assert not rows[1].config.use_coreference
    single = run_ablation(mini_linker, small_gold, [("only", {})])[0].report
    direct = score_d2kb(small_gold, predict(mini_linker, small_gold))
    assert (single.tp, single.fp, single.fn, single.micro_f1) == (direct.tp, direct.fp, direct.fn, direct.micro_f1)
    table = format_table(rows).splitlines()
    assert len(table) == 4 and table[0].split()[-1] == "f1[pr10]"
    csv_lines = format_csv(rows).splitlines()
    assert csv_lines[0].startswith("variant,precision,recall,f1,delta_f1") and len(csv_lines) == 4
    assert csv_lines[1].split(",")[4] == "+0.0000"


def test_linker_config_is_not_mutated(mini_linker, small_gold):
    before = mini_linker.config
    evaluate(mini_linker, small_gold, LinkerConfig(sigma=0.9))
    assert mini_linker.config is before
