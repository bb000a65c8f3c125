"""Seeded synthetic knowledge bases and gold datasets.

Names are built from random syllables so that distinct names stay well
apart in trigram space. Popularity is skewed: edge targets are drawn with
Zipf-like weights, so a handful of entities collect most in-links.
"""
from __future__ import annotations

import random
from itertools import accumulate
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .evaluation import GoldDataset, GoldDocument, GoldMention
from .rdf import Literal, Resource, Triple

NS = "http://synthetic.invalid/resource/"
DBO = "http://dbpedia.org/ontology/"
RDF_TYPE = Resource("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
RDFS_LABEL = Resource("http://www.w3.org/2000/01/rdf-schema#label")
RDFS_COMMENT = Resource("http://www.w3.org/2000/01/rdf-schema#comment")

PERSON = DBO + "Person"
PLACE = DBO + "Place"
ORG = DBO + "Organisation"

_ONSETS = "b br c ch d dr f g gr h j k l m n p pr qu r s sh st t tr v w z".split()
_VOWELS = "a e i o u ai ea io ou".split()
_CODAS = ["", "", "n", "r", "l", "s", "th", "rk", "nd", "x"]
_ORG_SUFFIXES = ["Industries", "Records", "Press", "Laboratories", "Group", "Foundation"]
_FILLERS = ["with", "and", "near", "about", "from", "at", "for", "after"]
_OPENERS = ["Spotted", "Reading about", "Tonight", "Big news for", "Thinking of", "Lunch in"]


def _word(rng: random.Random, syllables: int) -> str:
    parts = []
    for _ in range(syllables):
        parts.append(rng.choice(_ONSETS) + rng.choice(_VOWELS) + rng.choice(_CODAS))
    return "".join(parts).capitalize()


def _vocabulary(rng: random.Random, size: int, syllables: Tuple[int, int] = (2, 3), taken=None) -> List[str]:
    seen = set(taken or ())
    out = []
    while len(out) < size:
        w = _word(rng, rng.randint(*syllables))
        if w.lower() not in seen and len(w) >= 4:
            seen.add(w.lower())
            out.append(w)
    return out


@dataclass
class Entity:
    iri: str
    kind: str
    label: str
    first: str = ""
    last: str = ""
    fragment: str = ""


@dataclass
class SyntheticKb:
    triples: List[Triple]
    entities: List[Entity]
    acronyms: Dict[str, List[str]] = field(default_factory=dict)

    def by_kind(self, kind: str) -> List[Entity]:
        return [e for e in self.entities if e.kind == kind]


def _zipf_pick(rng: random.Random, items: Sequence, cum_weights: Sequence[float]):
    return rng.choices(items, cum_weights=cum_weights, k=1)[0]


def generate_kb(
    n_persons: int = 200,
    n_places: int = 40,
    n_org_fragments: int = 20,
    orgs_per_fragment: int = 3,
    seed: int = 0,
    edges_per_person: int = 4,
    max_triples: Optional[int] = None,
) -> SyntheticKb:
    """Persons with shared first names, single-word places, and groups of
    organisations sharing a leading name fragment ("Quellmark Press",
    "Quellmark Records", ...)."""
    rng = random.Random(seed)
    first_names = _vocabulary(rng, max(4, n_persons // 8), (2, 2))
    surnames = _vocabulary(rng, n_persons, (2, 3), taken=[w.lower() for w in first_names])
    used = {w.lower() for w in first_names + surnames}
    place_names = _vocabulary(rng, n_places, (2, 3), taken=used)
    used |= {w.lower() for w in place_names}
    fragments = _vocabulary(rng, n_org_fragments, (3, 3), taken=used)

    persons = []
    for i in range(n_persons):
        first, last = first_names[i % len(first_names)], surnames[i]
        e = Entity(f"{NS}{first}_{last}", "person", f"{first} {last}", first=first, last=last)
        persons.append(e)
    places = [Entity(NS + p, "place", p) for p in place_names]
    orgs = []
    for frag in fragments:
        for suffix in rng.sample(_ORG_SUFFIXES, orgs_per_fragment):
            orgs.append(Entity(f"{NS}{frag}_{suffix}", "org", f"{frag} {suffix}", fragment=frag))
    # places and organisations first so a truncated KB still describes edge targets
    entities = places + orgs + persons

    acronyms: Dict[str, List[str]] = {}
    for o in orgs:
        acr = "".join(w[0] for w in o.label.split()).upper()
        acronyms.setdefault(acr, []).append(o.label)

    w_places = list(accumulate(1.0 / (i + 1) for i in range(len(places))))
    w_orgs = list(accumulate(1.0 / (i + 1) for i in range(len(orgs))))
    w_persons = list(accumulate(1.0 / (i + 1) for i in range(len(persons))))

    triples: List[Triple] = []

    def add(s, p, o):
        triples.append(Triple(Resource(s), Resource(p), o))

    for e in entities:
        kind_iri = {"person": PERSON, "place": PLACE, "org": ORG}[e.kind]
        add(e.iri, RDF_TYPE, Resource(kind_iri))
        add(e.iri, RDFS_LABEL, Literal(e.label, "en"))
        if e.kind == "person":
            home = _zipf_pick(rng, places, w_places)
            job = _zipf_pick(rng, orgs, w_orgs)
            add(e.iri, RDFS_COMMENT, Literal(f"{e.label} works for {job.label} and lives in {home.label}.", "en"))
            add(e.iri, DBO + "birthPlace", Resource(home.iri))
            add(e.iri, DBO + "employer", Resource(job.iri))
            for _ in range(max(0, edges_per_person - 2)):
                other = _zipf_pick(rng, persons, w_persons)
                if other is not e:
                    add(e.iri, DBO + "associate", Resource(other.iri))
        elif e.kind == "org":
            seat = _zipf_pick(rng, places, w_places)
            add(e.iri, RDFS_COMMENT, Literal(f"{e.label} is based in {seat.label}.", "en"))
            add(e.iri, DBO + "location", Resource(seat.iri))
        else:
            add(e.iri, RDFS_COMMENT, Literal(f"{e.label} is a town.", "en"))
        if max_triples is not None and len(triples) >= max_triples:
            break
    if max_triples is not None:
        triples = triples[:max_triples]
    return SyntheticKb(triples, entities, acronyms)


def scale_kb(n_triples: int = 100_000, seed: int = 0) -> SyntheticKb:
    """A KB of exactly ``n_triples`` triples (roughly seven per person)."""
    n_persons = max(10, n_triples // 7)
    return generate_kb(
        n_persons=n_persons,
        n_places=max(10, n_persons // 20),
        n_org_fragments=max(5, n_persons // 30),
        seed=seed,
        max_triples=n_triples,
    )


class _Builder:
    def __init__(self):
        self.parts: List[str] = []
        self.length = 0
        self.gold: List[GoldMention] = []

    def word(self, text: str) -> None:
        if self.parts:
            self.parts.append(" ")
            self.length += 1
        self.parts.append(text)
        self.length += len(text)

    def mention(self, text: str, iri: Optional[str]) -> None:
        if self.parts:
            self.parts.append(" ")
            self.length += 1
        self.gold.append(GoldMention(self.length, self.length + len(text), iri))
        self.parts.append(text)
        self.length += len(text)

    def build(self) -> GoldDocument:
        return GoldDocument("".join(self.parts), tuple(self.gold))


def _entities_in_kb(kb: SyntheticKb) -> List[Entity]:
    """Entities whose label actually made it into the (possibly truncated) triples."""
    labelled = {str(t.subject) for t in kb.triples if t.predicate == RDFS_LABEL}
    return [e for e in kb.entities if e.iri in labelled]


def synthetic_documents(kb: SyntheticKb, n_docs: int = 100, seed: int = 1, max_mentions: int = 5) -> GoldDataset:
    """Newswire-like documents: full names, places, organisations and
    first-name-only repeats of people already named in the document."""
    rng = random.Random(seed)
    pool = _entities_in_kb(kb)
    docs = []
    for _ in range(n_docs):
        b = _Builder()
        b.word(rng.choice(_OPENERS))
        named = []
        for j in range(rng.randint(1, max_mentions)):
            if j:
                b.word(rng.choice(_FILLERS))
            e = rng.choice(pool)
            b.mention(e.label, e.iri)
            if e.kind == "person":
                named.append(e)
        if named and rng.random() < 0.5:
            b.word("and later")
            e = rng.choice(named)
            b.mention(e.first, e.iri)
        b.word("today.")
        docs.append(b.build())
    return GoldDataset("synthetic-news", "en", docs)


def low_density_dataset(
    kb: SyntheticKb, n_docs: int = 500, seed: int = 2, emerging_rate: float = 0.5
) -> GoldDataset:
    """Micropost-like documents with 1.8 mentions each on average.

    Mention kinds: a person's full name, a place, or a bare organisation
    name fragment. A bare fragment names a KB organisation or, with
    probability ``emerging_rate``, an emerging entity outside the KB that
    happens to share the fragment (gold EMERGENT).
    """
    rng = random.Random(seed)
    pool = _entities_in_kb(kb)
    persons = [e for e in pool if e.kind == "person"]
    places = [e for e in pool if e.kind == "place"]
    orgs = [e for e in pool if e.kind == "org"]
    docs = []
    for _ in range(n_docs):
        count = rng.choices([1, 2, 3], weights=[35, 50, 15], k=1)[0]
        b = _Builder()
        b.word(rng.choice(_OPENERS))
        for j in range(count):
            if j:
                b.word(rng.choice(_FILLERS))
            kind = rng.choices(["person", "place", "fragment"], weights=[40, 20, 40], k=1)[0]
            if kind == "person":
                e = rng.choice(persons)
                b.mention(e.label, e.iri)
            elif kind == "place":
                e = rng.choice(places)
                b.mention(e.label, e.iri)
            else:
                e = rng.choice(orgs)
                b.mention(e.fragment, None if rng.random() < emerging_rate else e.iri)
        b.word("#live")
        docs.append(b.build())
    return GoldDataset("synthetic-microposts", "en", docs)
