"""Deterministic part-of-speech tagging and adjective-noun phrase extraction.

The tagger only needs to separate adjectives and nouns from everything
else. Lookup order per token: lexicon, adjective suffix rules, then NOUN.
A capitalized token next to another capitalized token is treated as part
of a name and tagged NOUN before the suffix rules run, so "Jordan" in
"Michael Jordan" is not read as a demonym.
"""
from __future__ import annotations

import functools
import re
from importlib import resources
from typing import Dict, List, Mapping, Optional, Protocol, Sequence, Set, Tuple

ADJ = "ADJ"
NOUN = "NOUN"

_TOKEN = re.compile(r"\w+(?:['’-]\w+)*")

ADJ_SUFFIXES = ("ible", "able", "less", "ous", "ful", "ish", "ese", "ern", "ive", "an", "ic", "al")
MIN_SUFFIX_WORD = 5


class Tagger(Protocol):
    def tag(self, tokens: Sequence[str]) -> List[str]: ...


@functools.lru_cache(maxsize=None)
def load_lexicon(language: str) -> Dict[str, str]:
    path = resources.files("kblink").joinpath("data", "lexicon", f"{language}.tsv")
    if not path.is_file():
        return {}
    lexicon = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        word, _, tag = line.partition("\t")
        lexicon[word.strip().lower()] = tag.strip()
    return lexicon


class RuleTagger:
    def __init__(self, lexicon: Optional[Mapping[str, str]] = None, language: str = "en"):
        self.lexicon = dict(load_lexicon(language) if lexicon is None else lexicon)

    def tag(self, tokens: Sequence[str]) -> List[str]:
        tags = []
        for i, tok in enumerate(tokens):
            known = self.lexicon.get(tok.lower())
            if known is not None:
                tags.append(known)
                continue
            if tok[:1].isupper() and (
                (i > 0 and tokens[i - 1][:1].isupper() and tokens[i - 1].lower() not in self.lexicon)
                or (i + 1 < len(tokens) and tokens[i + 1][:1].isupper())
            ):
                tags.append(NOUN)
                continue
            low = tok.lower()
            if len(low) >= MIN_SUFFIX_WORD and low.endswith(ADJ_SUFFIXES):
                tags.append(ADJ)
            else:
                tags.append(NOUN)
        return tags


def first_sentence(text: str) -> str:
    """Text up to the first ". " or line break, whichever comes first."""
    cut = len(text)
    for sep in (". ", "\n"):
        idx = text.find(sep)
        if idx != -1:
            cut = min(cut, idx)
    return text[:cut]


def adjective_noun_spans(tags: Sequence[str]) -> List[Tuple[int, int]]:
    """Maximal [start, end] token ranges matching ADJ (ADJ|NOUN)* NOUN."""
    spans = []
    i = 0
    n = len(tags)
    while i < n:
        if tags[i] != ADJ:
            i += 1
            continue
        j = i + 1
        last_noun = -1
        while j < n and tags[j] in (ADJ, NOUN):
            if tags[j] == NOUN:
                last_noun = j
            j += 1
        if last_noun == -1:
            i = j
            continue
        spans.append((i, last_noun))
        i = last_noun + 1
    return spans


def extract_rare_references(description: str, tagger: Optional[Tagger] = None) -> Set[str]:
    """Adjective-bearing noun phrases from the first sentence, verbatim."""
    sentence = first_sentence(description)
    matches = list(_TOKEN.finditer(sentence))
    if not matches:
        return set()
    tagger = tagger or _default_tagger()
    tags = tagger.tag([m.group(0) for m in matches])
    return {
        sentence[matches[a].start() : matches[b].end()]
        for a, b in adjective_noun_spans(tags)
    }


@functools.lru_cache(maxsize=None)
def _default_tagger() -> RuleTagger:
    return RuleTagger()
