"""String handling shared by indexing and linking."""
from __future__ import annotations

import functools
import re
import unicodedata
import warnings
from collections import Counter
from importlib import resources
from typing import FrozenSet, Iterable, List, Tuple

# Boundary padding for character trigrams. NUL never occurs in labels.
SENTINEL = "\x00"

_WORD = re.compile(r"\w+")
_DIGITS = re.compile(r"[0-9]+")


class UnsupportedLanguageWarning(UserWarning):
    pass


def is_acronym(text: str) -> bool:
    return 2 <= len(text) <= 5 and all(c.isalpha() and c.isupper() for c in text)


def is_numeric(text: str) -> bool:
    return _DIGITS.fullmatch(text) is not None


def _recase(tokens: Iterable[str]) -> str:
    return " ".join(t[:1].upper() + t[1:].lower() for t in tokens)


def normalize(text: str) -> str:
    """Split camel case, drop punctuation/symbols, collapse spaces, title-case tokens.

    >>> normalize("NEW YORK")
    'New York'
    >>> normalize("AmyWinehouse")
    'Amy Winehouse'
    """
    out = []
    prev = ""
    for ch in text:
        if prev.islower() and ch.isupper():
            out.append(" ")
        out.append(" " if unicodedata.category(ch)[0] in "PS" else ch)
        prev = ch
    return _recase("".join(out).split())


def surface_key(text: str) -> str:
    """Lookup key for surfaces and mentions; acronyms are kept verbatim."""
    text = text.strip()
    if is_acronym(text):
        return text
    return normalize(text)


def trigram_set(text: str) -> FrozenSet[str]:
    if not text:
        return frozenset()
    padded = SENTINEL * 2 + text.lower() + SENTINEL * 2
    return frozenset(padded[i : i + 3] for i in range(len(padded) - 2))


def jaccard(a: FrozenSet[str], b: FrozenSet[str]) -> float:
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    inter = len(a & b)
    return inter / (len(a) + len(b) - inter)


def trigram_similarity(a: str, b: str) -> float:
    return jaccard(trigram_set(a), trigram_set(b))


def word_tokens(text: str) -> List[str]:
    """Lowercased Unicode word tokens."""
    return _WORD.findall(text.lower())


def bag_of_words(texts: Iterable[str], stopwords: FrozenSet[str] = frozenset()) -> Counter:
    bag: Counter = Counter()
    for text in texts:
        bag.update(t for t in word_tokens(text) if t not in stopwords)
    return bag


def _data_lines(*parts: str) -> List[str]:
    path = resources.files("kblink").joinpath("data", *parts)
    if not path.is_file():
        raise FileNotFoundError(str(path))
    lines = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.rstrip("\n")
        if line.strip() and not line.startswith("#"):
            lines.append(line)
    return lines


@functools.lru_cache(maxsize=None)
def load_stopwords(language: str) -> FrozenSet[str]:
    try:
        return frozenset(w.strip().lower() for w in _data_lines("stopwords", f"{language}.txt"))
    except FileNotFoundError:
        return frozenset()


def read_stopword_file(path) -> FrozenSet[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(w.strip().lower() for w in fh if w.strip() and not w.startswith("#"))


@functools.lru_cache(maxsize=None)
def load_suffix_table(language: str) -> Tuple[Tuple[str, str], ...]:
    """Suffix rules as (suffix, replacement), longest suffix first."""
    rules = []
    for line in _data_lines("suffixes", f"{language}.txt"):
        suffix, _, repl = line.partition("\t")
        rules.append((suffix.strip().lower(), repl.strip().lower()))
    return tuple(sorted(rules, key=lambda r: (-len(r[0]), r[0])))


MIN_STEM = 3


def stem_token(token: str, rules: Tuple[Tuple[str, str], ...]) -> str:
    low = token.lower()
    for suffix, repl in rules:
        if low.endswith(suffix) and len(low) - len(suffix) >= MIN_STEM:
            return low[: len(low) - len(suffix)] + repl
    return low


def stem_mention(text: str, language: str = "en") -> str:
    """Per-token suffix stripping from the shipped table, re-cased like ``normalize``.

    Languages without a table get the text back unchanged and an
    :class:`UnsupportedLanguageWarning`.
    """
    try:
        rules = load_suffix_table(language)
    except FileNotFoundError:
        warnings.warn(f"no suffix table for language {language!r}", UnsupportedLanguageWarning, stacklevel=2)
        return text
    return _recase(stem_token(t, rules) for t in normalize(text).split())

