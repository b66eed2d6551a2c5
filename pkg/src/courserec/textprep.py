"""Catalog description preprocessing.

Pipeline: strip boilerplate sentences, lowercase, strip punctuation,
drop stopwords, stem. Stemming is the classic Porter suffix-stripping
algorithm (1980 rule set), so no external linguistic resources are needed.
"""

from __future__ import annotations

import re
import string
from typing import Iterable, Sequence

__all__ = ["porter_stem", "preprocess_description", "split_sentences"]

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")
_PUNCT_TABLE = str.maketrans({ch: " " for ch in string.punctuation})
_WS = re.compile(r"\s+")


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_SPLIT.split(text) if s.strip()]


def _normalize_sentence(sentence: str) -> str:
    # Exact-match key for boilerplate comparison: case, surrounding space and
    # terminal punctuation do not count as differences.
    return _WS.sub(" ", sentence.strip().strip(".!?").strip().lower())


def preprocess_description(
    text: str,
    boilerplate: Sequence[str] = (),
    stopwords: Iterable[str] = (),
) -> list[str]:
    """Turn a catalog description into unigram tokens, in original order.

    Sentences exactly matching a boilerplate pattern are removed first;
    remaining text is lowercased, punctuation-stripped, stopword-filtered
    and Porter-stemmed.
    """
    if not text:
        return []
    boiler_keys = {_normalize_sentence(b) for b in boilerplate}
    kept = [
        s for s in split_sentences(text) if _normalize_sentence(s) not in boiler_keys
    ]
    stop = {w.lower() for w in stopwords}
    tokens = []
    for sentence in kept:
        for raw in sentence.lower().translate(_PUNCT_TABLE).split():
            if raw in stop:
                continue
            tokens.append(porter_stem(raw))
    return tokens


# --- Porter stemmer -----------------------------------------------------------

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel-consonant sequences: [C](VC)^m[V]."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_consonant(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    # *o: consonant-vowel-consonant where the final consonant is not w, x or y.
    if len(word) < 3:
        return False
    return (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


# (suffix, replacement, minimum measure of the remaining stem); within a step
# the first suffix that matches consumes the word whether or not the measure
# condition lets the replacement fire.
_STEP2 = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
)
_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)
_STEP4 = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)


def _apply_rules(word: str, rules, min_measure: int) -> str:
    for suffix, repl in rules:
        if word.endswith(suffix):
            stem = word[: -len(suffix)]
            if _measure(stem) > min_measure:
                return stem + repl
            return word
    return word


def porter_stem(word: str) -> str:
    """Classic Porter stemmer; words of length <= 2 are returned unchanged."""
    if len(word) <= 2:
        return word

    # Step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif not word.endswith("ss") and word.endswith("s"):
        word = word[:-1]

    # Step 1b
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    else:
        stripped = None
        if word.endswith("ed") and _has_vowel(word[:-2]):
            stripped = word[:-2]
        elif word.endswith("ing") and _has_vowel(word[:-3]):
            stripped = word[:-3]
        if stripped is not None:
            word = stripped
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # Step 1c
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    word = _apply_rules(word, _STEP2, 0)
    word = _apply_rules(word, _STEP3, 0)

    # Step 4: bare deletion at measure > 1; "ion" needs a preceding s or t.
    for suffix in _STEP4:
        if word.endswith(suffix):
            stem = word[: -len(suffix)]
            if _measure(stem) > 1 and (suffix != "ion" or stem.endswith(("s", "t"))):
                word = stem
            break

    # Step 5a
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            word = stem

    # Step 5b
    if _measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]

    return word
