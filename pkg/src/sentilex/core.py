"""Seed core construction: polarity filter, corpus intersection, score recount."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from sentilex.ingest import AnnotatedSentence, DictionaryEntry, SeedRecord, entry_gloss
from sentilex.lexicon import Label, PolarityScores, PosTag, SentiLexicon, Synset, canonical_term
from sentilex.textcat import Tokenizer, TokenizerKind

log = logging.getLogger(__name__)

SEED_THRESHOLD = 0.4

NO_CORPUS = "no-corpus-occurrence"
NO_DICTIONARY = "no-dictionary-entry"
DUPLICATE = "duplicate-sense"


@dataclass(frozen=True)
class CoreSynset:
    term: str
    pos_tag: PosTag
    scores: PolarityScores
    gloss: str


class Counts(NamedTuple):
    pos: int
    neg: int
    total: int


class ZeroOccurrenceError(ValueError):
    pass


def filter_seed_candidates(records: Iterable[SeedRecord], threshold: float = SEED_THRESHOLD) -> list[SeedRecord]:
    """Keep records whose positive or negative score is strictly above ``threshold``."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    return [r for r in records if r.pos > threshold or r.neg > threshold]


def _match_key(term: str) -> str:
    return "_".join(Tokenizer(TokenizerKind.TOKEN)(term))


def count_occurrences(
    corpus: Sequence[AnnotatedSentence],
    vocabulary: Iterable[str],
    segmentation: Iterable[str] = (),
) -> dict[str, Counts]:
    """Token-level counts per vocabulary term.

    Sentences are segmented with the word-based tokenizer over the union of
    ``vocabulary`` and ``segmentation`` headwords; every matching token
    counts, so a term used twice in a sentence counts twice.
    """
    vocabulary = list(dict.fromkeys(vocabulary))
    tokenizer = Tokenizer.build(TokenizerKind.WORD, [*vocabulary, *segmentation])
    keys = {term: _match_key(term) for term in vocabulary}
    wanted = set(keys.values())
    per_label: dict[Label, Counter[str]] = {label: Counter() for label in Label}
    for sentence in corpus:
        tokens = [t for t in tokenizer(sentence.text) if t in wanted]
        per_label[sentence.label].update(tokens)
    out = {}
    for term, key in keys.items():
        pos = per_label[Label.POSITIVE][key]
        neg = per_label[Label.NEGATIVE][key]
        out[term] = Counts(pos, neg, pos + neg + per_label[Label.NEUTRAL][key])
    return out


def recompute_scores(counts: dict[str, Counts], term: str) -> PolarityScores:
    """Pos = #pos(w) / #(w), Neg = #neg(w) / #(w)."""
    c = counts.get(term, Counts(0, 0, 0))
    if c.total <= 0:
        raise ZeroOccurrenceError(f"{term!r} never occurs in the corpus")
    scores = PolarityScores(c.pos / c.total, c.neg / c.total)
    assert scores.pos + scores.neg <= 1.0
    return scores


def build_core(
    records: Sequence[SeedRecord],
    corpus: Sequence[AnnotatedSentence],
    dictionary: Sequence[DictionaryEntry],
    threshold: float = SEED_THRESHOLD,
) -> tuple[list[CoreSynset], list[tuple[str, str]]]:
    """Return the core synsets and a ``(term, reason)`` skip report.

    Every filtered seed ends up in exactly one of the two lists. A seed is
    kept when its (term, POS) has a dictionary entry and the term occurs in
    the corpus; its scores are recounted from the corpus, never copied.
    """
    filtered = filter_seed_candidates(records, threshold)
    by_key = {(e.term, e.pos_tag): e for e in dictionary}
    counts = count_occurrences(corpus, [r.term for r in filtered], [e.term for e in dictionary])

    core: list[CoreSynset] = []
    skipped: list[tuple[str, str]] = []
    seen: set[tuple[str, PosTag]] = set()
    for record in filtered:
        key = (record.term, record.pos_tag)
        if key in seen:
            skipped.append((record.term, DUPLICATE))
            continue
        seen.add(key)
        entry = by_key.get(key)
        if entry is None:
            skipped.append((record.term, NO_DICTIONARY))
        elif counts[record.term].total == 0:
            skipped.append((record.term, NO_CORPUS))
        else:
            core.append(CoreSynset(record.term, record.pos_tag, recompute_scores(counts, record.term), entry_gloss(entry)))
    log.info("core: %d kept, %d skipped of %d filtered seeds", len(core), len(skipped), len(filtered))
    return core, skipped


def core_to_lexicon(core: Sequence[CoreSynset]) -> SentiLexicon:
    width = max(5, len(str(len(core))))
    return SentiLexicon(
        Synset(c.pos_tag, str(i).zfill(width), c.scores, (canonical_term(c.term),), c.gloss)
        for i, c in enumerate(core, start=1)
    )


def core_from_lexicon(lex: SentiLexicon) -> list[CoreSynset]:
    return [
        CoreSynset(s.terms[0].replace("_", " "), s.pos_tag, s.scores, s.gloss)
        for s in lex
    ]
