"""Score dictionary entries with both classifiers and turn margins into a lexicon."""

from __future__ import annotations

import enum
import logging
import math
import os
import warnings
from dataclasses import dataclass
from typing import IO, Mapping, NamedTuple, Sequence, Union

from sentilex.ingest import DictionaryEntry, entry_gloss
from sentilex.lexicon import PolarityScores, PosTag, SentiLexicon, Synset, canonical_term
from sentilex.textcat import BinaryClassifier, Tokenizer, vectorize

log = logging.getLogger(__name__)


class MarginPair(NamedTuple):
    phi_p: float
    phi_n: float


class NormalizationMode(str, enum.Enum):
    LINEAR_CLAMP = "linear"
    LOG_RATIO = "log"


@dataclass(frozen=True)
class ScoredEntry:
    entry: DictionaryEntry
    margins: MarginPair
    flagged: bool = False


def score_all(
    entries: Sequence[DictionaryEntry],
    pos_clf: BinaryClassifier,
    neg_clf: BinaryClassifier,
    tokenizer: Tokenizer,
) -> list[ScoredEntry]:
    """Margins from both classifiers for every entry's gloss.

    An entry whose gloss has no token known to a classifier gets that
    classifier's bias and is flagged.
    """
    for clf in (pos_clf, neg_clf):
        if clf.config.tokenizer is not tokenizer.kind:
            raise ValueError(
                f"classifier trained with {clf.config.tokenizer.value} tokens, scoring with {tokenizer.kind.value}"
            )
    token_lists = [tokenizer(entry_gloss(e)) for e in entries]
    columns = []
    for clf in (pos_clf, neg_clf):
        vectors = [vectorize(toks, clf.vocabulary, clf.config.tfidf) for toks in token_lists]
        margins = clf.margins(vectors)
        columns.append([(float(m), False) if v else (clf.bias, True) for m, v in zip(margins, vectors)])
    out = []
    for entry, (phi_p, empty_p), (phi_n, empty_n) in zip(entries, *columns):
        out.append(ScoredEntry(entry, MarginPair(phi_p, phi_n), empty_p or empty_n))
    return out


def normalize(pairs: Sequence[MarginPair], mode: NormalizationMode | str = NormalizationMode.LINEAR_CLAMP) -> list[PolarityScores]:
    """Map margins into [0, 1] using one lexicon-wide normalizer.

    ``M = max(|phi_p| + |phi_n|)`` over all pairs. ``linear`` gives
    ``max(0, phi) / M``, which keeps pos + neg <= 1 and preserves the order
    of positive margins. ``log`` evaluates ``log(phi / M)`` for
    positive margins and clamps to [0, 1]; since ``phi / M <= 1`` this is
    0 everywhere and is kept only for comparison runs.
    """
    mode = NormalizationMode(mode)
    if not pairs:
        raise ValueError("nothing to normalize")
    for p in pairs:
        if not (math.isfinite(p.phi_p) and math.isfinite(p.phi_n)):
            raise ValueError(f"non-finite margin pair {p}")
    m = max(abs(p.phi_p) + abs(p.phi_n) for p in pairs)
    if m == 0:
        warnings.warn("all margins are zero; every score set to 0", stacklevel=2)
        return [PolarityScores(0.0, 0.0) for _ in pairs]

    if mode is NormalizationMode.LINEAR_CLAMP:
        def f(phi: float) -> float:
            return max(0.0, phi) / m
    else:
        def f(phi: float) -> float:
            return min(1.0, max(0.0, math.log(phi / m))) if phi > 0 else 0.0

    out = []
    for p in pairs:
        pos, neg = f(p.phi_p), f(p.phi_n)
        # guard against rounding in the division pushing the sum past 1
        if pos + neg > 1.0:
            neg = 1.0 - pos
        out.append(PolarityScores(pos, neg))
    return out


def assemble_lexicon(
    entries: Sequence[DictionaryEntry],
    scores: Sequence[PolarityScores],
    pinned: Mapping[tuple[str, PosTag], PolarityScores] | None = None,
) -> SentiLexicon:
    """One synset per entry, ids zero-padded in dictionary order from 1.

    ``pinned`` maps (term, POS) to scores that override the computed ones.
    """
    if len(entries) != len(scores):
        raise ValueError("entries and scores differ in length")
    pinned = pinned or {}
    width = max(5, len(str(len(entries))))
    synsets = []
    for i, (entry, s) in enumerate(zip(entries, scores), start=1):
        s = pinned.get((entry.term, entry.pos_tag), s)
        synsets.append(Synset(entry.pos_tag, str(i).zfill(width), s, (canonical_term(entry.term),), entry_gloss(entry)))
    return SentiLexicon(synsets)


def write_diagnostics(scored: Sequence[ScoredEntry], sink: Union[str, "os.PathLike[str]", IO[str]]) -> None:
    """``term<tab>phi_p<tab>phi_n<tab>flag`` with flag ``empty`` or ``ok``."""
    text = "".join(
        f"{canonical_term(s.entry.term)}\t{s.margins.phi_p:.6f}\t{s.margins.phi_n:.6f}\t{'empty' if s.flagged else 'ok'}\n"
        for s in scored
    )
    if hasattr(sink, "write"):
        sink.write(text)  # type: ignore[union-attr]
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
