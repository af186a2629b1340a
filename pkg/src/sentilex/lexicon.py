"""Synsets, polarity scores and the six-field SentiWordNet TSV format.

A lexicon line is::

    POS<tab>ID<tab>PosScore<tab>NegScore<tab>Terms<tab>Gloss

Terms are space separated; multi-syllable compounds are stored with
underscores (``phong_cảnh``) so the term field stays unambiguous.
"""

from __future__ import annotations

import enum
import math
import os
import unicodedata
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Union

PathOrStream = Union[str, "os.PathLike[str]", IO[str]]

SCORE_DECIMALS = 3
_SUM_SLACK = 1e-9


class PosTag(str, enum.Enum):
    ADJECTIVE = "a"
    VERB = "v"
    NOUN = "n"
    ADVERB = "r"

    @classmethod
    def parse(cls, value: str) -> "PosTag":
        key = value.strip().lower()
        for tag in cls:
            if key == tag.value or key == tag.name.lower():
                return tag
        raise ValueError(f"unknown POS tag {value!r}")


class Label(str, enum.Enum):
    POSITIVE = "pos"
    NEGATIVE = "neg"
    NEUTRAL = "neu"

    @classmethod
    def parse(cls, value: str) -> "Label":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(f"unknown label {value!r} (expected pos, neg or neu)") from None


@dataclass(frozen=True)
class PolarityScores:
    pos: float
    neg: float

    def __post_init__(self) -> None:
        for name in ("pos", "neg"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{name} score must be a finite number, got {value!r}")
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} score {value} outside [0, 1]")
        if self.pos + self.neg > 1.0 + _SUM_SLACK:
            raise ValueError(f"pos + neg = {self.pos + self.neg} exceeds 1")

    @property
    def neu(self) -> float:
        return neutrality(self)


def neutrality(scores: PolarityScores) -> float:
    """Objectivity left over once positivity and negativity are accounted for."""
    return max(0.0, 1.0 - (scores.pos + scores.neg))


def canonical_term(term: str) -> str:
    """NFC-normalize a lemma and join its syllables with underscores."""
    return "_".join(unicodedata.normalize("NFC", term).split())


@dataclass(frozen=True)
class Synset:
    pos_tag: PosTag
    id: str
    scores: PolarityScores
    terms: tuple[str, ...]
    gloss: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "pos_tag", PosTag.parse(self.pos_tag))
        object.__setattr__(self, "terms", tuple(unicodedata.normalize("NFC", t) for t in self.terms))
        object.__setattr__(self, "gloss", unicodedata.normalize("NFC", self.gloss))
        if not self.id or self.id != self.id.strip() or any(c.isspace() for c in self.id):
            raise ValueError(f"invalid synset id {self.id!r}")
        if not self.terms:
            raise ValueError(f"synset {self.id} has no terms")
        for term in self.terms:
            if not term or any(c.isspace() for c in term):
                raise ValueError(f"synset {self.id}: invalid term {term!r}")
        if "\t" in self.gloss or "\n" in self.gloss or "\r" in self.gloss:
            raise ValueError(f"synset {self.id}: gloss contains a tab or newline")


class SentiLexicon:
    """Immutable collection of synsets keyed and ordered by id."""

    __slots__ = ("_by_id",)

    def __init__(self, synsets: Iterable[Synset] = ()) -> None:
        by_id: dict[str, Synset] = {}
        for synset in synsets:
            if synset.id in by_id:
                raise ValueError(f"duplicate synset id {synset.id!r}")
            by_id[synset.id] = synset
        self._by_id = {key: by_id[key] for key in sorted(by_id)}

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self) -> Iterator[Synset]:
        return iter(self._by_id.values())

    def __getitem__(self, synset_id: str) -> Synset:
        return self._by_id[synset_id]

    def __contains__(self, synset_id: object) -> bool:
        return synset_id in self._by_id

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SentiLexicon):
            return NotImplemented
        return list(self) == list(other)

    def __repr__(self) -> str:
        return f"SentiLexicon({len(self)} synsets)"

    @property
    def ids(self) -> list[str]:
        return list(self._by_id)


class LexiconFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None) -> None:
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


def _format_scores(scores: PolarityScores) -> tuple[str, str]:
    pos = round(scores.pos, SCORE_DECIMALS)
    neg = round(scores.neg, SCORE_DECIMALS)
    # independent rounding may push the sum past 1
    neg = min(neg, round(1.0 - pos, SCORE_DECIMALS))
    return f"{pos:.{SCORE_DECIMALS}f}", f"{neg:.{SCORE_DECIMALS}f}"


def format_line(synset: Synset) -> str:
    pos, neg = _format_scores(synset.scores)
    return "\t".join(
        [synset.pos_tag.value, synset.id, pos, neg, " ".join(synset.terms), synset.gloss]
    )


def dumps(lex: SentiLexicon) -> str:
    return "".join(format_line(s) + "\n" for s in lex)


def write_lexicon(lex: SentiLexicon, sink: PathOrStream) -> None:
    text = dumps(lex)
    if hasattr(sink, "write"):
        sink.write(text)  # type: ignore[union-attr]
        return
    with open(sink, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def loads(text: str, source: str | None = None) -> SentiLexicon:
    synsets: list[Synset] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        if not raw.strip() or raw.startswith("#"):
            continue
        fields = raw.split("\t")
        if len(fields) != 6:
            raise LexiconFormatError(f"expected 6 tab-separated fields, found {len(fields)}", lineno, source)
        tag, synset_id, pos_text, neg_text, terms_text, gloss = fields
        try:
            pos, neg = float(pos_text), float(neg_text)
        except ValueError:
            raise LexiconFormatError(f"non-numeric score in {pos_text!r}/{neg_text!r}", lineno, source) from None
        for name, value in (("PosScore", pos), ("NegScore", neg)):
            if not math.isfinite(value) or not 0.0 <= value <= 1.0:
                raise LexiconFormatError(f"{name} {value} outside [0, 1]", lineno, source)
        if pos + neg > 1.0 + _SUM_SLACK:
            raise LexiconFormatError(f"PosScore + NegScore = {pos + neg:g} exceeds 1", lineno, source)
        if synset_id in seen:
            raise LexiconFormatError(f"duplicate synset id {synset_id!r}", lineno, source)
        seen.add(synset_id)
        try:
            synsets.append(
                Synset(
                    pos_tag=PosTag.parse(tag),
                    id=synset_id,
                    scores=PolarityScores(pos, neg),
                    terms=tuple(terms_text.split(" ")),
                    gloss=gloss,
                )
            )
        except ValueError as exc:
            raise LexiconFormatError(str(exc), lineno, source) from None
    return SentiLexicon(synsets)


def read_lexicon(source: PathOrStream) -> SentiLexicon:
    """Parse a six-field lexicon TSV; errors carry the offending line number."""
    if hasattr(source, "read"):
        return loads(source.read(), getattr(source, "name", None))  # type: ignore[union-attr]
    with open(source, encoding="utf-8", newline="") as fh:
        return loads(fh.read(), os.fspath(source))

