"""Loaders for the dictionary XML, labeled corpus, seed mapping and gold list.

All text is NFC-normalized on the way in so that Vietnamese diacritics with
several possible encodings compare equal.
"""

from __future__ import annotations

import logging
import math
import os
import unicodedata
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import IO, Iterator, Union

from sentilex.lexicon import Label, PosTag

log = logging.getLogger(__name__)

Source = Union[str, "os.PathLike[str]", IO[str]]


class IngestError(ValueError):
    """Input file could not be parsed; message names the source and line/entry."""

    def __init__(self, message: str, source: str | None = None, line: int | None = None) -> None:
        self.source = source
        self.line = line
        where = ":".join(str(p) for p in (source, line) if p is not None)
        super().__init__(f"{where}: {message}" if where else message)


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class DictionaryEntry:
    term: str
    pos_tag: PosTag
    definition: str
    synonyms: tuple[str, ...] = ()
    antonyms: tuple[str, ...] = ()
    examples: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.term.strip():
            raise ValueError("dictionary entry has an empty term")
        if not self.definition.strip():
            raise ValueError(f"entry {self.term!r} has an empty definition")
        if self.term in self.synonyms or self.term in self.antonyms:
            raise ValueError(f"entry {self.term!r} links to itself")

    @property
    def key(self) -> tuple[str, PosTag]:
        return (self.term, self.pos_tag)


def entry_gloss(entry: DictionaryEntry) -> str:
    """Definition followed by the first usage example, if there is one."""
    parts = [entry.definition]
    if entry.examples:
        parts.append(entry.examples[0])
    return clean_field("; ".join(parts))


def clean_field(text: str) -> str:
    """Collapse whitespace so text can live inside a single TSV field."""
    return " ".join(text.split())


@dataclass(frozen=True)
class AnnotatedSentence:
    text: str
    label: Label

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("sentence text is empty")


@dataclass(frozen=True)
class SeedRecord:
    source_id: str
    term: str
    pos: float
    neg: float
    pos_tag: PosTag

    def __post_init__(self) -> None:
        for name in ("pos", "neg"):
            value = getattr(self, name)
            if not math.isfinite(value) or not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} score {value} outside [0, 1]")
        if self.pos + self.neg > 1.0 + 1e-9:
            raise ValueError(f"pos + neg = {self.pos + self.neg:g} exceeds 1")


@dataclass(frozen=True)
class GoldRanking:
    """Reference values per aspect, each list sorted by descending value."""

    positivity: tuple[tuple[str, float], ...]
    negativity: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        for name in ("positivity", "negativity"):
            entries = getattr(self, name)
            terms = [t for t, _ in entries]
            if len(set(terms)) != len(terms):
                raise ValueError(f"{name} ranking has duplicate terms")
            if list(entries) != sorted(entries, key=_rank_key):
                raise ValueError(f"{name} ranking is not sorted by descending value")

    @classmethod
    def from_values(cls, rows: dict[str, tuple[float, float]]) -> "GoldRanking":
        pos = sorted(((t, v[0]) for t, v in rows.items()), key=_rank_key)
        neg = sorted(((t, v[1]) for t, v in rows.items()), key=_rank_key)
        return cls(tuple(pos), tuple(neg))

    def aspect(self, name: str) -> tuple[tuple[str, float], ...]:
        return getattr(self, name)


def _rank_key(item: tuple[str, float]) -> tuple[float, str]:
    return (-item[1], item[0])


def _open_text(source: Source) -> tuple[str, str]:
    if hasattr(source, "read"):
        return source.read(), getattr(source, "name", "<stream>")  # type: ignore[union-attr]
    with open(source, encoding="utf-8") as fh:
        return fh.read(), os.fspath(source)


def _tsv_rows(text: str, width: int, name: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        fields = [nfc(f).strip() for f in raw.split("\t")]
        if len(fields) != width:
            raise IngestError(f"expected {width} tab-separated fields, found {len(fields)}", name, lineno)
        yield lineno, fields


# --- dictionary -----------------------------------------------------------


def _text(elem: ET.Element | None) -> str:
    if elem is None:
        return ""
    return clean_field(nfc("".join(elem.itertext())))


def _word_list(parent: ET.Element | None, child: str) -> list[str]:
    if parent is None:
        return []
    out: list[str] = []
    for node in parent.findall(child):
        word = _text(node)
        if word and word not in out:
            out.append(word)
    return out


def parse_dictionary(source: Source, strict: bool = True) -> list[DictionaryEntry]:
    """Parse ``<dictionary><entry>...</entry></dictionary>`` XML.

    Each entry carries ``<term>``, ``<pos>``, ``<definition>`` and optional
    ``<synonyms><w>``, ``<antonyms><w>`` and ``<examples><ex>`` lists.
    Self links are dropped with a warning. An entry lacking a term or a
    definition, with an unknown POS, or repeating an earlier (term, POS)
    headword raises :class:`IngestError` naming its 1-based index; with
    ``strict=False`` it is skipped with a warning instead.
    """
    text, name = _open_text(source)
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise IngestError(f"malformed XML: {exc}", name) from None
    if root.tag != "dictionary":
        raise IngestError(f"root element must be <dictionary>, found <{root.tag}>", name)

    entries: list[DictionaryEntry] = []
    seen: set[tuple[str, PosTag]] = set()
    for index, node in enumerate(root.findall("entry"), start=1):
        try:
            entry = _parse_entry(node, index)
            if entry.key in seen:
                raise ValueError(f"repeats headword {entry.term!r} ({entry.pos_tag.value})")
        except ValueError as exc:
            msg = f"entry #{index}: {exc}"
            if strict:
                raise IngestError(msg, name) from None
            warnings.warn(f"{name}: skipping {msg}", stacklevel=2)
            continue
        seen.add(entry.key)
        entries.append(entry)
    log.info("parsed %d dictionary entries from %s", len(entries), name)
    return entries


def _parse_entry(node: ET.Element, index: int) -> DictionaryEntry:
    term = _text(node.find("term"))
    definition = _text(node.find("definition"))
    if not term:
        raise ValueError("missing <term>")
    if not definition:
        raise ValueError(f"{term!r} is missing <definition>")
    pos_tag = PosTag.parse(_text(node.find("pos")) or "n")
    links = {}
    for kind in ("synonyms", "antonyms"):
        words = _word_list(node.find(kind), "w")
        if term in words:
            warnings.warn(f"entry #{index} ({term!r}) lists itself under {kind}; link dropped", stacklevel=3)
            words.remove(term)
        links[kind] = tuple(words)
    examples = tuple(_word_list(node.find("examples"), "ex"))
    return DictionaryEntry(
        term=term,
        pos_tag=pos_tag,
        definition=definition,
        synonyms=links["synonyms"],
        antonyms=links["antonyms"],
        examples=examples,
    )


# --- TSV inputs -------------------------------------------------------------


def load_corpus(source: Source) -> list[AnnotatedSentence]:
    """Read ``label<tab>sentence`` lines, label being pos, neg or neu."""
    text, name = _open_text(source)
    out = []
    for lineno, (label, sentence) in _tsv_rows(text, 2, name):
        try:
            out.append(AnnotatedSentence(sentence, Label.parse(label)))
        except ValueError as exc:
            raise IngestError(str(exc), name, lineno) from None
    return out


def load_seed_mapping(source: Source) -> list[SeedRecord]:
    """Read ``source_id<tab>pos_tag<tab>pos<tab>neg<tab>term`` rows."""
    text, name = _open_text(source)
    out = []
    for lineno, (source_id, tag, pos, neg, term) in _tsv_rows(text, 5, name):
        try:
            out.append(SeedRecord(source_id, clean_field(term), float(pos), float(neg), PosTag.parse(tag)))
        except ValueError as exc:
            raise IngestError(str(exc), name, lineno) from None
        if not out[-1].term:
            raise IngestError("empty term", name, lineno)
    return out


def load_gold_standard(source: Source) -> GoldRanking:
    """Read ``term<tab>pos_value<tab>neg_value`` rows into two rankings.

    Ties in value are ordered lexicographically by term.
    """
    text, name = _open_text(source)
    rows: dict[str, tuple[float, float]] = {}
    for lineno, (term, pos, neg) in _tsv_rows(text, 3, name):
        term = clean_field(term)
        if term in rows:
            raise IngestError(f"duplicate term {term!r}", name, lineno)
        try:
            values = (float(pos), float(neg))
        except ValueError:
            raise IngestError(f"non-numeric value in {pos!r}/{neg!r}", name, lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise IngestError("non-finite value", name, lineno)
        rows[term] = values
    return GoldRanking.from_values(rows)
