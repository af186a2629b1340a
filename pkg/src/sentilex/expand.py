"""Threshold split of the core and synonym/antonym expansion of the polar sets."""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass
from typing import IO, Iterable, NamedTuple, Sequence, Union

from sentilex.core import CoreSynset
from sentilex.ingest import DictionaryEntry, clean_field, entry_gloss
from sentilex.lexicon import Label, PosTag, canonical_term

SPLIT_THRESHOLD = 0.3

Key = tuple[str, PosTag]


class Member(NamedTuple):
    term: str
    pos_tag: PosTag
    gloss: str
    origin: str = "core"  # core | synonym | antonym
    hop: int = 0

    @property
    def key(self) -> Key:
        return (canonical_term(self.term), self.pos_tag)


class Conflict(NamedTuple):
    term: str
    pos_tag: PosTag
    hop: int


@dataclass(frozen=True)
class TrainingSets:
    tr_pos: tuple[Member, ...] = ()
    tr_neg: tuple[Member, ...] = ()
    tr_neu: tuple[Member, ...] = ()
    conflicts: tuple[Conflict, ...] = ()

    def __post_init__(self) -> None:
        keys = [m.key for m in (*self.tr_pos, *self.tr_neg, *self.tr_neu)]
        if len(set(keys)) != len(keys):
            raise ValueError("training sets overlap or contain duplicates")
        for m in (*self.tr_pos, *self.tr_neg, *self.tr_neu):
            if not m.gloss.strip():
                raise ValueError(f"training member {m.term!r} has an empty gloss")

    def keys(self, label: Label) -> set[Key]:
        return {m.key for m in self.members(label)}

    def members(self, label: Label) -> tuple[Member, ...]:
        return {Label.POSITIVE: self.tr_pos, Label.NEGATIVE: self.tr_neg, Label.NEUTRAL: self.tr_neu}[label]

    def sizes(self) -> dict[str, int]:
        return {"pos": len(self.tr_pos), "neg": len(self.tr_neg), "neu": len(self.tr_neu)}


def split_core(core: Iterable[CoreSynset], threshold: float = SPLIT_THRESHOLD) -> TrainingSets:
    """Route each core synset by which score is strictly above ``threshold``.

    When both are, the larger score decides and an exact tie goes neutral.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    out: dict[Label, list[Member]] = {label: [] for label in Label}
    for c in core:
        pos, neg = c.scores.pos, c.scores.neg
        if pos > threshold and (neg <= threshold or pos > neg):
            label = Label.POSITIVE
        elif neg > threshold and (pos <= threshold or neg > pos):
            label = Label.NEGATIVE
        else:
            label = Label.NEUTRAL
        out[label].append(Member(c.term, c.pos_tag, c.gloss))
    return TrainingSets(tuple(out[Label.POSITIVE]), tuple(out[Label.NEGATIVE]), tuple(out[Label.NEUTRAL]))


def link_graph(dictionary: Sequence[DictionaryEntry]) -> tuple[dict[Key, set[Key]], dict[Key, set[Key]]]:
    """Undirected synonym and antonym adjacency over dictionary headwords.

    A link names a term only. It resolves to the headword with the linking
    entry's POS when that exists, otherwise to every POS of the term.
    Links to terms missing from the dictionary are dropped.
    """
    by_term: dict[str, list[Key]] = defaultdict(list)
    for e in dictionary:
        by_term[canonical_term(e.term)].append((canonical_term(e.term), e.pos_tag))

    def resolve(term: str, pos_tag: PosTag) -> list[Key]:
        term = canonical_term(term)
        if (term, pos_tag) in by_term.get(term, ()):
            return [(term, pos_tag)]
        return by_term.get(term, [])

    syn: dict[Key, set[Key]] = defaultdict(set)
    ant: dict[Key, set[Key]] = defaultdict(set)
    for e in dictionary:
        src = (canonical_term(e.term), e.pos_tag)
        for words, adj in ((e.synonyms, syn), (e.antonyms, ant)):
            for word in words:
                for dst in resolve(word, e.pos_tag):
                    if dst != src:
                        adj[src].add(dst)
                        adj[dst].add(src)
    return syn, ant


def expand(sets: TrainingSets, dictionary: Sequence[DictionaryEntry], radius: int = 1) -> TrainingSets:
    """Grow the positive and negative sets through dictionary links.

    Per hop, an entry outside every set joins the positive set when it is a
    synonym of a positive member or an antonym of a negative one, and the
    negative set symmetrically. Each hop only looks at membership from the
    previous hop, so entry order does not matter. An entry pulled towards
    both polarities in the same hop is recorded as a conflict and never
    added. The neutral set is not expanded.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    entries = {(canonical_term(e.term), e.pos_tag): e for e in dictionary}
    syn, ant = link_graph(dictionary)

    pos = list(sets.tr_pos)
    neg = list(sets.tr_neg)
    conflicts = list(sets.conflicts)
    pos_keys = {m.key for m in pos}
    neg_keys = {m.key for m in neg}
    blocked = pos_keys | neg_keys | sets.keys(Label.NEUTRAL) | {(canonical_term(c.term), c.pos_tag) for c in conflicts}

    for hop in range(1, radius + 1):
        joins: list[tuple[Key, Label, str]] = []
        for key in sorted(entries.keys() - blocked):
            pos_via = "synonym" if syn[key] & pos_keys else "antonym" if ant[key] & neg_keys else None
            neg_via = "synonym" if syn[key] & neg_keys else "antonym" if ant[key] & pos_keys else None
            if pos_via and neg_via:
                conflicts.append(Conflict(entries[key].term, key[1], hop))
                blocked.add(key)
            elif pos_via:
                joins.append((key, Label.POSITIVE, pos_via))
            elif neg_via:
                joins.append((key, Label.NEGATIVE, neg_via))
        if not joins:
            break
        for key, label, via in joins:
            entry = entries[key]
            member = Member(entry.term, entry.pos_tag, entry_gloss(entry), via, hop)
            (pos if label is Label.POSITIVE else neg).append(member)
            (pos_keys if label is Label.POSITIVE else neg_keys).add(key)
            blocked.add(key)
    return TrainingSets(tuple(pos), tuple(neg), sets.tr_neu, tuple(conflicts))


# --- audit and handoff files --------------------------------------------------

Sink = Union[str, "os.PathLike[str]", IO[str]]

_SET_NAMES = {Label.POSITIVE: "pos", Label.NEGATIVE: "neg", Label.NEUTRAL: "neu"}


def _write(sink: Sink, text: str) -> None:
    if hasattr(sink, "write"):
        sink.write(text)  # type: ignore[union-attr]
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def write_audit(sets: TrainingSets, sink: Sink) -> None:
    """``term<tab>set<tab>origin<tab>hop``; conflicts appear with set ``conflict``."""
    lines = []
    for label in Label:
        for m in sets.members(label):
            lines.append(f"{m.term}\t{_SET_NAMES[label]}\t{m.origin}\t{m.hop}\n")
    for c in sets.conflicts:
        lines.append(f"{c.term}\tconflict\t-\t{c.hop}\n")
    _write(sink, "".join(lines))


def write_training(sets: TrainingSets, sink: Sink) -> None:
    """``set<tab>pos_tag<tab>term<tab>gloss`` rows, the classifier training handoff."""
    lines = []
    for label in Label:
        for m in sets.members(label):
            lines.append(f"{label.value}\t{m.pos_tag.value}\t{m.term}\t{clean_field(m.gloss)}\n")
    _write(sink, "".join(lines))


def read_training(path: str | os.PathLike[str]) -> TrainingSets:
    out: dict[Label, list[Member]] = {label: [] for label in Label}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.rstrip("\n")
            if not raw or raw.startswith("#"):
                continue
            fields = raw.split("\t")
            if len(fields) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 fields, found {len(fields)}")
            label, tag, term, gloss = fields
            out[Label.parse(label)].append(Member(term, PosTag.parse(tag), gloss))
    return TrainingSets(tuple(out[Label.POSITIVE]), tuple(out[Label.NEGATIVE]), tuple(out[Label.NEUTRAL]))
