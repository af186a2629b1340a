import random
from fractions import Fraction

import pytest

from sentilex.core import (
    DUPLICATE,
    NO_CORPUS,
    NO_DICTIONARY,
    Counts,
    ZeroOccurrenceError,
    build_core,
    count_occurrences,
    filter_seed_candidates,
    recompute_scores,
)
from sentilex.ingest import AnnotatedSentence, DictionaryEntry, SeedRecord
from sentilex.lexicon import Label, PosTag

from .oracles import recount

# (pos, neg, total) tallied by hand over data/fixture/corpus.tsv. "vui" in
# "nhân viên vui vẻ" is part of the headword "vui vẻ" and is not counted.
HAND_COUNTS = {
    "đẹp": (6, 0, 6),
    "tốt": (4, 0, 5),
    "hay": (3, 1, 6),
    "vui": (3, 0, 3),
    "giỏi": (3, 0, 3),
    "hạnh phúc": (3, 0, 3),
    "yêu": (2, 0, 2),
    "xấu": (0, 3, 4),
    "tệ": (0, 4, 4),
    "buồn": (0, 4, 4),
    "kém": (0, 3, 3),
    "ghét": (0, 4, 4),
    "lừa đảo": (0, 2, 2),
    "nguy hiểm": (0, 3, 3),
    "an toàn": (0, 1, 4),
    "thời tiết": (0, 1, 5),
}


def seed(term, pos=0.0, neg=0.0, tag="a", sid="1"):
    return SeedRecord(sid, term, pos, neg, PosTag.parse(tag))


def sent(label, text):
    return AnnotatedSentence(text, Label.parse(label))


def test_filter_keeps_strong_seed():
    assert filter_seed_candidates([seed("đẹp", 0.875, 0.0)]) == [seed("đẹp", 0.875, 0.0)]


def test_filter_boundary_is_strict():
    assert filter_seed_candidates([seed("x", 0.4, 0.4)], 0.4) == []


def test_filter_matches_brute_force():
    rng = random.Random(5)
    records = []
    for i in range(10):
        p = rng.choice([0.0, 0.125, 0.4, 0.41, 0.5, 0.875])
        n = rng.choice([v for v in (0.0, 0.125, 0.4, 0.5) if v + p <= 1])
        records.append(seed(f"t{i}", p, n, sid=str(i)))
    expected = []
    for r in records:
        if r.pos > 0.4 or r.neg > 0.4:
            expected.append(r)
    assert filter_seed_candidates(records, 0.4) == expected


def test_count_three_one_five():
    corpus = [
        sent("pos", "món này tốt"),
        sent("pos", "rất tốt"),
        sent("pos", "tốt quá"),
        sent("neg", "không tốt chút nào"),
        sent("neu", "tốt hay không"),
        sent("neu", "không liên quan"),
    ]
    assert count_occurrences(corpus, ["tốt"])["tốt"] == Counts(3, 1, 5)


def test_count_absent_term():
    assert count_occurrences([sent("pos", "vui")], ["buồn"])["buồn"] == Counts(0, 0, 0)


def test_count_repeats_within_sentence():
    assert count_occurrences([sent("pos", "đẹp, đẹp lắm")], ["đẹp"])["đẹp"] == Counts(2, 0, 2)


def test_count_multisyllable_term():
    corpus = [sent("pos", "gia đình hạnh phúc"), sent("neu", "hạnh phúc là gì")]
    assert count_occurrences(corpus, ["hạnh phúc"])["hạnh phúc"] == Counts(1, 0, 2)


def test_count_respects_longer_headwords():
    corpus = [sent("pos", "nhân viên vui vẻ"), sent("pos", "rất vui")]
    assert count_occurrences(corpus, ["vui"], ["vui vẻ"])["vui"] == Counts(1, 0, 1)


def test_hand_counts_match(corpus, dictionary):
    terms = list(HAND_COUNTS)
    counts = count_occurrences(corpus, terms, [e.term for e in dictionary])
    assert {t: tuple(counts[t]) for t in terms} == HAND_COUNTS


def test_brute_force_recount_where_no_compound_overlaps(corpus):
    raw = [(s.label.value, s.text) for s in corpus]
    terms = [t for t in HAND_COUNTS if t != "vui"]
    counts = count_occurrences(corpus, terms)
    for t in terms:
        assert tuple(counts[t]) == recount(raw, t), t


@pytest.mark.parametrize(
    "counts, expected",
    [((3, 1, 5), (0.6, 0.2)), ((0, 0, 4), (0.0, 0.0)), ((5, 0, 5), (1.0, 0.0))],
)
def test_recompute_scores(counts, expected):
    s = recompute_scores({"w": Counts(*counts)}, "w")
    assert (s.pos, s.neg) == pytest.approx(expected)


def test_recompute_zero_total():
    with pytest.raises(ZeroOccurrenceError):
        recompute_scores({"w": Counts(0, 0, 0)}, "w")
    with pytest.raises(ZeroOccurrenceError):
        recompute_scores({}, "w")


def entry(term, tag="a", definition="định nghĩa", examples=()):
    return DictionaryEntry(term, PosTag.parse(tag), definition, examples=tuple(examples))


def test_build_core_end_to_end():
    corpus = [sent("pos", "phong cảnh đẹp"), sent("pos", "đẹp quá"), sent("neu", "đẹp không")]
    core, skipped = build_core([seed("đẹp", 0.875)], corpus, [entry("đẹp", examples=["phong cảnh đẹp"])])
    assert skipped == []
    (c,) = core
    assert (c.term, c.pos_tag) == ("đẹp", PosTag.ADJECTIVE)
    assert (c.scores.pos, c.scores.neg) == pytest.approx((2 / 3, 0.0))
    assert c.gloss == "định nghĩa; phong cảnh đẹp"


def test_build_core_skip_reasons():
    corpus = [sent("pos", "đẹp"), sent("neg", "xấu")]
    dictionary = [entry("đẹp"), entry("khen", "v")]
    records = [
        seed("đẹp", 0.8, sid="1"),
        seed("khen", 0.6, tag="v", sid="2"),
        seed("xấu", 0.0, 0.7, sid="3"),
        seed("đẹp", 0.7, sid="4"),
        seed("bình thường", 0.2, 0.2, sid="5"),
    ]
    core, skipped = build_core(records, corpus, dictionary)
    assert [c.term for c in core] == ["đẹp"]
    assert skipped == [("khen", NO_CORPUS), ("xấu", NO_DICTIONARY), ("đẹp", DUPLICATE)]
    assert len(core) + len(skipped) == len(filter_seed_candidates(records))


def test_fixture_core_invariants(seeds, corpus, dictionary):
    core, skipped = build_core(seeds, corpus, dictionary)
    assert len(core) + len(skipped) == len(filter_seed_candidates(seeds))
    for c in core:
        assert c.scores.pos + c.scores.neg <= 1.0
        p, n, total = HAND_COUNTS[c.term]
        assert Fraction(c.scores.pos).limit_denominator(100) == Fraction(p, total)
        assert Fraction(c.scores.neg).limit_denominator(100) == Fraction(n, total)
    assert dict(skipped) == {"kì diệu": NO_DICTIONARY, "khen": NO_CORPUS, "đẹp": DUPLICATE}


def test_counting_is_partition_independent(corpus):
    terms = list(HAND_COUNTS)
    whole = count_occurrences(corpus, terms)
    halves = [count_occurrences(corpus[:30], terms), count_occurrences(corpus[30:], terms)]
    for t in terms:
        assert tuple(whole[t]) == tuple(sum(h[t][i] for h in halves) for i in range(3))
