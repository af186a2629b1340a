"""Brute-force reference implementations used to check the library.

These are deliberately naive and share no code with the package beyond
plain data types.
"""

from __future__ import annotations

import itertools
from typing import Mapping, Sequence


def tau_pairs(predicted: Mapping[str, float], gold: Sequence[tuple[str, float]], penalty: float = 0.5) -> float:
    """O(n^2) enumeration of gold-ordered pairs."""
    cost = 0.0
    pairs = 0
    for (a, ga), (b, gb) in itertools.combinations(gold, 2):
        if ga == gb:
            continue
        hi, lo = (a, b) if ga > gb else (b, a)
        pairs += 1
        if predicted[hi] < predicted[lo]:
            cost += 1
        elif predicted[hi] == predicted[lo]:
            cost += penalty
    return cost / pairs


def weak_orderings(n: int):
    """Every ranking-with-ties of n items, as a tuple of tier numbers (0 = top)."""
    for levels in itertools.product(range(n), repeat=n):
        used = set(levels)
        if used == set(range(len(used))):
            yield levels


def recount(sentences: Sequence[tuple[str, str]], term: str) -> tuple[int, int, int]:
    """Count term occurrences by sliding over whitespace/punctuation-split syllables.

    ``sentences`` are (label, text); the term may span several syllables.
    Only exact syllable-window matches count; no longer headword may
    overlap the match (fixture sentences are built so none does).
    """
    import re

    target = term.lower().split()
    pos = neg = total = 0
    for label, text in sentences:
        sylls = re.findall(r"[^\W_]+", text.lower())
        hits = sum(1 for i in range(len(sylls) - len(target) + 1) if sylls[i : i + len(target)] == target)
        total += hits
        if label == "pos":
            pos += hits
        elif label == "neg":
            neg += hits
    return pos, neg, total


def expansion_closure(
    graph: Mapping[str, tuple[set[str], set[str]]],
    pos: set[str],
    neg: set[str],
    neu: set[str],
    radius: int,
) -> tuple[set[str], set[str], set[str]]:
    """Hop-by-hop closure over an undirected synonym/antonym graph.

    ``graph`` maps each headword to the (synonyms, antonyms) it lists.
    Returns (positive, negative, conflicted) headword sets.
    """

    def linked(a: str, b: str, kind: int) -> bool:
        return a != b and (b in graph[a][kind] or a in graph[b][kind])

    P, N = set(pos), set(neg)
    done = P | N | set(neu)
    conflicts: set[str] = set()
    for _ in range(radius):
        to_pos, to_neg = set(), set()
        for c in graph:
            if c in done:
                continue
            if any(linked(c, p, 0) for p in P if p in graph) or any(linked(c, n, 1) for n in N if n in graph):
                to_pos.add(c)
            if any(linked(c, n, 0) for n in N if n in graph) or any(linked(c, p, 1) for p in P if p in graph):
                to_neg.add(c)
        both = to_pos & to_neg
        P |= to_pos - both
        N |= to_neg - both
        conflicts |= both
        done |= to_pos | to_neg
    return P, N, conflicts
