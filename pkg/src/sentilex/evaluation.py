"""Classifier evaluation (splits, k-fold CV, F1 grid) and lexicon ranking distance."""

from __future__ import annotations

import logging
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Hashable, Iterable, Mapping, Sequence, TypeVar

import numpy as np

from sentilex.ingest import GoldRanking
from sentilex.lexicon import Label, SentiLexicon, canonical_term
from sentilex.textcat import BinaryData, Tokenizer, TokenizerKind, TrainingConfig, train

log = logging.getLogger(__name__)

T = TypeVar("T")

TIE_PENALTY = 0.5
SPLIT_RATIOS = (3, 1, 1)


def largest_remainder(n: int, ratios: Sequence[float]) -> list[int]:
    """Integer part sizes summing to ``n``; leftovers go to the largest fractions, earlier parts first."""
    if not ratios or any(r <= 0 for r in ratios):
        raise ValueError("ratios must be positive")
    total = float(sum(ratios))
    quotas = [n * r / total for r in ratios]
    sizes = [int(q) for q in quotas]
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[: n - sum(sizes)]:
        sizes[i] += 1
    return sizes


def _strata(labels: Sequence[Hashable]) -> dict[Hashable, list[int]]:
    groups: dict[Hashable, list[int]] = defaultdict(list)
    for i, label in enumerate(labels):
        groups[label].append(i)
    return {k: groups[k] for k in sorted(groups, key=str)}


def stratified_split(
    items: Sequence[T], labels: Sequence[Hashable], ratios: Sequence[float] = SPLIT_RATIOS, seed: int = 0
) -> tuple[list[T], ...]:
    """Shuffle each label stratum with ``seed`` and cut it into parts of ``ratios``."""
    if len(items) != len(labels):
        raise ValueError("items and labels differ in length")
    if not items:
        raise ValueError("nothing to split")
    rng = np.random.default_rng(seed)
    parts: list[list[T]] = [[] for _ in ratios]
    for idx in _strata(labels).values():
        shuffled = [idx[j] for j in rng.permutation(len(idx))]
        start = 0
        for part, size in zip(parts, largest_remainder(len(idx), ratios)):
            part.extend(items[i] for i in shuffled[start : start + size])
            start += size
    return tuple(parts)


def kfold(
    items: Sequence[T], labels: Sequence[Hashable], k: int = 4, seed: int = 0
) -> list[tuple[list[T], list[T]]]:
    """Stratified folds whose sizes differ by at most one.

    Strata are shuffled, concatenated, and dealt round-robin across folds.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(items) < k:
        raise ValueError(f"need at least {k} items for {k}-fold validation, got {len(items)}")
    if len(items) != len(labels):
        raise ValueError("items and labels differ in length")
    rng = np.random.default_rng(seed)
    order = [idx[j] for idx in _strata(labels).values() for j in rng.permutation(len(idx))]
    fold_of = {i: pos % k for pos, i in enumerate(order)}
    folds = []
    for f in range(k):
        train_part = [items[i] for i in range(len(items)) if fold_of[i] != f]
        validate = [items[i] for i in range(len(items)) if fold_of[i] == f]
        folds.append((train_part, validate))
    return folds


def _f1(tp: int, fp: int, fn: int) -> float:
    if tp + fp + fn == 0:
        return 1.0
    return 2 * tp / (2 * tp + fp + fn)


def f1_score(predictions: Sequence[Hashable], gold: Sequence[Hashable], positive: Hashable = 1) -> tuple[float, float]:
    """Return ``(micro, macro)`` F1.

    With at most two distinct labels, micro is the F1 of ``positive``;
    otherwise it pools true/false positives over all classes. Macro is the
    mean per-class F1 over every label seen in either sequence.
    """
    if len(predictions) != len(gold):
        raise ValueError(f"length mismatch: {len(predictions)} predictions, {len(gold)} gold labels")
    classes = sorted(set(predictions) | set(gold), key=str)
    stats = {}
    for c in classes:
        tp = sum(1 for p, g in zip(predictions, gold) if p == c and g == c)
        fp = sum(1 for p, g in zip(predictions, gold) if p == c and g != c)
        fn = sum(1 for p, g in zip(predictions, gold) if p != c and g == c)
        stats[c] = (tp, fp, fn)
    macro = float(np.mean([_f1(*stats[c]) for c in classes])) if classes else 1.0
    if len(classes) <= 2:
        micro = _f1(*stats.get(positive, (0, 0, 0)))
    else:
        micro = _f1(*(sum(s[i] for s in stats.values()) for i in range(3)))
    return micro, macro


# --- grid search ------------------------------------------------------------


@dataclass(frozen=True)
class GridCell:
    tokenizer: TokenizerKind
    gamma: float
    micro_f1: float
    macro_f1: float
    fold_micro: tuple[float, ...] = ()


@dataclass(frozen=True)
class GridResult:
    best: TrainingConfig
    cells: tuple[GridCell, ...]

    def cell(self, tokenizer: TokenizerKind | str, gamma: float) -> GridCell:
        for c in self.cells:
            if c.tokenizer is TokenizerKind(tokenizer) and c.gamma == gamma:
                return c
        raise KeyError((tokenizer, gamma))


ALL_CONFIGS = tuple((kind, g) for kind in (TokenizerKind.TOKEN, TokenizerKind.WORD) for g in (0, 1))


def binary_data(texts: Sequence[str], labels: Sequence[Label], target: Label) -> BinaryData:
    return BinaryData(
        tuple(t for t, l in zip(texts, labels) if l is target),
        tuple(t for t, l in zip(texts, labels) if l is not target),
    )


def grid_search(
    texts: Sequence[str],
    labels: Sequence[Label],
    base: TrainingConfig,
    headwords: Iterable[str] = (),
    configs: Sequence[tuple[TokenizerKind, float]] = ALL_CONFIGS,
    k: int = 4,
    seed: int = 0,
    target: Label = Label.POSITIVE,
) -> GridResult:
    """Mean k-fold F1 of the ``target``-vs-rest classifier for each (tokenizer, gamma).

    Folds are stratified on the three-way label. The best cell maximizes
    mean positive-class F1; ties prefer word-based, then the larger gamma.
    """
    if not configs:
        raise ValueError("empty configuration grid")
    headwords = list(headwords)
    tokenizers = {kind: Tokenizer.build(kind, headwords) for kind in {TokenizerKind(c[0]) for c in configs}}
    folds = kfold(list(range(len(texts))), labels, k=k, seed=seed)
    cells = []
    for kind, gamma in configs:
        kind = TokenizerKind(kind)
        config = replace(base, tokenizer=kind, gamma=gamma)
        micro, macro = [], []
        for train_idx, val_idx in folds:
            clf = train(binary_data([texts[i] for i in train_idx], [labels[i] for i in train_idx], target), config, tokenizers[kind])
            pred = clf.predict([texts[i] for i in val_idx], tokenizers[kind])
            gold = [1 if labels[i] is target else -1 for i in val_idx]
            mi, ma = f1_score(list(pred), gold, positive=1)
            micro.append(mi)
            macro.append(ma)
        cells.append(GridCell(kind, gamma, float(np.mean(micro)), float(np.mean(macro)), tuple(micro)))
        log.info("grid %s gamma=%g: F1 %.3f", kind.value, gamma, cells[-1].micro_f1)
    best = max(cells, key=lambda c: (c.micro_f1, c.tokenizer is TokenizerKind.WORD, c.gamma))
    return GridResult(replace(base, tokenizer=best.tokenizer, gamma=best.gamma), tuple(cells))


# --- ranking distance -------------------------------------------------------


class MissingTermsError(ValueError):
    def __init__(self, missing: Sequence[str]) -> None:
        self.missing = list(missing)
        super().__init__(f"{len(self.missing)} gold term(s) missing from the ranking: {', '.join(self.missing)}")


class _Fenwick:
    def __init__(self, n: int) -> None:
        self.tree = [0] * (n + 1)

    def add(self, i: int) -> None:
        i += 1
        while i < len(self.tree):
            self.tree[i] += 1
            i += i & -i

    def prefix(self, i: int) -> int:
        """Count of added positions < i."""
        total = 0
        while i > 0:
            total += self.tree[i]
            i -= i & -i
        return total


def kendall_tau_p(
    predicted: Mapping[str, float], gold: Sequence[tuple[str, float]], penalty: float = TIE_PENALTY
) -> float:
    """Kendall distance with tie penalty between a scored ranking and a gold list.

    Only pairs the gold list orders strictly count. Such a pair costs 1 when
    the predicted scores reverse it and ``penalty`` when they tie it; the
    sum is divided by the number of strictly ordered gold pairs. Runs in
    O(n log n).
    """
    missing = [t for t, _ in gold if t not in predicted]
    if missing:
        raise MissingTermsError(missing)
    values = sorted({predicted[t] for t, _ in gold})
    rank = {v: i for i, v in enumerate(values)}
    tree = _Fenwick(len(values))

    by_gold: dict[float, list[str]] = defaultdict(list)
    for term, value in gold:
        by_gold[value].append(term)
    pairs = 0
    discordant = 0
    tied = 0
    added = 0
    for value in sorted(by_gold, reverse=True):
        group = [rank[predicted[t]] for t in by_gold[value]]
        for r in group:
            below = tree.prefix(r)
            discordant += below
            tied += tree.prefix(r + 1) - below
        pairs += added * len(group)
        for r in group:
            tree.add(r)
        added += len(group)
    if pairs == 0:
        raise ValueError("gold ranking orders no pair of terms")
    return (discordant + penalty * tied) / pairs


def lexicon_scores(lex: SentiLexicon) -> tuple[dict[str, float], dict[str, float]]:
    """Best positivity and negativity per term across all synsets holding it."""
    pos: dict[str, float] = {}
    neg: dict[str, float] = {}
    for s in lex:
        for term in s.terms:
            pos[term] = max(pos.get(term, 0.0), s.scores.pos)
            neg[term] = max(neg.get(term, 0.0), s.scores.neg)
    return pos, neg


def evaluate_lexicon(lex: SentiLexicon, gold: GoldRanking) -> tuple[float, float]:
    """τ_p of the lexicon's positivity and negativity rankings against ``gold``."""
    pos, neg = lexicon_scores(lex)

    def canon(entries: Sequence[tuple[str, float]]) -> list[tuple[str, float]]:
        return [(canonical_term(unicodedata.normalize("NFC", t)), v) for t, v in entries]

    gold_pos, gold_neg = canon(gold.positivity), canon(gold.negativity)
    missing = [orig for (orig, _), (t, _) in zip(gold.positivity, gold_pos) if t not in pos]
    if missing:
        raise MissingTermsError(missing)
    return kendall_tau_p(pos, gold_pos), kendall_tau_p(neg, gold_neg)


# --- report -----------------------------------------------------------------


@dataclass
class EvalReport:
    grid: GridResult
    test_f1: tuple[float, float]
    tau_p: tuple[float, float]
    sizes: dict[str, int] = field(default_factory=dict)

    def to_text(self) -> str:
        kinds = [k for k in (TokenizerKind.TOKEN, TokenizerKind.WORD) if any(c.tokenizer is k for c in self.grid.cells)]
        gammas = sorted({c.gamma for c in self.grid.cells})
        lines = ["Classification performance (positivity classifier, mean F1 over folds)", ""]
        lines.append(" " * 14 + "".join(f"{f'γ = {g:g}':>10}" for g in gammas))
        for kind in kinds:
            row = f"{kind.label:<14}"
            for g in gammas:
                try:
                    row += f"{self.grid.cell(kind, g).micro_f1:>10.3f}"
                except KeyError:
                    row += f"{'-':>10}"
            lines.append(row)
        best = self.grid.best
        lines += [
            "",
            f"Selected: {best.tokenizer.label}, γ = {best.gamma:g}",
            f"Test F1: micro {self.test_f1[0]:.3f}, macro {self.test_f1[1]:.3f}",
            "",
            "τ_p ranking distance against the gold list",
            "",
            f"{'':<14}{'Positivity':>12}{'Negativity':>12}",
            f"{'lexicon':<14}{self.tau_p[0]:>12.3f}{self.tau_p[1]:>12.3f}",
        ]
        if self.sizes:
            lines += ["", "Split sizes: " + ", ".join(f"{k} {v}" for k, v in self.sizes.items())]
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        out = []
        for c in self.grid.cells:
            key = f"{c.tokenizer.value}.gamma{c.gamma:g}"
            out.append(f"cv_f1_micro.{key}={c.micro_f1:.6f}")
            out.append(f"cv_f1_macro.{key}={c.macro_f1:.6f}")
        out += [
            f"best.tokenizer={self.grid.best.tokenizer.value}",
            f"best.gamma={self.grid.best.gamma:g}",
            f"test_f1_micro={self.test_f1[0]:.6f}",
            f"test_f1_macro={self.test_f1[1]:.6f}",
            f"tau_p_positivity={self.tau_p[0]:.6f}",
            f"tau_p_negativity={self.tau_p[1]:.6f}",
        ]
        out += [f"size.{k}={v}" for k, v in self.sizes.items()]
        return "\n".join(out) + "\n"

