"""Gloss tokenization, bag-of-words vectors and a linear max-margin classifier.

Two tokenizers are supported. ``TokenBased`` splits a gloss into lowercase
syllables. ``WordBased`` additionally glues consecutive syllables that
spell a dictionary headword into one underscore-joined token, choosing the
longest headword at each position.

The classifier minimizes the soft-margin objective

    lambda/2 * (|w|^2 + b^2) + mean_i max(0, 1 - y_i (w . phi(x_i) + b))

with ``lambda = 1 / (C * n)`` by full-batch subgradient descent using the
step ``1 / (lambda * t)``. The bias is treated as the weight of a constant
feature. Subgradient iterates are not monotone, so the best iterate seen
is the one kept. ``gamma = 1`` maps vectors through random Fourier
features approximating a unit-width RBF kernel before the linear fit.
"""

from __future__ import annotations

import enum
import functools
import hashlib
import json
import math
import os
import re
import unicodedata
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

MODEL_FORMAT = "sentilex-linear-svm"
MODEL_VERSION = 1

_SYLLABLE = re.compile(r"[^\W_]+")


class TokenizerKind(str, enum.Enum):
    TOKEN = "token"
    WORD = "word"

    @property
    def label(self) -> str:
        return "Token Based" if self is TokenizerKind.TOKEN else "Word Based"


def syllables(text: str) -> list[str]:
    """Lowercase syllables; whitespace, punctuation and underscores separate them."""
    return _SYLLABLE.findall(unicodedata.normalize("NFC", text).lower())


@dataclass(frozen=True)
class Tokenizer:
    kind: TokenizerKind
    headwords: frozenset[tuple[str, ...]] = frozenset()

    @classmethod
    def build(cls, kind: TokenizerKind | str, terms: Iterable[str] = ()) -> "Tokenizer":
        kind = TokenizerKind(kind)
        if kind is TokenizerKind.TOKEN:
            return cls(kind)
        words = frozenset(tuple(s) for s in map(syllables, terms) if len(s) > 1)
        return cls(kind, words)

    @functools.cached_property
    def _longest(self) -> int:
        return max((len(w) for w in self.headwords), default=1)

    def __call__(self, text: str) -> list[str]:
        sylls = syllables(text)
        if self.kind is TokenizerKind.TOKEN or not self.headwords:
            return sylls
        out: list[str] = []
        i = 0
        while i < len(sylls):
            for span in range(min(self._longest, len(sylls) - i), 1, -1):
                if tuple(sylls[i : i + span]) in self.headwords:
                    out.append("_".join(sylls[i : i + span]))
                    i += span
                    break
            else:
                out.append(sylls[i])
                i += 1
        return out


def tokenize(gloss: str, kind: TokenizerKind | str, lexicon: Iterable[str] = ()) -> list[str]:
    return Tokenizer.build(kind, lexicon)(gloss)


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple[str, ...]
    doc_freq: tuple[int, ...]
    n_docs: int

    @functools.cached_property
    def index(self) -> dict[str, int]:
        return {tok: i for i, tok in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: object) -> bool:
        return token in self.index


def build_vocabulary(token_lists: Iterable[Sequence[str]]) -> Vocabulary:
    """Ids are dense from 0 in order of first occurrence."""
    index: dict[str, int] = {}
    df: list[int] = []
    n_docs = 0
    for tokens in token_lists:
        n_docs += 1
        for tok in dict.fromkeys(tokens):
            if tok not in index:
                index[tok] = len(index)
                df.append(0)
            df[index[tok]] += 1
    if not index:
        raise ValueError("cannot build a vocabulary from empty token lists")
    return Vocabulary(tuple(index), tuple(df), n_docs)


@dataclass(frozen=True)
class FeatureVector:
    dim: int
    weights: Mapping[int, float] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.weights)


def vectorize(tokens: Sequence[str], vocab: Vocabulary, tfidf: bool = False) -> FeatureVector:
    """Term-frequency vector, L2-normalized; out-of-vocabulary tokens are ignored."""
    index = vocab.index
    counts = Counter(index[t] for t in tokens if t in index)
    if not counts:
        return FeatureVector(len(vocab))
    raw = {}
    for i in sorted(counts):
        w = float(counts[i])
        if tfidf:
            w *= math.log((1 + vocab.n_docs) / (1 + vocab.doc_freq[i])) + 1.0
        raw[i] = w
    norm = math.sqrt(sum(w * w for w in raw.values()))
    return FeatureVector(len(vocab), {i: w / norm for i, w in raw.items()})


# --- training data ----------------------------------------------------------


@dataclass(frozen=True)
class BinaryData:
    """Glosses for the classifier's positive and negative class."""

    positives: tuple[str, ...]
    negatives: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.positives or not self.negatives:
            raise ValueError(
                f"both classes need glosses (got {len(self.positives)} positive, "
                f"{len(self.negatives)} negative)"
            )

    @property
    def texts(self) -> list[str]:
        return list(self.positives) + list(self.negatives)

    @property
    def labels(self) -> np.ndarray:
        return np.array([1.0] * len(self.positives) + [-1.0] * len(self.negatives))


def _gloss(item: object) -> str:
    return item if isinstance(item, str) else item.gloss  # type: ignore[attr-defined]


def build_training_sets(tr_pos: Iterable, tr_neg: Iterable, tr_neu: Iterable) -> tuple[BinaryData, BinaryData]:
    """Positivity data: pos vs neg+neu. Negativity data: neg vs pos+neu.

    Members may be gloss strings or anything with a ``gloss`` attribute.
    """
    pos = tuple(map(_gloss, tr_pos))
    neg = tuple(map(_gloss, tr_neg))
    neu = tuple(map(_gloss, tr_neu))
    return BinaryData(pos, neg + neu), BinaryData(neg, pos + neu)


# --- classifier -------------------------------------------------------------


@dataclass(frozen=True)
class TrainingConfig:
    tokenizer: TokenizerKind = TokenizerKind.WORD
    gamma: float = 1.0
    regularization_c: float = 1.0
    max_epochs: int = 200
    convergence_tol: float = 1e-6
    rng_seed: int = 0
    tfidf: bool = False
    rff_dim: int = 512
    patience: int = 10

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokenizer", TokenizerKind(self.tokenizer))
        if self.gamma not in (0, 1):
            raise ValueError(f"gamma must be 0 or 1, got {self.gamma}")
        for name in ("regularization_c", "max_epochs", "convergence_tol", "rff_dim", "patience"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tokenizer"] = self.tokenizer.value
        return d


@functools.lru_cache(maxsize=200_000)
def _rff_row(seed: int, token: str, dim: int) -> np.ndarray:
    digest = hashlib.blake2b(f"{seed}\x00{token}".encode(), digest_size=8).digest()
    return np.random.default_rng(int.from_bytes(digest, "little")).standard_normal(dim)


def _rff_phase(seed: int, dim: int) -> np.ndarray:
    return np.random.default_rng([seed, dim]).uniform(0.0, 2.0 * math.pi, dim)


def _random_features(X: sp.csr_matrix, vocab: Vocabulary, seed: int, dim: int) -> np.ndarray:
    # one projection row per token, keyed by the token string so that
    # features do not depend on vocabulary id order
    omega = np.vstack([_rff_row(seed, tok, dim) for tok in vocab.tokens])
    return math.sqrt(2.0 / dim) * np.cos(X @ omega + _rff_phase(seed, dim))


@dataclass(frozen=True, eq=False)
class BinaryClassifier:
    weights: np.ndarray
    bias: float
    config: TrainingConfig
    vocabulary: Vocabulary
    objective_history: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        expected = len(self.vocabulary) if self.config.gamma == 0 else self.config.rff_dim
        if self.weights.shape != (expected,):
            raise ValueError(f"weight dimension {self.weights.shape} does not match {expected}")

    def features(self, vectors: Sequence[FeatureVector]) -> np.ndarray | sp.csr_matrix:
        X = to_matrix(vectors, len(self.vocabulary))
        if self.config.gamma == 0:
            return X
        return _random_features(X, self.vocabulary, self.config.rng_seed, self.config.rff_dim)

    def margins(self, vectors: Sequence[FeatureVector]) -> np.ndarray:
        for v in vectors:
            if v.dim != len(self.vocabulary):
                raise ValueError(f"vector dimension {v.dim} != vocabulary size {len(self.vocabulary)}")
        if not vectors:
            return np.zeros(0)
        return np.asarray(self.features(vectors) @ self.weights).ravel() + self.bias

    def margins_for_texts(self, texts: Sequence[str], tokenizer: Tokenizer) -> np.ndarray:
        return self.margins([vectorize(tokenizer(t), self.vocabulary, self.config.tfidf) for t in texts])

    def predict(self, texts: Sequence[str], tokenizer: Tokenizer) -> np.ndarray:
        return np.where(self.margins_for_texts(texts, tokenizer) > 0, 1, -1)


def predict_margin(clf: BinaryClassifier, vector: FeatureVector) -> float:
    """Signed ``w . x + b``; positive means the classifier's positive class."""
    return float(clf.margins([vector])[0])


def to_matrix(vectors: Sequence[FeatureVector], dim: int) -> sp.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for v in vectors:
        for i, w in sorted(v.weights.items()):
            if not 0 <= i < dim:
                raise ValueError(f"feature id {i} outside vocabulary of size {dim}")
            indices.append(i)
            data.append(w)
        indptr.append(len(indices))
    return sp.csr_matrix((np.array(data, dtype=float), np.array(indices, dtype=np.int64), indptr), shape=(len(vectors), dim))


def fit_hinge(
    X: np.ndarray | sp.csr_matrix,
    y: np.ndarray,
    c: float,
    max_epochs: int,
    tol: float,
    patience: int = 10,
) -> tuple[np.ndarray, float, list[float]]:
    """Return (weights, bias, best-objective-per-epoch)."""
    n, dim = X.shape
    if n == 0:
        raise ValueError("no training examples")
    y = np.asarray(y, dtype=float)
    if set(np.unique(y)) - {-1.0, 1.0}:
        raise ValueError("labels must be +1/-1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("both classes must be present")
    values = X.data if sp.issparse(X) else X
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite feature values")

    lam = 1.0 / (c * n)
    XT = X.T.tocsr() if sp.issparse(X) else X.T
    w = np.zeros(dim)
    b = 0.0

    def objective(w: np.ndarray, b: float) -> tuple[float, np.ndarray]:
        margins = np.asarray(X @ w).ravel() + b
        slack = 1.0 - y * margins
        loss = float(np.maximum(slack, 0.0).mean())
        return 0.5 * lam * (float(w @ w) + b * b) + loss, slack > 0

    best_obj, active = objective(w, b)
    start_obj = best_obj
    best_w, best_b = w.copy(), b
    history: list[float] = []
    for t in range(1, max_epochs + 1):
        coef = np.where(active, y, 0.0)
        # step 1/(lam t): w <- (1 - 1/t) w + (1/(lam t n)) sum_active y_i x_i
        shrink = 1.0 - 1.0 / t
        scale = 1.0 / (lam * t * n)
        w = shrink * w + scale * np.asarray(XT @ coef).ravel()
        b = shrink * b + scale * float(coef.sum())
        obj, active = objective(w, b)
        if obj < best_obj:
            best_obj, best_w, best_b = obj, w.copy(), b
        history.append(best_obj)
        # early 1/(lam t) steps overshoot; only measure progress once an iterate beats the start
        if best_obj < start_obj and len(history) > patience and history[-patience - 1] - best_obj < tol:
            break
    return best_w, best_b, history


def train(data: BinaryData, config: TrainingConfig, tokenizer: Tokenizer | None = None) -> BinaryClassifier:
    """Fit a classifier on the glosses in ``data``.

    ``tokenizer`` must match ``config.tokenizer``; a plain token-based
    tokenizer is used when it is omitted and the config asks for one.
    """
    tokenizer = _check_tokenizer(tokenizer, config)
    token_lists = [tokenizer(t) for t in data.texts]
    vocab = build_vocabulary(token_lists)
    vectors = [vectorize(toks, vocab, config.tfidf) for toks in token_lists]
    return fit_vectors(vectors, data.labels, vocab, config)


def fit_vectors(
    vectors: Sequence[FeatureVector], labels: np.ndarray, vocab: Vocabulary, config: TrainingConfig
) -> BinaryClassifier:
    X = to_matrix(vectors, len(vocab))
    features = X if config.gamma == 0 else _random_features(X, vocab, config.rng_seed, config.rff_dim)
    w, b, history = fit_hinge(
        features, labels, config.regularization_c, config.max_epochs, config.convergence_tol, config.patience
    )
    return BinaryClassifier(w, b, config, vocab, tuple(history))


def _check_tokenizer(tokenizer: Tokenizer | None, config: TrainingConfig) -> Tokenizer:
    if tokenizer is None:
        tokenizer = Tokenizer(config.tokenizer)
    if tokenizer.kind is not config.tokenizer:
        raise ValueError(f"tokenizer {tokenizer.kind.value} does not match config {config.tokenizer.value}")
    return tokenizer


# --- persistence ------------------------------------------------------------


class ModelFormatError(ValueError):
    pass


def save_classifier(clf: BinaryClassifier, path: str | os.PathLike[str]) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "config": clf.config.to_dict(),
        "vocabulary": list(clf.vocabulary.tokens),
        "doc_freq": list(clf.vocabulary.doc_freq),
        "n_docs": clf.vocabulary.n_docs,
        "weights": [float(x) for x in clf.weights],
        "bias": float(clf.bias),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def load_classifier(path: str | os.PathLike[str]) -> BinaryClassifier:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not a model file ({exc})") from None
    if payload.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: unknown model format {payload.get('format')!r}")
    if payload.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"{path}: model version {payload.get('version')!r}, expected {MODEL_VERSION}")
    vocab = Vocabulary(tuple(payload["vocabulary"]), tuple(payload["doc_freq"]), payload["n_docs"])
    return BinaryClassifier(
        np.array(payload["weights"], dtype=float),
        float(payload["bias"]),
        TrainingConfig(**payload["config"]),
        vocab,
    )
