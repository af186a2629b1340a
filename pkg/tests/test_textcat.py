import json
import math
import random

import numpy as np
import pytest

from sentilex.evaluation import f1_score
from sentilex.textcat import (
    BinaryData,
    FeatureVector,
    ModelFormatError,
    Tokenizer,
    TokenizerKind,
    TrainingConfig,
    _random_features,
    build_training_sets,
    build_vocabulary,
    fit_hinge,
    load_classifier,
    predict_margin,
    save_classifier,
    to_matrix,
    tokenize,
    train,
    vectorize,
)

TOKEN, WORD = TokenizerKind.TOKEN, TokenizerKind.WORD


def test_token_based_split():
    assert tokenize("phong cảnh đẹp", TOKEN) == ["phong", "cảnh", "đẹp"]


def test_word_based_joins_headword():
    assert tokenize("phong cảnh đẹp", WORD, ["phong cảnh", "đẹp"]) == ["phong_cảnh", "đẹp"]


def test_punctuation_only():
    assert tokenize("!!!", TOKEN) == []
    assert tokenize("!!!", WORD, ["phong cảnh"]) == []


def test_word_based_prefers_longest_match():
    lexicon = ["an toàn", "an toàn thực phẩm", "thực phẩm"]
    assert tokenize("kiểm tra an toàn thực phẩm", WORD, lexicon) == ["kiểm", "tra", "an_toàn_thực_phẩm"]


def test_tokenizer_lowercases_and_splits_punctuation():
    assert tokenize("Tốt, Rất-TỐT!", TOKEN) == ["tốt", "rất", "tốt"]


def test_build_vocabulary():
    assert build_vocabulary([["a", "b"], ["b", "c"]]).index == {"a": 0, "b": 1, "c": 2}
    assert build_vocabulary([["x"]]).index == {"x": 0}
    with pytest.raises(ValueError):
        build_vocabulary([[], []])


def test_vectorize_tf_l2():
    vocab = build_vocabulary([["a", "b"]])
    v = vectorize(["a", "a", "b"], vocab)
    assert v.weights == pytest.approx({0: 2 / math.sqrt(5), 1: 1 / math.sqrt(5)})


def test_vectorize_oov_and_unit():
    vocab = build_vocabulary([["a", "b"]])
    assert vectorize(["z", "q"], vocab).weights == {}
    assert vectorize(["b"], vocab).weights == {1: 1.0}


def test_vectorize_tfidf_flag():
    vocab = build_vocabulary([["a", "b"], ["a"]])
    v = vectorize(["a", "b"], vocab, tfidf=True)
    assert v.weights[1] > v.weights[0]
    assert sum(w * w for w in v.weights.values()) == pytest.approx(1.0)


def test_training_set_combination_counts():
    pos, neg, neu = [f"p{i}" for i in range(847)], [f"n{i}" for i in range(1232)], [f"u{i}" for i in range(449)]
    positivity, negativity = build_training_sets(pos, neg, neu)
    assert (len(positivity.positives), len(positivity.negatives)) == (847, 1681)
    assert (len(negativity.positives), len(negativity.negatives)) == (1232, 1296)
    assert set(positivity.negatives) == set(neg) | set(neu)
    assert set(negativity.negatives) == set(pos) | set(neu)


def test_training_sets_empty_neutral_and_singletons():
    positivity, _ = build_training_sets(["p"], ["n1", "n2"], [])
    assert positivity.negatives == ("n1", "n2")
    positivity, negativity = build_training_sets(["p"], ["n"], ["u"])
    assert (len(positivity.positives), len(positivity.negatives)) == (1, 2)
    assert (len(negativity.positives), len(negativity.negatives)) == (1, 2)


def test_training_sets_empty_side():
    with pytest.raises(ValueError):
        build_training_sets([], ["n"], ["u"])


def test_two_point_separable():
    vocab = build_vocabulary([["a", "b"]])
    a, b = vectorize(["a"], vocab), vectorize(["b"], vocab)
    X = to_matrix([a, b], 2)
    w, bias, _ = fit_hinge(X, np.array([1.0, -1.0]), 1.0, 200, 1e-9)
    from sentilex.textcat import BinaryClassifier

    clf = BinaryClassifier(w, bias, TrainingConfig(tokenizer=TOKEN, gamma=0), vocab)
    assert predict_margin(clf, a) > 0 > predict_margin(clf, b)


POS_WORDS = ["tốt", "đẹp", "hay", "vui", "giỏi"]
NEG_WORDS = ["xấu", "tệ", "dở", "buồn", "kém"]
FILLER = ["rất", "là", "một", "cái", "này", "có", "người"]


def separable_glosses(n=20, seed=1):
    rng = random.Random(seed)
    pos, neg = [], []
    for i in range(n // 2):
        pos.append(" ".join(rng.sample(FILLER, 3) + rng.sample(POS_WORDS, 2)))
        neg.append(" ".join(rng.sample(FILLER, 3) + rng.sample(NEG_WORDS, 2)))
    return BinaryData(tuple(pos), tuple(neg))


@pytest.mark.parametrize("gamma", [0, 1])
@pytest.mark.parametrize("kind", [TOKEN, WORD])
def test_separable_set_is_fit_exactly(kind, gamma):
    data = separable_glosses()
    tok = Tokenizer.build(kind, ["rất tốt"])
    clf = train(data, TrainingConfig(tokenizer=kind, gamma=gamma, max_epochs=200), tok)
    pred = clf.predict(data.texts, tok)
    assert f1_score(list(pred), list(data.labels.astype(int)))[0] == 1.0
    assert len(clf.objective_history) <= 200


def test_duplicated_dataset_same_signs():
    data = separable_glosses()
    doubled = BinaryData(data.positives * 2, data.negatives * 2)
    cfg = TrainingConfig(tokenizer=TOKEN, gamma=0)
    a, b = train(data, cfg), train(doubled, cfg)
    tok = Tokenizer(TOKEN)
    assert np.array_equal(np.sign(a.margins_for_texts(data.texts, tok)), np.sign(b.margins_for_texts(data.texts, tok)))


def test_training_is_bitwise_deterministic():
    data = separable_glosses(40, seed=3)
    for gamma in (0, 1):
        cfg = TrainingConfig(tokenizer=TOKEN, gamma=gamma, rng_seed=7)
        a, b = train(data, cfg), train(data, cfg)
        assert a.weights.tobytes() == b.weights.tobytes() and a.bias == b.bias


def test_objective_history_non_increasing():
    clf = train(separable_glosses(40, seed=4), TrainingConfig(tokenizer=TOKEN, gamma=0))
    h = clf.objective_history
    assert all(later <= earlier + 1e-12 for earlier, later in zip(h, h[1:]))


def test_fit_rejects_single_class_and_nonfinite():
    X = to_matrix([FeatureVector(1, {0: 1.0})], 1)
    with pytest.raises(ValueError, match="both classes"):
        fit_hinge(X, np.array([1.0]), 1.0, 10, 1e-6)
    bad = to_matrix([FeatureVector(1, {0: math.inf}), FeatureVector(1, {0: 1.0})], 1)
    with pytest.raises(ValueError, match="non-finite"):
        fit_hinge(bad, np.array([1.0, -1.0]), 1.0, 10, 1e-6)


def linear_clf():
    return train(separable_glosses(), TrainingConfig(tokenizer=TOKEN, gamma=0))


def test_zero_vector_margin_is_bias():
    clf = linear_clf()
    assert predict_margin(clf, FeatureVector(len(clf.vocabulary))) == clf.bias


def test_margin_linearity():
    clf = linear_clf()
    x = vectorize(["tốt", "rất", "xấu"], clf.vocabulary)
    base = predict_margin(clf, x)
    for alpha in (0.0, 0.5, 2.0, 7.5):
        scaled = FeatureVector(x.dim, {i: alpha * w for i, w in x.weights.items()})
        assert predict_margin(clf, scaled) == pytest.approx(alpha * (base - clf.bias) + clf.bias)


def test_weight_scaling_keeps_sign():
    from dataclasses import replace

    clf = linear_clf()
    x = vectorize(["tốt", "đẹp"], clf.vocabulary)
    scaled = replace(clf, weights=clf.weights * 3.0, bias=clf.bias * 3.0)
    assert predict_margin(scaled, x) == pytest.approx(3.0 * predict_margin(clf, x))


def test_dimension_mismatch():
    clf = linear_clf()
    with pytest.raises(ValueError, match="dimension"):
        predict_margin(clf, FeatureVector(len(clf.vocabulary) + 1, {0: 1.0}))


@pytest.mark.parametrize("gamma", [0, 1])
def test_vocabulary_order_does_not_change_margins(gamma):
    data = separable_glosses(30, seed=9)
    flipped = BinaryData(tuple(reversed(data.positives)), tuple(reversed(data.negatives)))
    # same examples, different first-occurrence order; labels are order-aligned in BinaryData
    cfg = TrainingConfig(tokenizer=TOKEN, gamma=gamma)
    a, b = train(data, cfg), train(flipped, cfg)
    assert a.vocabulary.tokens != b.vocabulary.tokens
    tok = Tokenizer(TOKEN)
    probe = list(data.texts) + ["tốt mà buồn", "không rõ"]
    np.testing.assert_allclose(a.margins_for_texts(probe, tok), b.margins_for_texts(probe, tok), rtol=1e-9, atol=1e-12)


def test_random_features_approximate_rbf():
    vocab = build_vocabulary([[f"t{i}" for i in range(12)]])
    rng = random.Random(0)
    vecs = [vectorize([f"t{rng.randrange(12)}" for _ in range(4)], vocab) for _ in range(25)]
    Z = _random_features(to_matrix(vecs, len(vocab)), vocab, seed=0, dim=4096)
    X = to_matrix(vecs, len(vocab)).toarray()
    sq = ((X[:, None, :] - X[None, :, :]) ** 2).sum(-1)
    assert np.abs(Z @ Z.T - np.exp(-sq / 2)).max() < 0.1


def test_tokenizer_mismatch():
    with pytest.raises(ValueError, match="does not match"):
        train(separable_glosses(), TrainingConfig(tokenizer=WORD), Tokenizer(TOKEN))


def test_model_round_trip(tmp_path):
    for gamma in (0, 1):
        clf = train(separable_glosses(), TrainingConfig(tokenizer=TOKEN, gamma=gamma, rng_seed=5))
        path = tmp_path / f"m{gamma}.json"
        save_classifier(clf, path)
        back = load_classifier(path)
        tok = Tokenizer(TOKEN)
        texts = ["tốt đẹp", "xấu tệ", "rất là"]
        assert back.config == clf.config
        assert np.array_equal(back.margins_for_texts(texts, tok), clf.margins_for_texts(texts, tok))


def test_model_version_mismatch(tmp_path):
    path = tmp_path / "m.json"
    save_classifier(linear_clf(), path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    payload["version"] = 99
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ModelFormatError, match="version"):
        load_classifier(path)
