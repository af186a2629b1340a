"""Command-line front end: build-core, build-lexicon, evaluate, export.

Each stage reads the previous stage's files from the output directory::

    build-core     -> core.tsv, core_skipped.tsv
    build-lexicon  -> expansion.tsv, training.tsv, model_pos.json,
                      model_neg.json, lexicon.tsv, diagnostics.tsv
    evaluate       -> report.txt, report.kv
    export         -> lexicon.json
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path
from typing import Sequence

from sentilex import core as core_mod
from sentilex import evaluation, expand, scorer, textcat
from sentilex.config import ConfigError, PipelineConfig, grid_configs, resolve_config
from sentilex.ingest import IngestError, load_corpus, load_gold_standard, load_seed_mapping, parse_dictionary
from sentilex.lexicon import Label, LexiconFormatError, neutrality, read_lexicon, write_lexicon

log = logging.getLogger("sentilex")

CORE_FILE = "core.tsv"
SKIP_FILE = "core_skipped.tsv"
AUDIT_FILE = "expansion.tsv"
TRAINING_FILE = "training.tsv"
LEXICON_FILE = "lexicon.tsv"
DIAGNOSTICS_FILE = "diagnostics.tsv"
POS_MODEL = "model_pos.json"
NEG_MODEL = "model_neg.json"

EXIT_FAILURE = 1
EXIT_USAGE = 2


class CommandError(Exception):
    def __init__(self, message: str, code: int = EXIT_FAILURE) -> None:
        super().__init__(message)
        self.code = code


def _require(config: PipelineConfig, *names: str) -> list[Path]:
    paths = []
    for name in names:
        path = getattr(config, name)
        if path is None:
            raise CommandError(f"no {name} file given (use --{name} or the config file)", EXIT_USAGE)
        if not Path(path).is_file():
            raise CommandError(f"{name} file not found: {path}", EXIT_USAGE)
        paths.append(Path(path))
    return paths


def _require_stage_file(path: Path, producer: str) -> Path:
    if not path.is_file():
        raise CommandError(f"{path} not found; run `sentilex {producer}` first", EXIT_USAGE)
    return path


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --- commands ---------------------------------------------------------------


def cmd_build_core(config: PipelineConfig) -> int:
    dictionary_path, corpus_path, seeds_path = _require(config, "dictionary", "corpus", "seeds")
    dictionary = parse_dictionary(dictionary_path)
    corpus = load_corpus(corpus_path)
    seeds = load_seed_mapping(seeds_path)

    core, skipped = core_mod.build_core(seeds, corpus, dictionary, config.seed_filter_threshold)
    config.out.mkdir(parents=True, exist_ok=True)
    write_lexicon(core_mod.core_to_lexicon(core), config.out / CORE_FILE)
    _write_text(config.out / SKIP_FILE, "".join(f"{term}\t{reason}\n" for term, reason in skipped))

    reasons = Counter(reason for _, reason in skipped)
    print(f"seeds: {len(seeds)} read, {len(core) + len(skipped)} above threshold {config.seed_filter_threshold:g}")
    print(f"core: {len(core)} kept, {len(skipped)} skipped", end="")
    print("".join(f", {reason} {n}" for reason, n in sorted(reasons.items())))
    if not core:
        log.warning("the core is empty; build-lexicon will have nothing to train on")
    print(f"wrote {config.out / CORE_FILE}")
    return 0


def cmd_build_lexicon(config: PipelineConfig) -> int:
    (dictionary_path,) = _require(config, "dictionary")
    core_path = _require_stage_file(config.out / CORE_FILE, "build-core")
    dictionary = parse_dictionary(dictionary_path)
    core = core_mod.core_from_lexicon(read_lexicon(core_path))

    sets = expand.split_core(core, config.split_threshold)
    sets = expand.expand(sets, dictionary, config.expansion_radius)
    expand.write_audit(sets, config.out / AUDIT_FILE)
    expand.write_training(sets, config.out / TRAINING_FILE)
    sizes = sets.sizes()
    print(f"training sets after expansion: pos {sizes['pos']}, neg {sizes['neg']}, neu {sizes['neu']}"
          f" ({len(sets.conflicts)} conflicts excluded)")

    try:
        pos_data, neg_data = textcat.build_training_sets(sets.tr_pos, sets.tr_neg, sets.tr_neu)
    except ValueError as exc:
        raise CommandError(
            f"cannot train: {exc}. Lower --split-threshold, raise --radius, or add seeds."
        ) from None

    train_config = textcat.TrainingConfig(
        tokenizer=config.tokenizer,
        gamma=config.gamma,
        regularization_c=config.regularization_c,
        max_epochs=config.max_epochs,
        rng_seed=config.rng_seed,
        tfidf=config.tfidf,
    )
    tokenizer = textcat.Tokenizer.build(config.tokenizer, (e.term for e in dictionary))
    pos_clf = textcat.train(pos_data, train_config, tokenizer)
    neg_clf = textcat.train(neg_data, train_config, tokenizer)
    textcat.save_classifier(pos_clf, config.out / POS_MODEL)
    textcat.save_classifier(neg_clf, config.out / NEG_MODEL)

    scored = scorer.score_all(dictionary, pos_clf, neg_clf, tokenizer)
    scores = scorer.normalize([s.margins for s in scored], config.normalization_mode)
    pinned = {(c.term, c.pos_tag): c.scores for c in core} if config.pin_core else None
    lexicon = scorer.assemble_lexicon(dictionary, scores, pinned)
    write_lexicon(lexicon, config.out / LEXICON_FILE)
    scorer.write_diagnostics(scored, config.out / DIAGNOSTICS_FILE)

    flagged = sum(s.flagged for s in scored)
    print(f"lexicon: {len(lexicon)} synsets from {len(dictionary)} dictionary entries ({flagged} with empty glosses)")
    print(f"wrote {config.out / LEXICON_FILE}")
    return 0


def cmd_evaluate(config: PipelineConfig) -> int:
    dictionary_path, gold_path = _require(config, "dictionary", "gold")
    training_path = _require_stage_file(config.out / TRAINING_FILE, "build-lexicon")
    lexicon_path = _require_stage_file(config.out / LEXICON_FILE, "build-lexicon")
    dictionary = parse_dictionary(dictionary_path)
    gold = load_gold_standard(gold_path)
    sets = expand.read_training(training_path)
    lexicon = read_lexicon(lexicon_path)

    items = [(m.gloss, label) for label in Label for m in sets.members(label)]
    train_part, dev_part, test_part = evaluation.stratified_split(
        items, [label for _, label in items], evaluation.SPLIT_RATIOS, config.rng_seed
    )
    tune = train_part + dev_part
    base = textcat.TrainingConfig(
        regularization_c=config.regularization_c,
        max_epochs=config.max_epochs,
        rng_seed=config.rng_seed,
        tfidf=config.tfidf,
    )
    headwords = [e.term for e in dictionary]
    try:
        grid = evaluation.grid_search(
            [t for t, _ in tune],
            [l for _, l in tune],
            base,
            headwords,
            grid_configs(config.grid),
            k=config.folds,
            seed=config.rng_seed,
        )
        tokenizer = textcat.Tokenizer.build(grid.best.tokenizer, headwords)
        clf = textcat.train(
            evaluation.binary_data([t for t, _ in tune], [l for _, l in tune], Label.POSITIVE), grid.best, tokenizer
        )
    except ValueError as exc:
        raise CommandError(f"classifier evaluation failed: {exc}") from None
    if test_part:
        pred = [int(p) for p in clf.predict([t for t, _ in test_part], tokenizer)]
        gold_labels = [1 if l is Label.POSITIVE else -1 for _, l in test_part]
        test_f1 = evaluation.f1_score(pred, gold_labels, positive=1)
    else:
        test_f1 = (float("nan"), float("nan"))

    try:
        tau = evaluation.evaluate_lexicon(lexicon, gold)
    except evaluation.MissingTermsError as exc:
        for term in exc.missing:
            print(f"missing gold term: {term}", file=sys.stderr)
        raise CommandError(f"{len(exc.missing)} gold term(s) missing from {lexicon_path}") from None

    report = evaluation.EvalReport(
        grid, test_f1, tau, {"train": len(train_part), "dev": len(dev_part), "test": len(test_part)}
    )
    config.out.mkdir(parents=True, exist_ok=True)
    _write_text(config.out / "report.txt", report.to_text())
    _write_text(config.out / "report.kv", report.to_kv())
    print(report.to_text(), end="")
    return 0


def cmd_export(config: PipelineConfig, lexicon_path: Path | None, dest: Path | None) -> int:
    lexicon_path = _require_stage_file(lexicon_path or config.out / LEXICON_FILE, "build-lexicon")
    lexicon = read_lexicon(lexicon_path)
    rows = [
        {
            "pos_tag": s.pos_tag.value,
            "id": s.id,
            "pos": round(s.scores.pos, 3),
            "neg": round(s.scores.neg, 3),
            "neu": round(neutrality(s.scores), 3),
            "terms": [t.replace("_", " ") for t in s.terms],
            "gloss": s.gloss,
        }
        for s in lexicon
    ]
    text = json.dumps(rows, ensure_ascii=False, indent=1) + "\n"
    if dest is not None and str(dest) == "-":
        sys.stdout.write(text)
        return 0
    dest = dest or config.out / "lexicon.json"
    _write_text(dest, text)
    print(f"wrote {len(rows)} synsets to {dest}")
    return 0


# --- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file (falls back to $SENTILEX_CONFIG)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", dest="rng_seed", type=int, help="random seed")
    common.add_argument("--dictionary", help="dictionary XML")
    common.add_argument("--corpus", help="labeled corpus TSV")
    common.add_argument("--seeds", help="translated seed mapping TSV")
    common.add_argument("--gold", help="gold standard TSV")
    common.add_argument("--threshold", dest="seed_filter_threshold", type=float,
                        help="seed filter threshold (default 0.4)")
    common.add_argument("--split-threshold", dest="split_threshold", type=float,
                        help="core split threshold (default 0.3)")
    common.add_argument("--radius", dest="expansion_radius", type=int, help="expansion hops (default 1)")
    common.add_argument("--tokenizer", choices=["token", "word"])
    common.add_argument("--gamma", type=float, choices=[0, 1])
    common.add_argument("--normalization", dest="normalization_mode", choices=["linear", "log"])
    common.add_argument("--pin-core", dest="pin_core", action="store_const", const=True,
                        help="keep corpus-derived scores for core synsets")
    common.add_argument("--grid", help="grid for evaluate, e.g. token:0,word:1")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sentilex", description="Build and evaluate a sentiment lexicon.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build-core", parents=[common], help="filter seeds and recount their scores on the corpus")
    sub.add_parser("build-lexicon", parents=[common], help="expand the core, train classifiers, score the dictionary")
    sub.add_parser("evaluate", parents=[common], help="F1 grid search and ranking distance to the gold list")
    export = sub.add_parser("export", parents=[common], help="write the lexicon as JSON")
    export.add_argument("--lexicon", type=Path, help="lexicon TSV (default OUT/lexicon.tsv)")
    export.add_argument("-o", "--output", type=Path, help="destination file, '-' for stdout")
    return parser


_OVERRIDES = (
    "out", "rng_seed", "dictionary", "corpus", "seeds", "gold", "seed_filter_threshold",
    "split_threshold", "expansion_radius", "tokenizer", "gamma", "normalization_mode", "pin_core", "grid",
)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.captureWarnings(True)
    try:
        if args.config is not None and not Path(args.config).is_file():
            raise CommandError(f"config file not found: {args.config}", EXIT_USAGE)
        config = resolve_config(args.config, {k: getattr(args, k) for k in _OVERRIDES})
        if args.command == "build-core":
            return cmd_build_core(config)
        if args.command == "build-lexicon":
            return cmd_build_lexicon(config)
        if args.command == "evaluate":
            return cmd_evaluate(config)
        return cmd_export(config, args.lexicon, args.output)
    except CommandError as exc:
        print(f"sentilex: error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"sentilex: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, LexiconFormatError, textcat.ModelFormatError) as exc:
        print(f"sentilex: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"sentilex: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
