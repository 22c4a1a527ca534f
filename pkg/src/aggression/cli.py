"""Command-line driver: ``train``, ``eval``, ``predict`` and ``baseline``.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import shutil
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baseline, evaluation, modelio
from .corpus import (
    CLASS_NAMES,
    DatasetError,
    build_vocab,
    class_histogram,
    encode,
    load_dataset,
    stratified_split,
)
from .model import ModelConfig, init_params, predict_indices, train
from .numerics import Rng, derive_seed
from .preprocess import PreprocessOptions, feature_tokens, preprocess_pipeline

log = logging.getLogger("aggression")

MODEL_FILE = "model.agrm"

# Each preset names only the fields it fixes.
VARIANTS: dict[str, dict] = {
    "eng-a": {"max_len": 45, "dropout_rate": 0.2},
    "eng-b": {"max_len": None, "dropout_rate": 0.3},
    "hi-a": {"max_len": None, "dropout_rate": 0.3},
    "custom": {},
}

# flag dest -> ModelConfig field
_MODEL_FLAGS = {
    "embed_dim": "embed_dim",
    "hidden_dim": "hidden_dim",
    "dropout": "dropout_rate",
    "lr": "learning_rate",
    "max_len": "max_len",
    "epochs": "epochs",
    "patience": "patience",
    "seed": "seed",
    "init_scale": "init_scale",
    "min_freq": "min_freq",
    "clip_norm": "clip_norm",
}


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    variant: str = "custom"
    train_path: str | None = None
    dev_path: str | None = None
    dev_fraction: float = 0.1
    out_dir: str = "."

    @classmethod
    def resolve(cls, variant: str, overrides: dict, **paths) -> "RunConfig":
        """Preset first, then every explicitly given flag on top."""
        if variant not in VARIANTS:
            raise CliError(f"unknown variant {variant!r}")
        values = dict(VARIANTS[variant])
        values.update({k: v for k, v in overrides.items() if v is not None})
        if overrides.get("no_max_len"):
            values["max_len"] = None
        values.pop("no_max_len", None)
        return cls(ModelConfig(**values), variant, **paths)


def _model_overrides(args) -> dict:
    out = {field_name: getattr(args, flag) for flag, field_name in _MODEL_FLAGS.items()}
    out["no_max_len"] = args.no_max_len
    return out


def _load(path, options=None):
    try:
        return load_dataset(path, options=options)
    except DatasetError as exc:
        raise CliError(str(exc)) from exc


def _load_model(path) -> modelio.SavedModel:
    try:
        return modelio.load_model(path)
    except (modelio.CorruptModelError, modelio.ModelVersionError) as exc:
        raise CliError(f"corrupt model: {exc}") from exc
    except modelio.ModelFileError as exc:
        raise CliError(f"cannot load model: {exc}") from exc


def _options(meta: dict[str, str]) -> PreprocessOptions:
    return PreprocessOptions(lemmatize=meta.get("lemmatize", "1") == "1")


def cmd_train(args) -> int:
    run = RunConfig.resolve(
        args.variant,
        _model_overrides(args),
        train_path=args.train,
        dev_path=args.dev,
        dev_fraction=args.dev_fraction,
        out_dir=args.out,
    )
    cfg = run.model
    out = Path(run.out_dir)
    created_dir = not out.exists()
    written: list[Path] = []
    try:
        examples = _load(run.train_path)
        if not examples:
            raise CliError(f"{run.train_path}: no usable rows")
        if run.dev_path:
            train_ex, dev_ex = examples, _load(run.dev_path)
        else:
            try:
                train_ex, dev_ex = stratified_split(examples, run.dev_fraction, derive_seed(cfg.seed, 2))
            except ValueError as exc:
                raise CliError(str(exc)) from exc
        vocab = build_vocab(train_ex, cfg.min_freq)

        def enc(data):
            return [(encode(e.tokens, vocab, cfg.max_len), int(e.label)) for e in data]

        params = init_params(len(vocab), cfg, Rng(cfg.seed))
        params, history = train(params, cfg, enc(train_ex), enc(dev_ex), Rng(derive_seed(cfg.seed, 1)))

        out.mkdir(parents=True, exist_ok=True)
        meta = {"variant": run.variant, "lemmatize": "1", "train_file": Path(run.train_path).name}
        written.append(modelio.save_model(out / MODEL_FILE, params, vocab, cfg, meta))

        log_path = out / "epoch_log.csv"
        written.append(log_path)
        with open(log_path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "train_loss", "dev_weighted_f1"])
            for rec in history:
                w.writerow([rec.epoch, repr(rec.train_loss), repr(rec.dev_weighted_f1)])

        n_tokens = sum(len(e.tokens) for e in train_ex)
        n_unk = sum(1 for e in train_ex for t in e.tokens if t not in vocab)
        stats_path = out / "vocab_stats.txt"
        written.append(stats_path)
        with open(stats_path, "w", encoding="utf-8") as fh:
            fh.write(f"vocab_size={len(vocab)}\n")
            fh.write(f"train_examples={len(train_ex)}\n")
            fh.write(f"dev_examples={len(dev_ex)}\n")
            fh.write(f"train_tokens={n_tokens}\n")
            fh.write(f"train_unk_tokens={n_unk}\n")
            for name, count in class_histogram(train_ex).items():
                fh.write(f"train.{name}={count}\n")
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        if created_dir and out.exists():
            shutil.rmtree(out, ignore_errors=True)
        raise
    best = max((r.dev_weighted_f1 for r in history), default=float("nan"))
    print(f"model={out / MODEL_FILE} epochs={len(history)} best_dev_weighted_f1={best!r}")
    return 0


def _score_and_report(ids, gold, pred, probs, out: Path, args) -> None:
    matrix = evaluation.confusion(gold, pred)
    report = evaluation.weighted_f1(matrix)
    evaluation.emit_report(report, matrix, out, svg=getattr(args, "svg", False))
    evaluation.write_predictions(out / "predictions.csv", ids, gold, pred, probs)
    print(f"weighted_f1={report.weighted_f1!r}")
    if getattr(args, "random_baseline", False):
        print(f"random_baseline={evaluation.random_baseline(gold, args.seed, args.trials)!r}")


def cmd_eval(args) -> int:
    saved = _load_model(args.model)
    examples = _load(args.test, _options(saved.meta))
    if not examples:
        raise CliError(f"{args.test}: no usable rows")
    ids, gold, pred, probs = [], [], [], []
    for ex in examples:
        label, p = predict_indices(saved.params, saved.config, encode(ex.tokens, saved.vocab, saved.config.max_len))
        ids.append(ex.id)
        gold.append(int(ex.label))
        pred.append(label)
        probs.append(p)
    _score_and_report(ids, gold, pred, probs, Path(args.out), args)
    return 0


def _read_unlabeled(path) -> list[str]:
    texts = []
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    with fh:
        for row in csv.reader(fh):
            if not row:
                continue
            texts.append(row[0] if len(row) == 1 else row[1])
    return texts


def cmd_predict(args) -> int:
    saved = _load_model(args.model)
    texts = [args.text] if args.text is not None else _read_unlabeled(args.input)
    opts = _options(saved.meta)
    for text in texts:
        tokens = preprocess_pipeline(text, opts)
        label, p = predict_indices(saved.params, saved.config, encode(tokens, saved.vocab, saved.config.max_len))
        print("\t".join([CLASS_NAMES[label], *(repr(float(x)) for x in p)]))
    return 0


def cmd_baseline(args) -> int:
    try:
        lexicon = baseline.load_lexicon(args.pos_lexicon, args.neg_lexicon)
    except FileNotFoundError as exc:
        raise CliError(str(exc)) from exc
    train_ex, test_ex = _load(args.train), _load(args.test)
    if not train_ex or not test_ex:
        raise CliError("baseline needs non-empty train and test sets")

    def featurize(data):
        return np.stack([baseline.extract_features(feature_tokens(e.raw_text), lexicon) for e in data])

    cfg = baseline.ForestConfig(
        num_trees=args.num_trees,
        max_depth=args.max_depth,
        min_leaf=args.min_leaf,
        features_per_split=args.features_per_split,
    )
    try:
        forest = baseline.train_forest(featurize(train_ex), [int(e.label) for e in train_ex], cfg, args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    X = featurize(test_ex)
    preds = [baseline.forest_predict(forest, x) for x in X]
    _score_and_report(
        [e.id for e in test_ex],
        [int(e.label) for e in test_ex],
        [int(lbl) for lbl, _ in preds],
        [p for _, p in preds],
        Path(args.out),
        args,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aggression", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the LSTM-attention classifier")
    p.add_argument("--train", required=True, help="training CSV (id,text,label)")
    p.add_argument("--dev", help="dev CSV; default: stratified split of --train")
    p.add_argument("--dev-fraction", type=float, default=0.1)
    p.add_argument("--variant", choices=sorted(VARIANTS), default="custom")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--embed-dim", type=int)
    p.add_argument("--hidden-dim", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--max-len", type=int)
    p.add_argument("--no-max-len", action="store_true", help="disable truncation even if the variant sets it")
    p.add_argument("--epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--init-scale", type=float)
    p.add_argument("--min-freq", type=int)
    p.add_argument("--clip-norm", type=float)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a saved model on a labelled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--svg", action="store_true", help="also write confusion.svg")
    p.add_argument("--random-baseline", action="store_true")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0, help="seed for the random baseline")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="classify single posts")
    p.add_argument("--model", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--in", dest="input", help="CSV of id,text (or a single text column)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("baseline", help="random-forest baseline on hand-crafted features")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--pos-lexicon", required=True)
    p.add_argument("--neg-lexicon", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--num-trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--min-leaf", type=int, default=2)
    p.add_argument("--features-per-split", type=int, default=3)
    p.add_argument("--svg", action="store_true")
    p.add_argument("--random-baseline", action="store_true")
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
