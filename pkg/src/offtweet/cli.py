"""Command-line interface.

Subcommands: ``preprocess``, ``build-dict``, ``train``, ``evaluate`` and
``predict``.  Settings come from built-in defaults, overridden by a
``KEY = VALUE`` config file (``--config``), overridden in turn by explicit
flags.  The effective configuration is echoed into every output artifact.

Exit codes: 0 success, 1 usage error, 2 data error (missing or malformed
files), 3 numerical failure during training or inference.
"""

import argparse
import multiprocessing
import os
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import container as containers
from . import report
from .data import (
    TASKS,
    atomic_write,
    hierarchical_filter,
    read_tsv,
    task_targets,
    write_predictions,
)
from .embeddings import build_vocab, init_learnt, load_glove
from .errors import DataError, NumericError
from .metrics import accuracy, confusion_matrix, macro_f1
from .models import VARIANTS, HyperParams, TweetClassifier, predicted_classes
from .spell import FrequencyDictionary, build_dictionary
from .textnorm import (
    CANONICAL_STAGES,
    Pipeline,
    PipelineConfig,
    pad_or_truncate,
    sentence_length_histogram,
)
from .training import TrainConfig, stratified_split, train
from .util import seed_sequence


class UsageError(Exception):
    """Invalid flag/config combinations detected after parsing."""


@dataclass(frozen=True)
class RunConfig:
    task: str = "A"
    variant: str = "bilstm"
    lr: float = 0.001
    lr_decay: float = 0.001
    epochs: int = 50
    batch_size: int = 32
    dropout: float = 0.5
    bidirectional: bool = True
    recurrent_units: int = 50
    embedding: str = "learnt"
    embedding_dim: int = 100
    pad_length: int = 50
    min_count: int = 1
    class_weights: bool = True
    weight_mode: str = "balanced"
    ma_window: int = 5
    patience: int = 10
    keep_negations: bool = True
    retrain_full: bool = False
    seed: int = 0


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


# config-file key -> (RunConfig attribute, parser)
CONFIG_KEYS = {
    "TASK": ("task", str),
    "VARIANT": ("variant", str),
    "LR": ("lr", float),
    "LR_DECAY": ("lr_decay", float),
    "EPOCHS": ("epochs", int),
    "BATCH_SIZE": ("batch_size", int),
    "DROPOUT": ("dropout", float),
    "BIDIRECTIONAL": ("bidirectional", _parse_bool),
    "RECURRENT_UNITS": ("recurrent_units", int),
    "EMBEDDING": ("embedding", str),
    "EMBEDDING_DIM": ("embedding_dim", int),
    "PAD_LENGTH": ("pad_length", int),
    "MIN_COUNT": ("min_count", int),
    "CLASS_WEIGHTS": ("class_weights", _parse_bool),
    "WEIGHT_MODE": ("weight_mode", str),
    "MA_WINDOW": ("ma_window", int),
    "PATIENCE": ("patience", int),
    "KEEP_NEGATIONS": ("keep_negations", _parse_bool),
    "RETRAIN_FULL": ("retrain_full", _parse_bool),
    "SEED": ("seed", int),
}


def parse_config_file(path: str) -> dict[str, str]:
    """Read ``KEY = VALUE`` lines; '#' starts a comment, blanks are skipped."""
    values: dict[str, str] = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read config file: {exc}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key or not value:
                raise UsageError(f"{path}: line {lineno}: expected 'KEY = VALUE'")
            if key not in CONFIG_KEYS:
                raise UsageError(f"{path}: line {lineno}: unknown key {key!r}")
            values[key] = value
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """defaults < config file < explicit flags."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, raw in parse_config_file(args.config).items():
            attr, parse = CONFIG_KEYS[key]
            try:
                cfg = replace(cfg, **{attr: parse(raw)})
            except ValueError as exc:
                raise UsageError(f"config key {key}: {exc}") from None
    for field in fields(RunConfig):
        value = getattr(args, field.name, None)
        if value is not None:
            cfg = replace(cfg, **{field.name: value})
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.task not in TASKS:
        raise UsageError(f"unknown task {cfg.task!r}; expected one of {TASKS}")
    if cfg.variant not in VARIANTS:
        raise UsageError(f"unknown variant {cfg.variant!r}; expected one of {VARIANTS}")
    if not cfg.embedding.startswith("glove:") and cfg.embedding != "learnt":
        raise UsageError("embedding must be 'learnt' or 'glove:<path>'")
    if cfg.weight_mode not in ("balanced", "inverse"):
        raise UsageError("weight mode must be 'balanced' or 'inverse'")
    for name in ("epochs", "batch_size", "recurrent_units", "embedding_dim",
                 "pad_length", "ma_window", "patience", "min_count"):
        if getattr(cfg, name) < 1:
            raise UsageError(f"{name} must be >= 1")
    if not 0.0 <= cfg.dropout < 1.0:
        raise UsageError("dropout must lie in [0, 1)")
    if cfg.lr <= 0 or cfg.lr_decay < 0:
        raise UsageError("learning rate must be positive and decay non-negative")


def config_dict(cfg: RunConfig) -> dict[str, str]:
    out = {}
    for key, (attr, _) in CONFIG_KEYS.items():
        value = getattr(cfg, attr)
        out[key] = repr(value) if isinstance(value, float) else str(value)
    return out


def echo_lines(cfg: RunConfig) -> list[str]:
    return [f"{key} = {value}" for key, value in config_dict(cfg).items()]


def _pipeline_config(cfg: RunConfig) -> PipelineConfig:
    return PipelineConfig(pad_length=cfg.pad_length, keep_negations=cfg.keep_negations)


def _load_dict(path: str | None) -> FrequencyDictionary | None:
    if path is None:
        return None
    if not os.path.exists(path):
        raise DataError(f"dictionary file not found: {path}")
    return FrequencyDictionary.load(path)


_WORKER_PIPELINE: Pipeline | None = None


def _init_worker(config, dictionary):
    global _WORKER_PIPELINE
    _WORKER_PIPELINE = Pipeline(config, dictionary)


def _worker_normalize(text: str) -> list[str]:
    return _WORKER_PIPELINE.normalize(text)


def _normalize_corpus(texts, pipeline, jobs: int):
    if jobs <= 1:
        return [pipeline.normalize(t) for t in texts]
    with multiprocessing.Pool(
        jobs, initializer=_init_worker, initargs=(pipeline.config, pipeline.dictionary)
    ) as pool:
        return pool.map(_worker_normalize, texts, chunksize=64)


# -- subcommands ----------------------------------------------------------------


def cmd_preprocess(args) -> int:
    cfg = resolve_config(args)
    tweets = read_tsv(args.input)
    dictionary = _load_dict(args.dict)
    pipeline = Pipeline(_pipeline_config(cfg), dictionary)
    normalized = _normalize_corpus([t.text for t in tweets], pipeline, args.jobs)
    os.makedirs(args.outdir, exist_ok=True)
    echo = echo_lines(cfg)
    with atomic_write(os.path.join(args.outdir, "normalized.txt")) as fh:
        for line in echo:
            fh.write(f"# {line}\n")
        for tokens in normalized:
            fh.write(" ".join(tokens) + "\n")
    hist = sentence_length_histogram(normalized)
    report.write_histogram_csv(hist, os.path.join(args.outdir, "length_histogram.csv"), echo)
    report.plot_histogram(hist, os.path.join(args.outdir, "length_histogram.png"))
    print(f"normalized {len(tweets)} tweets -> {args.outdir}")
    return 0


# stages that run before the dictionary exists (its build input)
_PRE_DICT_STAGES = tuple(
    s for s in CANONICAL_STAGES
    if s not in ("segment_words", "correct_spellings", "lemmatize", "pad_or_truncate")
)


def cmd_build_dict(args) -> int:
    cfg = resolve_config(args)
    if args.from_tokens:
        with open(args.input, encoding="utf-8") as fh:
            corpus = [line.split() for line in fh if not line.startswith("#")]
    else:
        tweets = read_tsv(args.input)
        pipe_cfg = PipelineConfig(
            pad_length=cfg.pad_length,
            keep_negations=cfg.keep_negations,
            stages=_PRE_DICT_STAGES,
        )
        pipeline = Pipeline(pipe_cfg)
        corpus = _normalize_corpus([t.text for t in tweets], pipeline, args.jobs)
    dictionary = build_dictionary(corpus, min_count=cfg.min_count)
    dictionary.save(args.output, comments=echo_lines(cfg))
    print(f"dictionary: {len(dictionary)} words, total count {dictionary.total_count}")
    return 0


def _prepare_inputs(tweets, pipeline, vocab, pad_length):
    rows = [
        vocab.indices(pad_or_truncate(pipeline.normalize(t.text), pad_length))
        for t in tweets
    ]
    return np.asarray(rows, dtype=np.int64)


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    tweets = hierarchical_filter(read_tsv(args.input), cfg.task)
    if len(tweets) < 2:
        raise DataError(f"not enough rows labeled for task {cfg.task}")
    dictionary = _load_dict(args.dict)
    dict_hash = containers.file_sha256(args.dict) if args.dict else None
    pipeline = Pipeline(_pipeline_config(cfg), dictionary)

    normalized = [pipeline.normalize(t.text) for t in tweets]
    vocab = build_vocab(normalized)
    x_all = np.asarray(
        [vocab.indices(pad_or_truncate(toks, cfg.pad_length)) for toks in normalized],
        dtype=np.int64,
    )
    y_all = np.asarray(task_targets(tweets, cfg.task), dtype=np.int64)

    seeds = seed_sequence(cfg.seed).spawn(4)
    if cfg.embedding.startswith("glove:"):
        glove_path = cfg.embedding[len("glove:") :]
        if not os.path.exists(glove_path):
            raise DataError(f"vector file not found: {glove_path}")
        matrix = load_glove(glove_path, vocab, cfg.embedding_dim, seed=seeds[0])
        print(f"vector coverage: {matrix.coverage:.3f}")
    else:
        matrix = init_learnt(vocab, cfg.embedding_dim, seed=seeds[0])

    hyper = HyperParams(
        pad_length=cfg.pad_length,
        embedding_dim=cfg.embedding_dim,
        recurrent_units=cfg.recurrent_units,
        dropout=cfg.dropout,
        bidirectional=cfg.bidirectional,
    )
    classifier = TweetClassifier(cfg.task, cfg.variant, vocab, matrix, hyper, seed=seeds[1])

    train_idx, val_idx = stratified_split(y_all, 0.8, seed=seeds[2])
    tcfg = TrainConfig(
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        learning_rate=cfg.lr,
        lr_decay=cfg.lr_decay,
        class_weighting=cfg.class_weights,
        weight_mode=cfg.weight_mode,
        ma_window=cfg.ma_window,
        patience=cfg.patience,
        seed=seeds[3],
        verbose=not args.quiet,
    )
    result = train(
        classifier, x_all[train_idx], y_all[train_idx], x_all[val_idx], y_all[val_idx], tcfg
    )

    val_preds = classifier.predict_classes(x_all[val_idx])
    cm = confusion_matrix(y_all[val_idx], val_preds, len(classifier.labels))

    if cfg.retrain_full:
        seeds2 = seed_sequence(cfg.seed).spawn(4)
        matrix2 = (
            load_glove(cfg.embedding[len("glove:") :], vocab, cfg.embedding_dim, seed=seeds2[0])
            if cfg.embedding.startswith("glove:")
            else init_learnt(vocab, cfg.embedding_dim, seed=seeds2[0])
        )
        classifier = TweetClassifier(
            cfg.task, cfg.variant, vocab, matrix2, hyper, seed=seeds2[1]
        )
        retrain_cfg = replace(
            tcfg, epochs=result.best_epoch, early_stopping=False, seed=seeds2[3]
        )
        if not args.quiet:
            print(f"retraining on all rows for {result.best_epoch} epochs")
        train(classifier, x_all, y_all, x_all[:0], y_all[:0], retrain_cfg)

    os.makedirs(args.outdir, exist_ok=True)
    echo = echo_lines(cfg)
    containers.save_classifier(
        os.path.join(args.outdir, "model.otm"), classifier, config_dict(cfg), dict_hash
    )
    report.write_history_csv(result.history, os.path.join(args.outdir, "history.csv"), echo)
    report.plot_history(result.history, os.path.join(args.outdir, "history.png"))
    report.write_report(
        cfg.variant, cfg.task, cm, classifier.labels,
        os.path.join(args.outdir, "report.txt"), echo,
    )
    report.write_confusion_csv(
        cm, classifier.labels, os.path.join(args.outdir, "confusion.csv"), echo
    )
    report.plot_confusion(cm, classifier.labels, os.path.join(args.outdir, "confusion.png"))
    print(
        f"best epoch {result.best_epoch}; validation macro F1 "
        f"{macro_f1(cm):.4f}, accuracy {accuracy(cm):.4f}"
    )
    return 0


def _load_model_and_pipeline(args):
    if not os.path.exists(args.model):
        raise DataError(f"model file not found: {args.model}")
    classifier, box = containers.load_classifier(args.model)
    dictionary = _load_dict(args.dict)
    if args.dict and box.dict_hash:
        actual = containers.file_sha256(args.dict)
        if actual != box.dict_hash:
            raise DataError(
                f"dictionary {args.dict} does not match the one used in training "
                f"(sha256 {actual[:12]}... != {box.dict_hash[:12]}...)"
            )
    elif box.dict_hash and not args.dict:
        print(
            "warning: model was trained with a dictionary; pass --dict for "
            "identical preprocessing",
            file=sys.stderr,
        )
    keep_neg = box.config.get("KEEP_NEGATIONS", "True") == "True"
    pipe_cfg = PipelineConfig(
        pad_length=classifier.hyper.pad_length, keep_negations=keep_neg
    )
    return classifier, box, Pipeline(pipe_cfg, dictionary)


def cmd_evaluate(args) -> int:
    classifier, box, pipeline = _load_model_and_pipeline(args)
    tweets = hierarchical_filter(read_tsv(args.input), classifier.task)
    if not tweets:
        raise DataError(f"no rows labeled for task {classifier.task}")
    x = _prepare_inputs(tweets, pipeline, classifier.vocab, classifier.hyper.pad_length)
    y = np.asarray(task_targets(tweets, classifier.task), dtype=np.int64)
    preds = classifier.predict_classes(x)
    cm = confusion_matrix(y, preds, len(classifier.labels))
    os.makedirs(args.outdir, exist_ok=True)
    echo = [f"{k} = {v}" for k, v in box.config.items()]
    report.write_report(
        classifier.variant, classifier.task, cm, classifier.labels,
        os.path.join(args.outdir, "report.txt"), echo,
    )
    report.write_confusion_csv(
        cm, classifier.labels, os.path.join(args.outdir, "confusion.csv"), echo
    )
    report.plot_confusion(cm, classifier.labels, os.path.join(args.outdir, "confusion.png"))
    print(f"macro F1 {macro_f1(cm):.4f}, accuracy {accuracy(cm):.4f} on {len(tweets)} rows")
    return 0


def cmd_predict(args) -> int:
    classifier, box, pipeline = _load_model_and_pipeline(args)
    tweets = read_tsv(args.input)
    x = _prepare_inputs(tweets, pipeline, classifier.vocab, classifier.hyper.pad_length)
    probs = classifier.predict_proba(x)
    classes = predicted_classes(probs)
    rows = []
    for i, tweet in enumerate(tweets):
        cls = int(classes[i])
        if probs.shape[1] == 1:
            p1 = float(probs[i, 0])
            prob = p1 if cls == 1 else 1.0 - p1
        else:
            prob = float(probs[i, cls])
        rows.append((tweet.id, classifier.labels[cls], prob))
    echo = [f"{k} = {v}" for k, v in box.config.items()]
    write_predictions(args.output, rows, echo)
    print(f"wrote {len(rows)} predictions to {args.output}")
    return 0


# -- parser ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; usage errors are 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_config_flags(sub, training: bool):
    sub.add_argument("--config", help="KEY = VALUE config file")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--pad-length", dest="pad_length", type=int)
    sub.add_argument("--min-count", dest="min_count", type=int)
    if training:
        sub.add_argument("--task", choices=TASKS)
        sub.add_argument("--variant", choices=VARIANTS)
        sub.add_argument("--lr", type=float)
        sub.add_argument("--lr-decay", dest="lr_decay", type=float)
        sub.add_argument("--epochs", type=int)
        sub.add_argument("--batch-size", dest="batch_size", type=int)
        sub.add_argument("--dropout", type=float)
        sub.add_argument("--recurrent-units", dest="recurrent_units", type=int)
        sub.add_argument("--embedding", help="'learnt' or 'glove:<path>'")
        sub.add_argument("--embedding-dim", dest="embedding_dim", type=int)
        sub.add_argument(
            "--no-class-weights", dest="class_weights", action="store_const", const=False
        )
        sub.add_argument("--weight-mode", dest="weight_mode", choices=("balanced", "inverse"))
        sub.add_argument("--ma-window", dest="ma_window", type=int)
        sub.add_argument("--patience", type=int)
        sub.add_argument(
            "--retrain-full", dest="retrain_full", action="store_const", const=True
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="offtweet", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("preprocess", parents=[], help="normalize tweets")
    p.add_argument("--input", required=True, help="dataset TSV")
    p.add_argument("--outdir", required=True)
    p.add_argument("--dict", help="frequency dictionary file")
    p.add_argument("--jobs", type=int, default=1)
    _add_config_flags(p, training=False)
    p.set_defaults(func=cmd_preprocess)

    p = commands.add_parser("build-dict", help="build a frequency dictionary")
    p.add_argument("--input", required=True, help="dataset TSV (or token file)")
    p.add_argument("--output", required=True)
    p.add_argument(
        "--from-tokens", action="store_true",
        help="input is already normalized, one tweet of space-joined tokens per line",
    )
    p.add_argument("--jobs", type=int, default=1)
    _add_config_flags(p, training=False)
    p.set_defaults(func=cmd_build_dict)

    p = commands.add_parser("train", help="train a classifier")
    p.add_argument("--input", required=True, help="labeled dataset TSV")
    p.add_argument("--outdir", required=True)
    p.add_argument("--dict", help="frequency dictionary file")
    p.add_argument("--quiet", action="store_true")
    _add_config_flags(p, training=True)
    p.set_defaults(func=cmd_train)

    p = commands.add_parser("evaluate", help="evaluate a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="labeled dataset TSV")
    p.add_argument("--outdir", required=True)
    p.add_argument("--dict", help="frequency dictionary file")
    p.set_defaults(func=cmd_evaluate)

    p = commands.add_parser("predict", help="label new tweets")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="dataset TSV (labels optional)")
    p.add_argument("--output", required=True, help="predictions TSV path")
    p.add_argument("--dict", help="frequency dictionary file")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"offtweet: error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"offtweet: data error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"offtweet: numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"offtweet: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
