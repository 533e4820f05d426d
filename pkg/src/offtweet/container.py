"""Single-file model container.

Layout: a text header (magic line, ``[config]`` key/value lines, ``[vocab]``
word list, ``[dictionary]`` hash, ``[tensors]`` name/shape table) followed by
a ``[data]`` marker and the raw little-endian float32 tensor blocks in table
order.  Save/load round-trips are bit-exact.
"""

import hashlib

import numpy as np

from .data import atomic_write
from .embeddings import EmbeddingMatrix, Vocabulary
from .errors import DataError
from .models import HyperParams, TweetClassifier

MAGIC = b"OFTW1"
_STRUCTURAL_DEFAULTS = {
    "CONV_FILTERS": "64",
    "CONV_KERNEL": "4",
    "POOL_SIZE": "4",
    "POOL_STRIDE": "4",
}


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def save_container(
    path: str,
    config: dict[str, str],
    words: tuple[str, ...],
    tensors: dict[str, np.ndarray],
    dict_hash: str | None = None,
) -> None:
    lines = [MAGIC.decode(), "[config]"]
    lines += [f"{key} = {value}" for key, value in config.items()]
    lines.append("[vocab]")
    lines.append(str(len(words)))
    lines.extend(words)
    lines.append("[dictionary]")
    lines.append(dict_hash or "NONE")
    lines.append("[tensors]")
    lines.append(str(len(tensors)))
    blocks = []
    for name, arr in tensors.items():
        if arr.dtype != np.float32:
            raise ValueError(f"tensor {name!r} must be float32, got {arr.dtype}")
        dims = " ".join(str(d) for d in arr.shape)
        lines.append(f"{name} {arr.ndim} {dims}".rstrip())
        blocks.append(arr.astype("<f4", copy=False).tobytes(order="C"))
    lines.append("[data]")
    header = ("\n".join(lines) + "\n").encode("utf-8")
    with atomic_write(path, "wb") as fh:
        fh.write(header)
        for block in blocks:
            fh.write(block)


class Container:
    def __init__(self, config, words, dict_hash, tensors):
        self.config: dict[str, str] = config
        self.words: tuple[str, ...] = words
        self.dict_hash: str | None = dict_hash
        self.tensors: dict[str, np.ndarray] = tensors


def load_container(path: str) -> Container:
    with open(path, "rb") as fh:
        raw = fh.read()
    marker = b"[data]\n"
    split = raw.find(marker)
    if not raw.startswith(MAGIC + b"\n") or split < 0:
        raise DataError(f"{path}: not a model container")
    header = raw[: split].decode("utf-8").splitlines()
    payload = raw[split + len(marker) :]

    pos = 1  # skip magic
    if header[pos] != "[config]":
        raise DataError(f"{path}: missing [config] section")
    pos += 1
    config: dict[str, str] = {}
    while pos < len(header) and header[pos] != "[vocab]":
        key, sep, value = header[pos].partition("=")
        if not sep:
            raise DataError(f"{path}: bad config line {header[pos]!r}")
        config[key.strip()] = value.strip()
        pos += 1

    def expect(tag):
        nonlocal pos
        if pos >= len(header) or header[pos] != tag:
            raise DataError(f"{path}: missing {tag} section")
        pos += 1

    expect("[vocab]")
    count = int(header[pos]); pos += 1
    words = tuple(header[pos : pos + count]); pos += count
    expect("[dictionary]")
    dict_hash = header[pos]; pos += 1
    dict_hash = None if dict_hash == "NONE" else dict_hash
    expect("[tensors]")
    tcount = int(header[pos]); pos += 1
    specs = []
    for _ in range(tcount):
        fields = header[pos].split(" "); pos += 1
        name, ndim = fields[0], int(fields[1])
        shape = tuple(int(d) for d in fields[2 : 2 + ndim])
        if len(shape) != ndim:
            raise DataError(f"{path}: bad tensor line for {name!r}")
        specs.append((name, shape))

    tensors: dict[str, np.ndarray] = {}
    offset = 0
    for name, shape in specs:
        size = int(np.prod(shape, dtype=np.int64)) if shape else 1
        nbytes = size * 4
        block = payload[offset : offset + nbytes]
        if len(block) != nbytes:
            raise DataError(f"{path}: truncated data for tensor {name!r}")
        tensors[name] = np.frombuffer(block, dtype="<f4").reshape(shape).copy()
        offset += nbytes
    if offset != len(payload):
        raise DataError(f"{path}: {len(payload) - offset} trailing bytes")
    return Container(config, words, dict_hash, tensors)


def save_classifier(
    path: str,
    classifier: TweetClassifier,
    config: dict[str, str] | None = None,
    dict_hash: str | None = None,
) -> None:
    """Persist a classifier; structural keys are filled in automatically so
    the container alone is enough to rebuild the model."""
    hyper = classifier.hyper
    full = dict(config or {})
    full.update(
        {
            "TASK": classifier.task,
            "VARIANT": classifier.variant,
            "PAD_LENGTH": str(hyper.pad_length),
            "EMBEDDING_DIM": str(hyper.embedding_dim),
            "RECURRENT_UNITS": str(hyper.recurrent_units),
            "DROPOUT": repr(hyper.dropout),
            "BIDIRECTIONAL": str(hyper.bidirectional),
            "CONV_FILTERS": str(hyper.conv_filters),
            "CONV_KERNEL": str(hyper.conv_kernel),
            "POOL_SIZE": str(hyper.pool_size),
            "POOL_STRIDE": str(hyper.pool_stride),
            "EMBEDDING_TRAINABLE": str(classifier.trainable_embedding),
        }
    )
    save_container(path, full, classifier.vocab.words, classifier.named_tensors(), dict_hash)


def load_classifier(path: str) -> tuple[TweetClassifier, Container]:
    """Rebuild a classifier from a container file."""
    box = load_container(path)
    cfg = dict(_STRUCTURAL_DEFAULTS)
    cfg.update(box.config)
    try:
        hyper = HyperParams(
            pad_length=int(cfg["PAD_LENGTH"]),
            embedding_dim=int(cfg["EMBEDDING_DIM"]),
            recurrent_units=int(cfg["RECURRENT_UNITS"]),
            dropout=float(cfg["DROPOUT"]),
            bidirectional=cfg["BIDIRECTIONAL"] == "True",
            conv_filters=int(cfg["CONV_FILTERS"]),
            conv_kernel=int(cfg["CONV_KERNEL"]),
            pool_size=int(cfg["POOL_SIZE"]),
            pool_stride=int(cfg["POOL_STRIDE"]),
        )
        task = cfg["TASK"]
        variant = cfg["VARIANT"]
        trainable = cfg.get("EMBEDDING_TRAINABLE", "True") == "True"
    except KeyError as exc:
        raise DataError(f"{path}: config missing key {exc}") from None
    vocab = Vocabulary(box.words)
    emb = box.tensors.get("embedding.E")
    if emb is None:
        raise DataError(f"{path}: missing embedding tensor")
    matrix = EmbeddingMatrix(emb, trainable=trainable)
    classifier = TweetClassifier(task, variant, vocab, matrix, hyper, seed=0)
    current = classifier.named_tensors()
    for name, arr in box.tensors.items():
        if name not in current:
            raise DataError(f"{path}: unexpected tensor {name!r}")
        if current[name].shape != arr.shape:
            raise DataError(
                f"{path}: tensor {name!r} has shape {arr.shape}, expected "
                f"{current[name].shape}"
            )
        current[name][...] = arr
    return classifier, box
