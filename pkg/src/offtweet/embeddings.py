"""Vocabulary construction and word-embedding matrices.

Index 0 is the padding token and index 1 the unknown-word token; remaining
indices are assigned by descending corpus frequency (ties lexicographic).
Row 0 of every embedding matrix is all zeros and stays frozen during
training.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DataError
from .textnorm import PAD_TOKEN
from .util import seed_sequence

UNK_TOKEN = "<unk>"
PAD_INDEX = 0
UNK_INDEX = 1


@dataclass(frozen=True)
class Vocabulary:
    """Bidirectional token/index mapping with reserved pad and unk slots."""

    words: tuple[str, ...]
    _lookup: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.words[:2] != (PAD_TOKEN, UNK_TOKEN):
            raise ValueError(f"words must start with {PAD_TOKEN!r}, {UNK_TOKEN!r}")
        lookup = {w: i for i, w in enumerate(self.words)}
        if len(lookup) != len(self.words):
            raise ValueError("duplicate words in vocabulary")
        object.__setattr__(self, "_lookup", lookup)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._lookup

    def index(self, word: str) -> int:
        return self._lookup.get(word, UNK_INDEX)

    def indices(self, tokens: Iterable[str]) -> list[int]:
        return [self._lookup.get(t, UNK_INDEX) for t in tokens]


def build_vocab(corpus: Iterable[list[str]], min_count: int = 1) -> Vocabulary:
    """Vocabulary over a normalized corpus, most frequent words first."""
    counter: Counter[str] = Counter()
    for tokens in corpus:
        counter.update(tokens)
    counter.pop(PAD_TOKEN, None)
    counter.pop(UNK_TOKEN, None)
    ranked = sorted(
        (w for w, c in counter.items() if c >= min_count),
        key=lambda w: (-counter[w], w),
    )
    return Vocabulary((PAD_TOKEN, UNK_TOKEN, *ranked))


@dataclass
class EmbeddingMatrix:
    """Dense (V, D) float32 embedding table; row 0 is the frozen pad row."""

    weights: np.ndarray
    trainable: bool = True
    coverage: float | None = None

    def __post_init__(self):
        if self.weights.ndim != 2:
            raise ValueError("weights must be 2-D")
        if self.weights.dtype != np.float32:
            self.weights = self.weights.astype(np.float32)
        if np.any(self.weights[PAD_INDEX] != 0.0):
            raise ValueError("pad row must be all zeros")

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


def init_learnt(vocab: Vocabulary, dim: int, seed=0) -> EmbeddingMatrix:
    """Random uniform(-0.05, 0.05) embeddings, trained from scratch."""
    rng = np.random.default_rng(seed_sequence(seed))
    weights = rng.uniform(-0.05, 0.05, size=(len(vocab), dim)).astype(np.float32)
    weights[PAD_INDEX] = 0.0
    return EmbeddingMatrix(weights, trainable=True)


def load_glove(
    path: str,
    vocab: Vocabulary,
    dim: int,
    trainable: bool = True,
    unk_random: bool = False,
    seed=0,
) -> EmbeddingMatrix:
    """Stream a GloVe-style text file into an embedding matrix.

    Rows for words absent from the file stay at zero (or uniform(-0.05, 0.05)
    when `unk_random`).  The returned matrix records the fraction of
    non-reserved vocabulary words that were found.
    """
    if unk_random:
        rng = np.random.default_rng(seed_sequence(seed))
        weights = rng.uniform(-0.05, 0.05, size=(len(vocab), dim)).astype(np.float32)
        weights[PAD_INDEX] = 0.0
    else:
        weights = np.zeros((len(vocab), dim), dtype=np.float32)
    found: set[int] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\n").split(" ")
            if len(fields) < 2:
                raise DataError(f"{path}: line {lineno}: not a vector line")
            word, values = fields[0], fields[1:]
            if len(values) != dim:
                raise DataError(
                    f"{path}: line {lineno}: expected {dim} components, got {len(values)}"
                )
            if word not in vocab:
                continue
            idx = vocab.index(word)
            if idx in (PAD_INDEX, UNK_INDEX):
                continue
            try:
                weights[idx] = np.asarray([float(v) for v in values], dtype=np.float32)
            except ValueError:
                raise DataError(f"{path}: line {lineno}: non-numeric component") from None
            found.add(idx)
    coverage = len(found) / max(len(vocab) - 2, 1)
    return EmbeddingMatrix(weights, trainable=trainable, coverage=coverage)


def embed(tokens: list[str], vocab: Vocabulary, matrix: EmbeddingMatrix) -> np.ndarray:
    """Embed a token sequence into a (len(tokens), D) float32 array."""
    return matrix.weights[np.asarray(vocab.indices(tokens), dtype=np.int64)]
