"""The four recurrent classifier architectures.

Every variant takes a (B, p, D) batch of embedded tweets, applies spatial
dropout to the embedding rows, and ends in a sigmoid unit (binary head,
tasks A/B) or a 3-way softmax (ternary head, task C):

    bilstm        dropout -> biLSTM -> head
    cnn-bilstm    dropout -> conv -> maxpool -> biLSTM -> head
    bilstm-cnn    dropout -> biLSTM (sequences) -> conv -> global max -> head
    bigru-bilstm  dropout -> {biLSTM -> conv, biGRU -> conv},
                  each branch global max + global average pooled,
                  four vectors concatenated -> head

Layer output shapes are derived and asserted when the graph is built, and
every forward pass verifies that each layer produced finite values.
"""

from dataclasses import dataclass, replace

import numpy as np

from .data import TASK_LABELS, TASKS
from .embeddings import EmbeddingMatrix, Vocabulary
from .errors import NumericError
from .neural.layers import (
    Conv1D,
    Dense,
    Embedding,
    GlobalAvgPool1D,
    GlobalMaxPool1D,
    MaxPool1D,
    SpatialDropout,
)
from .neural.recurrent import GRU, LSTM, Bidirectional
from .util import seed_sequence

VARIANTS = ("bilstm", "cnn-bilstm", "bilstm-cnn", "bigru-bilstm")
HEADS = ("binary", "ternary")


@dataclass(frozen=True)
class HyperParams:
    """Architecture hyperparameters (defaults follow the reference setup)."""

    pad_length: int = 50
    embedding_dim: int = 100
    recurrent_units: int = 50
    dropout: float = 0.5
    bidirectional: bool = True
    conv_filters: int = 64
    conv_kernel: int = 4
    pool_size: int = 4
    pool_stride: int = 4

    def __post_init__(self):
        if self.pad_length < 1 or self.embedding_dim < 1 or self.recurrent_units < 1:
            raise ValueError("dimensions must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")


def head_for_task(task: str) -> str:
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    return "ternary" if task == "C" else "binary"


class ModelGraph:
    """One architecture variant operating on embedded input batches."""

    def __init__(
        self,
        variant: str,
        head: str,
        hyper: HyperParams | None = None,
        seed=0,
        dtype=np.float32,
    ):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        if head not in HEADS:
            raise ValueError(f"unknown head {head!r}; expected one of {HEADS}")
        self.variant = variant
        self.head = head
        self.hyper = hyper = hyper or HyperParams()
        self.dtype = dtype
        self.output_dim = 1 if head == "binary" else 3

        seq = seed_sequence(seed)
        init_rng = np.random.default_rng(seq.spawn(1)[0])
        dropout_rng = np.random.default_rng(seq.spawn(1)[0])

        self.dropout = SpatialDropout(hyper.dropout, dropout_rng, name="dropout")
        width = 2 * hyper.recurrent_units if hyper.bidirectional else hyper.recurrent_units

        def recurrent(cls, in_dim, return_sequences, name):
            if not hyper.bidirectional:
                return cls(in_dim, hyper.recurrent_units, return_sequences,
                           init_rng, dtype, name=name)
            return Bidirectional(
                cls(in_dim, hyper.recurrent_units, return_sequences,
                    init_rng, dtype, name=f"{name}_f"),
                cls(in_dim, hyper.recurrent_units, return_sequences,
                    init_rng, dtype, name=f"{name}_b"),
                name=name,
            )

        def conv(in_channels, name):
            return Conv1D(in_channels, hyper.conv_filters, hyper.conv_kernel,
                          "relu", init_rng, dtype, name=name)

        def conv_length(t_in, name):
            t_out = t_in - hyper.conv_kernel + 1
            if t_out < 1:
                raise ValueError(
                    f"{variant}: {name} input length {t_in} shorter than "
                    f"kernel {hyper.conv_kernel}"
                )
            return t_out

        p = hyper.pad_length
        if variant == "bilstm":
            self.rnn = recurrent(LSTM, hyper.embedding_dim, False, "bilstm")
            head_width = width
        elif variant == "cnn-bilstm":
            self.conv = conv(hyper.embedding_dim, "conv")
            self.conv_len = conv_length(p, "conv")
            pooled = (self.conv_len - hyper.pool_size) // hyper.pool_stride + 1
            if pooled < 1:
                raise ValueError(
                    f"{variant}: conv output {self.conv_len} shorter than "
                    f"pool {hyper.pool_size}"
                )
            self.pooled_len = pooled
            self.pool = MaxPool1D(hyper.pool_size, hyper.pool_stride, name="maxpool")
            self.rnn = recurrent(LSTM, hyper.conv_filters, False, "bilstm")
            head_width = width
        elif variant == "bilstm-cnn":
            self.rnn = recurrent(LSTM, hyper.embedding_dim, True, "bilstm")
            self.conv = conv(width, "conv")
            self.conv_len = conv_length(p, "conv")
            self.gmp = GlobalMaxPool1D(name="gmp")
            head_width = hyper.conv_filters
        else:  # bigru-bilstm
            self.rnn = recurrent(LSTM, hyper.embedding_dim, True, "bilstm")
            self.rnn_g = recurrent(GRU, hyper.embedding_dim, True, "bigru")
            self.conv = conv(width, "conv_lstm")
            self.conv_g = conv(width, "conv_gru")
            self.conv_len = conv_length(p, "conv")
            self.gmp = GlobalMaxPool1D(name="gmp_lstm")
            self.gap = GlobalAvgPool1D(name="gap_lstm")
            self.gmp_g = GlobalMaxPool1D(name="gmp_gru")
            self.gap_g = GlobalAvgPool1D(name="gap_gru")
            head_width = 4 * hyper.conv_filters
        self.head_width = head_width
        activation = "sigmoid" if head == "binary" else "softmax"
        self.out = Dense(head_width, self.output_dim, activation, init_rng, dtype, name="head")

    # -- bookkeeping ---------------------------------------------------------

    def layers(self):
        """All leaf layers in a fixed order."""
        out = [self.dropout]
        for attr in ("conv", "rnn", "pool", "rnn_g", "conv_g",
                     "gmp", "gap", "gmp_g", "gap_g"):
            layer = getattr(self, attr, None)
            if layer is None:
                continue
            if isinstance(layer, Bidirectional):
                out.extend(layer.children)
            else:
                out.append(layer)
        out.append(self.out)
        return out

    def named_params(self) -> dict[str, np.ndarray]:
        return {
            f"{layer.name}.{key}": value
            for layer in self.layers()
            for key, value in layer.params.items()
        }

    def named_grads(self) -> dict[str, np.ndarray]:
        return {
            f"{layer.name}.{key}": value
            for layer in self.layers()
            for key, value in layer.grads.items()
        }

    def zero_grads(self) -> None:
        for layer in self.layers():
            layer.zero_grads()

    def _finite(self, name: str, arr: np.ndarray) -> np.ndarray:
        if not np.isfinite(arr).all():
            raise NumericError(f"non-finite values in output of layer {name!r}")
        return arr

    # -- forward / backward ---------------------------------------------------

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        hyper = self.hyper
        if x.ndim != 3 or x.shape[1] != hyper.pad_length or x.shape[2] != hyper.embedding_dim:
            raise ValueError(
                f"expected (B, {hyper.pad_length}, {hyper.embedding_dim}) input, "
                f"got {x.shape}"
            )
        fin = self._finite
        h = fin("dropout", self.dropout.forward(x, training))
        if self.variant == "bilstm":
            h = fin("bilstm", self.rnn.forward(h, training))
        elif self.variant == "cnn-bilstm":
            h = fin("conv", self.conv.forward(h, training))
            h = fin("maxpool", self.pool.forward(h, training))
            h = fin("bilstm", self.rnn.forward(h, training))
        elif self.variant == "bilstm-cnn":
            h = fin("bilstm", self.rnn.forward(h, training))
            h = fin("conv", self.conv.forward(h, training))
            h = fin("gmp", self.gmp.forward(h, training))
        else:
            seq_l = fin("bilstm", self.rnn.forward(h, training))
            seq_g = fin("bigru", self.rnn_g.forward(h, training))
            conv_l = fin("conv_lstm", self.conv.forward(seq_l, training))
            conv_g = fin("conv_gru", self.conv_g.forward(seq_g, training))
            h = np.concatenate(
                [
                    self.gmp.forward(conv_l, training),
                    self.gap.forward(conv_l, training),
                    self.gmp_g.forward(conv_g, training),
                    self.gap_g.forward(conv_g, training),
                ],
                axis=1,
            )
            fin("concat", h)
        assert h.shape[-1] == self.head_width
        return fin("head", self.out.forward(h, training))

    def backward(self, dpred: np.ndarray) -> np.ndarray:
        d = self.out.backward(dpred)
        if self.variant == "bilstm":
            d = self.rnn.backward(d)
        elif self.variant == "cnn-bilstm":
            d = self.rnn.backward(d)
            d = self.pool.backward(d)
            d = self.conv.backward(d)
        elif self.variant == "bilstm-cnn":
            d = self.gmp.backward(d)
            d = self.conv.backward(d)
            d = self.rnn.backward(d)
        else:
            f = self.hyper.conv_filters
            d_conv_l = self.gmp.backward(d[:, :f]) + self.gap.backward(d[:, f : 2 * f])
            d_conv_g = self.gmp_g.backward(d[:, 2 * f : 3 * f]) + self.gap_g.backward(
                d[:, 3 * f :]
            )
            d = self.rnn.backward(self.conv.backward(d_conv_l))
            d = d + self.rnn_g.backward(self.conv_g.backward(d_conv_g))
        return self.dropout.backward(d)


def build(
    variant: str,
    head: str,
    hyper: HyperParams | None = None,
    seed=0,
    dtype=np.float32,
) -> ModelGraph:
    """Construct a model graph; shape arithmetic is validated here."""
    return ModelGraph(variant, head, hyper, seed, dtype)


class TweetClassifier:
    """Vocabulary + embedding table + model graph for one subtask.

    The head is chosen by the task (binary for A/B, ternary for C), which
    keeps the label set and the output layer consistent by construction.
    """

    def __init__(
        self,
        task: str,
        variant: str,
        vocab: Vocabulary,
        matrix: EmbeddingMatrix,
        hyper: HyperParams | None = None,
        seed=0,
    ):
        if task not in TASKS:
            raise ValueError(f"unknown task {task!r}")
        hyper = hyper or HyperParams()
        if matrix.dim != hyper.embedding_dim:
            hyper = replace(hyper, embedding_dim=matrix.dim)
        if matrix.weights.shape[0] != len(vocab):
            raise ValueError("embedding rows do not match vocabulary size")
        self.task = task
        self.labels = TASK_LABELS[task]
        self.vocab = vocab
        self.embedding = Embedding(matrix.weights, matrix.trainable, name="embedding")
        self.trainable_embedding = matrix.trainable
        self.graph = build(variant, head_for_task(task), hyper, seed)
        self.hyper = self.graph.hyper

    @property
    def variant(self) -> str:
        return self.graph.variant

    def forward(self, idx: np.ndarray, training: bool = False) -> np.ndarray:
        """Probabilities for a (B, p) batch of token indices."""
        x = self.embedding.forward(idx, training)
        return self.graph.forward(x, training)

    def backward(self, dpred: np.ndarray) -> None:
        dx = self.graph.backward(dpred)
        self.embedding.backward(dx)

    def predict_proba(self, idx: np.ndarray, batch_size: int = 256) -> np.ndarray:
        """Inference in batches; dropout disabled."""
        chunks = [
            self.forward(idx[i : i + batch_size])
            for i in range(0, idx.shape[0], batch_size)
        ]
        return np.concatenate(chunks, axis=0)

    def predict_classes(self, idx: np.ndarray, batch_size: int = 256) -> np.ndarray:
        return predicted_classes(self.predict_proba(idx, batch_size))

    def named_params(self) -> dict[str, np.ndarray]:
        """Trainable parameters (embedding included only when trainable)."""
        params = dict(self.graph.named_params())
        if self.trainable_embedding:
            params["embedding.E"] = self.embedding.params["E"]
        return params

    def named_grads(self) -> dict[str, np.ndarray]:
        grads = dict(self.graph.named_grads())
        if self.trainable_embedding:
            grads["embedding.E"] = self.embedding.grads["E"]
        return grads

    def named_tensors(self) -> dict[str, np.ndarray]:
        """Every tensor needed to reproduce inference (for serialization)."""
        tensors = {"embedding.E": self.embedding.weights}
        tensors.update(self.graph.named_params())
        return tensors

    def zero_grads(self) -> None:
        self.graph.zero_grads()
        self.embedding.zero_grads()


def predicted_classes(probs: np.ndarray) -> np.ndarray:
    """Class indices from probabilities: 0.5 threshold for the binary head
    (ties go to class 1), first-index argmax for the ternary head."""
    if probs.ndim == 2 and probs.shape[1] > 1:
        return probs.argmax(axis=1)
    return (np.reshape(probs, -1) >= 0.5).astype(np.int64)
