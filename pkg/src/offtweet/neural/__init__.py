"""Batched numpy neural network core with explicit backward passes."""

from .layers import (
    Conv1D,
    Dense,
    Embedding,
    GlobalAvgPool1D,
    GlobalMaxPool1D,
    Layer,
    MaxPool1D,
    SpatialDropout,
    glorot_uniform,
    he_uniform,
    orthogonal,
    relu,
    sigmoid,
    softmax,
)
from .losses import weighted_bce, weighted_cce
from .optim import Adam
from .recurrent import GRU, LSTM, Bidirectional, gru_step, lstm_step

__all__ = [
    "Adam",
    "Bidirectional",
    "Conv1D",
    "Dense",
    "Embedding",
    "GRU",
    "GlobalAvgPool1D",
    "GlobalMaxPool1D",
    "LSTM",
    "Layer",
    "MaxPool1D",
    "SpatialDropout",
    "glorot_uniform",
    "gru_step",
    "he_uniform",
    "lstm_step",
    "orthogonal",
    "relu",
    "sigmoid",
    "softmax",
    "weighted_bce",
    "weighted_cce",
]
