"""Offensive-tweet classification toolkit.

Modules: `textnorm` (normalization pipeline), `spell` (frequency dictionary,
correction, segmentation), `embeddings`, `neural` (layers/losses/optimizer),
`models` (the four architectures), `training`, `metrics`, `container`
(model files), `report` (CSV + figures) and `cli`.
"""

__version__ = "0.1.0"

from .data import LabeledTweet, read_tsv
from .embeddings import Vocabulary, build_vocab, init_learnt, load_glove
from .models import HyperParams, ModelGraph, TweetClassifier, build
from .spell import FrequencyDictionary, build_dictionary, damerau_levenshtein
from .textnorm import Pipeline, PipelineConfig, run_pipeline

__all__ = [
    "FrequencyDictionary",
    "HyperParams",
    "LabeledTweet",
    "ModelGraph",
    "Pipeline",
    "PipelineConfig",
    "TweetClassifier",
    "Vocabulary",
    "build",
    "build_dictionary",
    "build_vocab",
    "damerau_levenshtein",
    "init_learnt",
    "load_glove",
    "read_tsv",
    "run_pipeline",
]
