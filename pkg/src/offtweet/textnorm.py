"""Tweet normalization pipeline.

The pipeline is an ordered sequence of stages.  The early stages transform
whole strings; from stop-word removal onward they operate on the
whitespace-tokenized sequence.  Canonical order:

    strip_mentions, strip_urls, strip_html_entities, strip_hashtags,
    lowercase, ascii_and_symbol_spacing, expand_contractions,
    strip_punctuation, strip_numbers, remove_stopwords, reduce_word_lengths,
    segment_words, correct_spellings, lemmatize, pad_or_truncate

Every stage is pure and idempotent, so a pipeline may be re-applied to its own
output without change.  Word segmentation and spelling correction only run
when a frequency dictionary is supplied; both leave tokens that are already
dictionary words (and any token containing a non-letter) untouched.
"""

import re
from dataclasses import dataclass, field
from importlib import resources as importlib_resources

PAD_TOKEN = "<pad>"
NEGATIONS = frozenset({"no", "not", "nor", "never"})
DEFAULT_PUNCTUATION = frozenset("?,:.!;'\"")

CANONICAL_STAGES = (
    "strip_mentions",
    "strip_urls",
    "strip_html_entities",
    "strip_hashtags",
    "lowercase",
    "ascii_and_symbol_spacing",
    "expand_contractions",
    "strip_punctuation",
    "strip_numbers",
    "remove_stopwords",
    "reduce_word_lengths",
    "segment_words",
    "correct_spellings",
    "lemmatize",
    "pad_or_truncate",
)

_WS_RE = re.compile(r"\s+")
_URL_RE = re.compile(r"https?://\S+")
_URL_TOKEN_RE = re.compile(r"(?<![A-Za-z0-9])URL(?![A-Za-z0-9])")
_ENTITY_RE = re.compile(r"&(?:[A-Za-z][A-Za-z0-9]*|#[0-9]+|#x[0-9A-Fa-f]+);")
_HASHTAG_RE = re.compile(r"(?<!\S)#\S+")
_ELONGATION_RE = re.compile(r"(.)\1{2,}")
_ALPHA_RE = re.compile(r"[a-z]+")


def _collapse(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def _read_resource(name: str) -> list[str]:
    raw = importlib_resources.files("offtweet.resources").joinpath(name).read_text("utf-8")
    lines = []
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


def load_stopwords() -> frozenset[str]:
    return frozenset(_read_resource("stopwords.txt"))


def _read_pairs(name: str) -> dict[str, str]:
    pairs = {}
    for line in _read_resource(name):
        key, _, value = line.partition("=")
        pairs[key.strip()] = value.strip()
    return pairs


def load_contractions() -> dict[str, str]:
    return _read_pairs("contractions.txt")


def load_lemma_exceptions() -> dict[str, str]:
    return _read_pairs("lemma_exceptions.txt")


# ---------------------------------------------------------------------------
# text-level stages


def strip_mentions(text: str) -> str:
    """Remove every occurrence of the anonymized mention marker ``@USER``."""
    return _collapse(text.replace("@USER", " "))


def strip_urls(text: str) -> str:
    """Remove raw http(s) URLs and the anonymized ``URL`` placeholder token."""
    return _collapse(_URL_TOKEN_RE.sub(" ", _URL_RE.sub(" ", text)))


def strip_html_entities(text: str) -> str:
    """Delete HTML entities such as ``&amp;`` or ``&#128514;`` outright."""
    return _ENTITY_RE.sub("", text)


def strip_hashtags(text: str) -> str:
    """Remove whole hashtag tokens (``#word`` including the tag text)."""
    return _collapse(_HASHTAG_RE.sub(" ", text))


def lowercase(text: str) -> str:
    return text.lower()


def ascii_and_symbol_spacing(text: str) -> str:
    """Drop non-ASCII characters and space out symbol characters.

    Characters that are neither alphanumeric, whitespace, apostrophe, ``@``
    nor ``#`` are surrounded by single spaces so they become stand-alone
    tokens (``me+you=forever`` -> ``me + you = forever``).
    """
    out = []
    for ch in text:
        if ord(ch) > 127:
            continue
        if ch.isalnum() or ch.isspace() or ch in "'@#":
            out.append(ch)
        else:
            out.append(f" {ch} ")
    return _collapse("".join(out))


def expand_contractions(text: str, mapping: dict[str, str]) -> str:
    """Replace contracted tokens by their expansions at word boundaries.

    Tokens missing from the map fall back to generic suffix expansion for the
    unambiguous families (n't, 're, 'll, 've, 'm); a trailing ``'s`` is left
    alone unless explicitly mapped, since it may be a possessive.
    """
    out = []
    for token in text.split():
        expansion = mapping.get(token)
        if expansion is None:
            if token.endswith("n't") and len(token) > 3:
                expansion = token[:-3] + " not"
            elif token.endswith("'re"):
                expansion = token[:-3] + " are"
            elif token.endswith("'ll"):
                expansion = token[:-3] + " will"
            elif token.endswith("'ve"):
                expansion = token[:-3] + " have"
            elif token.endswith("'m"):
                expansion = token[:-2] + " am"
        out.append(expansion if expansion is not None else token)
    return " ".join(out)


def strip_punctuation(text: str, punctuation: frozenset[str] = DEFAULT_PUNCTUATION) -> str:
    """Delete the configured punctuation characters wherever they occur."""
    return _collapse("".join(ch for ch in text if ch not in punctuation))


def strip_numbers(text: str) -> str:
    """Delete digit characters; tokens made entirely of digits vanish."""
    return _collapse("".join(ch for ch in text if not ch.isdigit()))


# ---------------------------------------------------------------------------
# token-level stages


def remove_stopwords(
    tokens: list[str],
    stopwords: frozenset[str],
    keep_negations: bool = True,
) -> list[str]:
    """Drop stop-word tokens, optionally retaining negation words."""
    return [
        t
        for t in tokens
        if t not in stopwords or (keep_negations and t in NEGATIONS)
    ]


def reduce_word_lengths(token: str) -> str:
    """Cap runs of one repeated character at two (``realllllly`` -> ``really``)."""
    return _ELONGATION_RE.sub(r"\1\1", token)


def lemmatize(token: str, exceptions: dict[str, str]) -> str:
    """Reduce inflected forms to a base form with ordered suffix rules.

    The exception table wins over the rules; stems shorter than three
    characters or without a vowel are left untouched.
    """
    hit = exceptions.get(token)
    if hit is not None:
        return hit
    for suffix, undouble in (("ing", True), ("ed", True)):
        if token.endswith(suffix):
            stem = token[: -len(suffix)]
            if not _stem_ok(stem):
                continue
            if undouble and len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "lsz":
                stem = stem[:-1]
            elif _needs_final_e(stem):
                stem += "e"
            return stem
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("es"):
        stem = token[:-2]
        if _stem_ok(stem) and (
            stem.endswith(("ss", "x", "z", "ch", "sh", "o"))
        ):
            return stem
    if token.endswith("s") and not token.endswith("ss") and _stem_ok(token[:-1]):
        return token[:-1]
    return token


def _stem_ok(stem: str) -> bool:
    return len(stem) >= 3 and any(c in "aeiouy" for c in stem)


def _needs_final_e(stem: str) -> bool:
    # consonant-vowel-consonant endings like "mak" or "bak" usually lost an
    # "e" to the suffix ("making" -> "make"); w/x/y never take it back.
    if len(stem) < 3:
        return False
    a, b, c = stem[-3], stem[-2], stem[-1]
    vowels = "aeiou"
    return a not in vowels and b in vowels and c not in vowels and c not in "wxy"


def pad_or_truncate(tokens: list[str], length: int, pad_token: str = PAD_TOKEN) -> list[str]:
    """Truncate from the tail or right-pad with `pad_token` to exactly `length`."""
    if length < 0:
        raise ValueError("length must be non-negative")
    if len(tokens) >= length:
        return list(tokens[:length])
    return list(tokens) + [pad_token] * (length - len(tokens))


def _is_alpha(token: str) -> bool:
    return bool(token) and all("a" <= c <= "z" for c in token)


# ---------------------------------------------------------------------------
# the composed pipeline


@dataclass(frozen=True)
class PipelineConfig:
    """Pipeline settings; `stages` must respect the canonical order."""

    pad_length: int = 50
    keep_negations: bool = True
    stages: tuple[str, ...] = CANONICAL_STAGES
    punctuation: frozenset[str] = DEFAULT_PUNCTUATION
    stopwords: frozenset[str] = field(default_factory=load_stopwords)
    contractions: dict[str, str] = field(default_factory=load_contractions)
    lemma_exceptions: dict[str, str] = field(default_factory=load_lemma_exceptions)

    def __post_init__(self):
        unknown = set(self.stages) - set(CANONICAL_STAGES)
        if unknown:
            raise ValueError(f"unknown stages: {sorted(unknown)}")
        order = [CANONICAL_STAGES.index(s) for s in self.stages]
        if order != sorted(order) or len(set(order)) != len(order):
            raise ValueError("stages must be a subsequence of the canonical order")
        if self.pad_length <= 0:
            raise ValueError("pad_length must be positive")


class Pipeline:
    """Applies the configured stages to raw tweet text.

    `dictionary` (a spell.FrequencyDictionary) enables the segmentation and
    spelling-correction stages; without it they are identity maps.
    """

    def __init__(self, config: PipelineConfig | None = None, dictionary=None):
        self.config = config or PipelineConfig()
        self.dictionary = dictionary

    def normalize(self, text: str) -> list[str]:
        """All enabled stages except padding; returns the token sequence."""
        cfg = self.config
        enabled = set(cfg.stages)
        for name, fn in (
            ("strip_mentions", strip_mentions),
            ("strip_urls", strip_urls),
            ("strip_html_entities", strip_html_entities),
            ("strip_hashtags", strip_hashtags),
            ("lowercase", lowercase),
        ):
            if name in enabled:
                text = fn(text)
        if "ascii_and_symbol_spacing" in enabled:
            text = ascii_and_symbol_spacing(text)
        if "expand_contractions" in enabled:
            text = expand_contractions(text, cfg.contractions)
        if "strip_punctuation" in enabled:
            text = strip_punctuation(text, cfg.punctuation)
        if "strip_numbers" in enabled:
            text = strip_numbers(text)

        tokens = text.split()
        if "remove_stopwords" in enabled:
            tokens = remove_stopwords(tokens, cfg.stopwords, cfg.keep_negations)
        if "reduce_word_lengths" in enabled:
            tokens = [reduce_word_lengths(t) for t in tokens]
        if "segment_words" in enabled and self.dictionary is not None:
            tokens = [part for t in tokens for part in self._segment(t)]
        if "correct_spellings" in enabled and self.dictionary is not None:
            tokens = [self._correct(t) for t in tokens]
        if "lemmatize" in enabled:
            tokens = [lemmatize(t, cfg.lemma_exceptions) for t in tokens]
        return tokens

    def __call__(self, text: str) -> list[str]:
        """Normalize and (when enabled) pad/truncate to `pad_length`."""
        tokens = self.normalize(text)
        if "pad_or_truncate" in set(self.config.stages):
            tokens = pad_or_truncate(tokens, self.config.pad_length)
        return tokens

    def _segment(self, token: str) -> list[str]:
        if not _is_alpha(token) or token in self.dictionary:
            return [token]
        return list(self.dictionary.segment(token).parts)

    def _correct(self, token: str) -> str:
        if not _is_alpha(token):
            return token
        hit = self.dictionary.lookup(token)
        return hit.word if hit is not None else token


def run_pipeline(text: str, config: PipelineConfig | None = None, dictionary=None) -> list[str]:
    return Pipeline(config, dictionary)(text)


def sentence_length_histogram(corpus: list[list[str]]) -> dict[int, int]:
    """Token-count distribution of normalized (pre-padding) sequences."""
    hist: dict[int, int] = {}
    for tokens in corpus:
        hist[len(tokens)] = hist.get(len(tokens), 0) + 1
    return dict(sorted(hist.items()))
