"""Frequency dictionary with symmetric-delete spelling correction and
unigram word segmentation.

Correction follows the symmetric-delete scheme: at build time every word is
indexed under all variants of its prefix reachable by up to `max_edit_distance`
character deletions; at query time the same variants of the query prefix are
generated, the union of indexed candidates is verified with a true edit
distance, and the best suggestion is chosen by (distance, -frequency, word).

Segmentation maximizes the sum of unigram log-probabilities over all ways of
splitting a string, allowing per-part correction at distance <= 1; unknown
parts cost ``log(1 / (N * base**len))``.
"""

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .data import atomic_write
from .errors import DataError


def _edit_distance(a: str, b: str, cap: int | None, transpositions: bool) -> int:
    """Edit distance between `a` and `b`; values above `cap` return cap+1.

    With `transpositions` this is the restricted Damerau-Levenshtein distance
    (adjacent transposition counts one edit, no substring is edited twice).
    """
    la, lb = len(a), len(b)
    if cap is not None and abs(la - lb) > cap:
        return cap + 1
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev2: list[int] | None = None
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ai = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            d = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if (
                transpositions
                and i > 1
                and j > 1
                and ai == b[j - 2]
                and a[i - 2] == b[j - 1]
            ):
                d = min(d, prev2[j - 2] + 1)
            cur[j] = d
        if cap is not None and min(cur) > cap:
            return cap + 1
        prev2, prev = prev, cur
    dist = prev[lb]
    if cap is not None and dist > cap:
        return cap + 1
    return dist


def damerau_levenshtein(a: str, b: str) -> int:
    """Restricted Damerau-Levenshtein (adjacent-transposition) distance."""
    return _edit_distance(a, b, cap=None, transpositions=True)


def levenshtein(a: str, b: str) -> int:
    """Plain Levenshtein distance (insert / delete / substitute)."""
    return _edit_distance(a, b, cap=None, transpositions=False)


def delete_variants(word: str, max_deletes: int) -> set[str]:
    """All strings reachable from `word` by up to `max_deletes` deletions."""
    variants = {word}
    frontier = {word}
    for _ in range(max_deletes):
        step = set()
        for w in frontier:
            for i in range(len(w)):
                step.add(w[:i] + w[i + 1 :])
        step -= variants
        variants |= step
        frontier = step
    return variants


@dataclass(frozen=True)
class Suggestion:
    word: str
    distance: int
    count: int


@dataclass(frozen=True)
class Segmentation:
    parts: tuple[str, ...]
    score: float


class FrequencyDictionary:
    """Immutable word-frequency dictionary with correction and segmentation.

    Lookups are read-only and safe to share across threads or processes.
    """

    def __init__(
        self,
        counts: dict[str, int] | None = None,
        max_edit_distance: int = 2,
        prefix_length: int = 7,
        metric: str = "damerau",
        unknown_penalty_base: float = 10.0,
    ):
        if max_edit_distance < 0:
            raise ValueError("max_edit_distance must be >= 0")
        if prefix_length <= max_edit_distance:
            raise ValueError("prefix_length must exceed max_edit_distance")
        if metric not in ("damerau", "levenshtein"):
            raise ValueError(f"unknown metric {metric!r}")
        if unknown_penalty_base <= 1.0:
            raise ValueError("unknown_penalty_base must be > 1")
        self.max_edit_distance = max_edit_distance
        self.prefix_length = prefix_length
        self.metric = metric
        self.unknown_penalty_base = unknown_penalty_base
        self._transpositions = metric == "damerau"
        self._entries: dict[str, int] = {}
        self._index: dict[str, list[str]] = {}
        self._total = 0
        self._longest = 0
        for word in sorted(counts or {}):
            self._add(word, counts[word])

    def _add(self, word: str, count: int) -> None:
        if not word or any(c.isspace() for c in word):
            raise ValueError(f"invalid dictionary word {word!r}")
        if count <= 0:
            raise ValueError(f"invalid count {count} for {word!r}")
        self._total += count
        if word in self._entries:
            self._entries[word] += count
            return
        self._entries[word] = count
        self._longest = max(self._longest, len(word))
        prefix = word[: self.prefix_length]
        for variant in delete_variants(prefix, self.max_edit_distance):
            self._index.setdefault(variant, []).append(word)

    # -- basic queries ------------------------------------------------------

    def __contains__(self, word: str) -> bool:
        return word in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def count(self, word: str) -> int:
        return self._entries.get(word, 0)

    @property
    def total_count(self) -> int:
        return self._total

    @property
    def longest_word_length(self) -> int:
        return self._longest

    def items(self):
        return self._entries.items()

    # -- correction ---------------------------------------------------------

    def lookup(self, query: str, max_distance: int | None = None) -> Suggestion | None:
        """Best suggestion within `max_distance` edits, or None.

        An exact dictionary hit short-circuits at distance 0.  Ties are broken
        by smaller distance, then larger count, then lexicographic word order.
        """
        if max_distance is None:
            max_distance = self.max_edit_distance
        elif max_distance > self.max_edit_distance:
            raise ValueError(
                f"max_distance {max_distance} exceeds index depth {self.max_edit_distance}"
            )
        count = self._entries.get(query)
        if count is not None:
            return Suggestion(query, 0, count)
        if max_distance == 0:
            return None
        best: tuple[int, int, str] | None = None
        seen: set[str] = set()
        for variant in delete_variants(query[: self.prefix_length], max_distance):
            for word in self._index.get(variant, ()):
                if word in seen:
                    continue
                seen.add(word)
                if abs(len(word) - len(query)) > max_distance:
                    continue
                d = _edit_distance(query, word, max_distance, self._transpositions)
                if d > max_distance:
                    continue
                key = (d, -self._entries[word], word)
                if best is None or key < best:
                    best = key
        if best is None:
            return None
        return Suggestion(best[2], best[0], -best[1])

    # -- segmentation -------------------------------------------------------

    def segment(self, text: str) -> Segmentation:
        """Highest-scoring split of `text` into corrected dictionary words.

        Dynamic program over end positions; span lengths are capped by the
        longest dictionary word.  Each span is corrected at distance <= 1 and
        scored by the corrected word's unigram log-probability, or by the
        unknown penalty when no correction exists.
        """
        if text == "":
            return Segmentation((), 0.0)
        n = len(text)
        cap = max(self._longest, 1)
        neg = float("-inf")
        best = [neg] * (n + 1)
        best[0] = 0.0
        back: list[tuple[int, str]] = [(0, "")] * (n + 1)
        for j in range(1, n + 1):
            for i in range(max(0, j - cap), j):
                if best[i] == neg:
                    continue
                part, logp = self._piece_score(text[i:j])
                score = best[i] + logp
                if score > best[j]:
                    best[j] = score
                    back[j] = (i, part)
        parts = []
        j = n
        while j > 0:
            i, part = back[j]
            parts.append(part)
            j = i
        return Segmentation(tuple(reversed(parts)), best[n])

    def _piece_score(self, piece: str) -> tuple[str, float]:
        hit = self.lookup(piece, max_distance=min(1, self.max_edit_distance))
        if hit is not None:
            return hit.word, math.log(hit.count / self._total)
        return piece, self.unknown_logp(len(piece))

    def unknown_logp(self, length: int) -> float:
        """Log-probability penalty for an out-of-vocabulary span."""
        total = max(self._total, 1)
        return -math.log(total) - length * math.log(self.unknown_penalty_base)

    # -- persistence --------------------------------------------------------

    def save(self, path: str, comments: Iterable[str] = ()) -> None:
        """Write ``word count`` lines, most frequent first (ties by word).

        `comments` are emitted first, one per line, prefixed with ``# ``.
        """
        rows = sorted(self._entries.items(), key=lambda kv: (-kv[1], kv[0]))
        with atomic_write(path) as fh:
            for comment in comments:
                fh.write(f"# {comment}\n")
            for word, count in rows:
                fh.write(f"{word} {count}\n")

    @classmethod
    def load(cls, path: str, **kwargs) -> "FrequencyDictionary":
        counts: dict[str, int] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                fields = line.split()
                if len(fields) != 2:
                    raise DataError(f"{path}: line {lineno}: expected 'word count'")
                word, raw = fields
                try:
                    count = int(raw)
                except ValueError:
                    raise DataError(f"{path}: line {lineno}: bad count {raw!r}") from None
                if count <= 0:
                    raise DataError(f"{path}: line {lineno}: count must be positive")
                counts[word] = counts.get(word, 0) + count
        return cls(counts, **kwargs)


def build_dictionary(
    corpus: Iterable[list[str]],
    min_count: int = 1,
    **kwargs,
) -> FrequencyDictionary:
    """Count tokens over normalized sequences and keep those >= `min_count`."""
    counter: Counter[str] = Counter()
    for tokens in corpus:
        counter.update(tokens)
    counts = {w: c for w, c in counter.items() if c >= min_count}
    return FrequencyDictionary(counts, **kwargs)
