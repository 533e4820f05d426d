"""Dataset model and TSV input/output.

Training files are tab-separated with a header row and columns
``id, tweet, subtask_a, subtask_b, subtask_c``; unlabeled files carry only
``id, tweet``.  Missing labels are written as the literal string ``NULL``.
Labels form a hierarchy: a tweet only has a subtask-B label if subtask A is
OFF, and only has a subtask-C label if subtask B is TIN.
"""

import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass

from .errors import DataError

LABELS_A = ("NOT", "OFF")
LABELS_B = ("UNT", "TIN")
LABELS_C = ("IND", "GRP", "OTH")
TASKS = ("A", "B", "C")
TASK_LABELS = {"A": LABELS_A, "B": LABELS_B, "C": LABELS_C}

NULL = "NULL"
HEADER = ("id", "tweet", "subtask_a", "subtask_b", "subtask_c")


@dataclass(frozen=True)
class LabeledTweet:
    """One row of a dataset; labels are None when absent."""

    id: str
    text: str
    label_a: str | None = None
    label_b: str | None = None
    label_c: str | None = None

    def __post_init__(self):
        if self.label_a is not None and self.label_a not in LABELS_A:
            raise DataError(f"tweet {self.id}: bad subtask_a label {self.label_a!r}")
        if self.label_b is not None:
            if self.label_b not in LABELS_B:
                raise DataError(f"tweet {self.id}: bad subtask_b label {self.label_b!r}")
            if self.label_a != "OFF":
                raise DataError(
                    f"tweet {self.id}: subtask_b label requires subtask_a == OFF"
                )
        if self.label_c is not None:
            if self.label_c not in LABELS_C:
                raise DataError(f"tweet {self.id}: bad subtask_c label {self.label_c!r}")
            if self.label_b != "TIN":
                raise DataError(
                    f"tweet {self.id}: subtask_c label requires subtask_b == TIN"
                )

    def label(self, task: str) -> str | None:
        return {"A": self.label_a, "B": self.label_b, "C": self.label_c}[task]


def read_tsv(path: str) -> list[LabeledTweet]:
    """Read a dataset file; raises DataError naming the offending line."""
    tweets = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header:
            raise DataError(f"{path}: empty file")
        cols = header.rstrip("\n").rstrip("\r").split("\t")
        if tuple(c.strip().lower() for c in cols) != HEADER[: len(cols)] or len(cols) < 2:
            raise DataError(f"{path}: line 1: bad header {cols!r}")
        width = len(cols)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != width:
                raise DataError(
                    f"{path}: line {lineno}: expected {width} columns, got {len(fields)}"
                )
            fields += [NULL] * (len(HEADER) - width)
            ident, text, a, b, c = fields
            labels = [None if v == NULL else v for v in (a, b, c)]
            try:
                tweets.append(LabeledTweet(ident, text, *labels))
            except DataError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from None
    return tweets


def hierarchical_filter(tweets: list[LabeledTweet], task: str) -> list[LabeledTweet]:
    """Rows that carry a label for `task` (the task's training subset)."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    return [t for t in tweets if t.label(task) is not None]


def task_targets(tweets: list[LabeledTweet], task: str) -> list[int]:
    """Integer class indices for `task`; raises DataError on missing labels."""
    labels = TASK_LABELS[task]
    out = []
    for t in tweets:
        lab = t.label(task)
        if lab is None:
            raise DataError(f"tweet {t.id}: missing subtask_{task.lower()} label")
        out.append(labels.index(lab))
    return out


@contextmanager
def atomic_write(path: str, mode: str = "w"):
    """Write to a temp file in the target directory and rename into place.

    Guarantees the destination is never left half-written.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    umask = os.umask(0)
    os.umask(umask)
    os.chmod(tmp, 0o666 & ~umask)  # mkstemp forces 0600; honor the umask instead
    encoding = None if "b" in mode else "utf-8"
    try:
        with os.fdopen(fd, mode, encoding=encoding) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_predictions(
    path: str,
    rows: list[tuple[str, str, float]],
    config_echo: list[str] | None = None,
) -> None:
    """Write an ``id / label / probability`` TSV, config echoed as '#' lines."""
    with atomic_write(path) as fh:
        for line in config_echo or []:
            fh.write(f"# {line}\n")
        fh.write("id\tlabel\tprobability\n")
        for ident, label, prob in rows:
            fh.write(f"{ident}\t{label}\t{prob:.6f}\n")
