"""Delimited output files, the text evaluation report, and their figures.

Every artifact opens with the effective run configuration echoed as ``#``
comment lines, so results stay interpretable on their own.  Figures are
rendered with the non-interactive Agg backend next to the delimited files:
a sequence-length histogram, the training-history F1 profile (blue training
curve, orange validation curve) and a confusion-matrix heatmap.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .data import atomic_write
from .metrics import accuracy, macro_f1, per_class_scores

HISTORY_COLUMNS = ("epoch", "train_loss", "train_f1", "val_f1", "val_acc")


def _write_lines(path, echo, lines):
    with atomic_write(path) as fh:
        for line in echo or []:
            fh.write(f"# {line}\n")
        for line in lines:
            fh.write(line + "\n")


# -- delimited files ----------------------------------------------------------


def write_histogram_csv(hist: dict[int, int], path: str, echo=None) -> None:
    rows = ["length,count"]
    rows += [f"{length},{count}" for length, count in sorted(hist.items())]
    _write_lines(path, echo, rows)


def write_history_csv(history: list[dict], path: str, echo=None) -> None:
    rows = [",".join(HISTORY_COLUMNS)]
    for h in history:
        rows.append(
            f"{h['epoch']},{h['train_loss']:.6f},{h['train_f1']:.6f},"
            f"{h['val_f1']:.6f},{h['val_acc']:.6f}"
        )
    _write_lines(path, echo, rows)


def write_confusion_csv(cm: np.ndarray, labels: tuple[str, ...], path: str, echo=None) -> None:
    rows = ["true\\predicted," + ",".join(labels)]
    for i, label in enumerate(labels):
        rows.append(label + "," + ",".join(str(int(v)) for v in cm[i]))
    _write_lines(path, echo, rows)


def format_report(variant: str, task: str, cm: np.ndarray, labels: tuple[str, ...]) -> str:
    """Evaluation summary: headline row, per-class table, confusion matrix."""
    scores = per_class_scores(cm)
    out = [
        f"{'model':<14}{'task':<6}{'macro_f1':>10}{'accuracy':>10}",
        f"{variant:<14}{task:<6}{macro_f1(cm):>10.4f}{accuracy(cm):>10.4f}",
        "",
        f"{'class':<8}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>9}",
    ]
    for i, label in enumerate(labels):
        out.append(
            f"{label:<8}{scores['precision'][i]:>10.4f}{scores['recall'][i]:>10.4f}"
            f"{scores['f1'][i]:>10.4f}{scores['support'][i]:>9d}"
        )
    out.append("")
    out.append("confusion matrix (rows = true, columns = predicted)")
    width = max(6, *(len(l) + 1 for l in labels))
    out.append(" " * 8 + "".join(f"{l:>{width}}" for l in labels))
    for i, label in enumerate(labels):
        out.append(f"{label:<8}" + "".join(f"{int(v):>{width}}" for v in cm[i]))
    return "\n".join(out) + "\n"


def write_report(
    variant: str,
    task: str,
    cm: np.ndarray,
    labels: tuple[str, ...],
    path: str,
    echo=None,
) -> None:
    _write_lines(path, echo, [format_report(variant, task, cm, labels).rstrip("\n")])


# -- figures -------------------------------------------------------------------


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_histogram(hist: dict[int, int], path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    lengths = sorted(hist)
    ax.bar(lengths, [hist[l] for l in lengths], width=0.9, color="C0")
    ax.set_xlabel("tokens per tweet (after normalization)")
    ax.set_ylabel("tweets")
    ax.set_title("sentence length distribution")
    _save(fig, path)


def plot_history(history: list[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    epochs = [h["epoch"] for h in history]
    ax.plot(epochs, [h["train_f1"] for h in history], color="C0", label="training")
    ax.plot(epochs, [h["val_f1"] for h in history], color="C1", label="validation")
    ax.set_xlabel("epoch")
    ax.set_ylabel("macro F1")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("F1 profile")
    ax.legend()
    _save(fig, path)


def plot_confusion(cm: np.ndarray, labels: tuple[str, ...], path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 4.5))
    im = ax.imshow(np.asarray(cm), cmap="Blues")
    ax.set_xticks(range(len(labels)), labels)
    ax.set_yticks(range(len(labels)), labels)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    threshold = cm.max() / 2 if cm.max() else 0.5
    for i in range(len(labels)):
        for j in range(len(labels)):
            color = "white" if cm[i, j] > threshold else "black"
            ax.text(j, i, str(int(cm[i, j])), ha="center", va="center", color=color)
    fig.colorbar(im, ax=ax)
    _save(fig, path)
