"""Training loop: stratified splitting, class weighting, minibatch updates
and early stopping on smoothed validation macro-F1.

The stopping rule tracks a moving average of validation macro-F1 (window
`ma_window`); when the average fails to improve for `patience` consecutive
epochs, training stops and the parameters snapshotted at the best-average
epoch are restored.
"""

from dataclasses import dataclass, field

import numpy as np

from .metrics import accuracy, confusion_matrix, macro_f1
from .models import TweetClassifier, predicted_classes
from .neural.losses import weighted_bce, weighted_cce
from .neural.optim import Adam
from .util import seed_sequence


def stratified_split(
    labels: np.ndarray, train_fraction: float = 0.8, seed=0
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class shuffled split; round(n_c * fraction) rows of each class
    go to the training side.  Returns sorted (train_idx, val_idx)."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed_sequence(seed))
    train, val = [], []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        k = int(round(idx.size * train_fraction))
        train.append(idx[:k])
        val.append(idx[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(val))


def class_weights(
    labels: np.ndarray, num_classes: int, mode: str = "balanced"
) -> np.ndarray:
    """Per-class loss weights from training-set frequencies.

    "balanced" gives w_c = N / (K * n_c), so weighted counts sum back to N;
    "inverse" gives plain w_c = N / n_c.  Classes absent from `labels` get
    weight zero (they can never contribute to the loss).
    """
    if mode not in ("balanced", "inverse"):
        raise ValueError(f"unknown weight mode {mode!r}")
    labels = np.asarray(labels, dtype=np.int64)
    counts = np.bincount(labels, minlength=num_classes).astype(np.float64)
    total = counts.sum()
    weights = np.zeros(num_classes, dtype=np.float64)
    present = counts > 0
    divisor = num_classes if mode == "balanced" else 1
    weights[present] = total / (divisor * counts[present])
    return weights


def train_step(
    classifier: TweetClassifier,
    batch_idx: np.ndarray,
    batch_labels: np.ndarray,
    weights: np.ndarray,
    adam: Adam,
) -> tuple[float, np.ndarray]:
    """One forward/backward/update cycle; returns (loss, batch probabilities)."""
    probs = classifier.forward(batch_idx, training=True)
    if classifier.graph.head == "binary":
        loss, dpred = weighted_bce(probs, batch_labels, weights)
    else:
        loss, dpred = weighted_cce(probs, batch_labels, weights)
    classifier.backward(dpred.astype(probs.dtype))
    adam.step(classifier.named_params(), classifier.named_grads())
    classifier.zero_grads()
    return loss, probs


@dataclass
class TrainConfig:
    epochs: int = 50
    batch_size: int = 32
    learning_rate: float = 0.001
    lr_decay: float = 0.001
    class_weighting: bool = True
    weight_mode: str = "balanced"
    early_stopping: bool = True
    ma_window: int = 5
    patience: int = 10
    seed: int = 0
    verbose: bool = False


@dataclass
class TrainResult:
    history: list[dict] = field(default_factory=list)
    best_epoch: int = 0
    best_ma: float = 0.0
    stopped_early: bool = False


def _evaluate(classifier, idx, labels):
    preds = classifier.predict_classes(idx)
    cm = confusion_matrix(labels, preds, len(classifier.labels))
    return macro_f1(cm), accuracy(cm)


def train(
    classifier: TweetClassifier,
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_val: np.ndarray,
    y_val: np.ndarray,
    config: TrainConfig | None = None,
) -> TrainResult:
    """Fit the classifier; returns the per-epoch history and restores the
    parameters of the best smoothed-validation-F1 epoch."""
    config = config or TrainConfig()
    num_classes = len(classifier.labels)
    if config.class_weighting:
        weights = class_weights(y_train, num_classes, config.weight_mode)
    else:
        weights = np.ones(num_classes, dtype=np.float64)

    adam = Adam(learning_rate=config.learning_rate, decay=config.lr_decay)
    shuffle_rng = np.random.default_rng(seed_sequence(config.seed).spawn(1)[0])
    y_train = np.asarray(y_train, dtype=np.int64)
    y_val = np.asarray(y_val, dtype=np.int64)

    result = TrainResult()
    ma_scores: list[float] = []
    best_snapshot = None
    since_best = 0

    for epoch in range(1, config.epochs + 1):
        order = np.arange(x_train.shape[0])
        shuffle_rng.shuffle(order)
        losses, sizes = [], []
        epoch_preds = np.empty(x_train.shape[0], dtype=np.int64)
        for start in range(0, order.size, config.batch_size):
            chunk = order[start : start + config.batch_size]
            loss, probs = train_step(
                classifier, x_train[chunk], y_train[chunk], weights, adam
            )
            losses.append(loss * chunk.size)
            sizes.append(chunk.size)
            epoch_preds[chunk] = predicted_classes(probs)
        train_loss = float(np.sum(losses) / np.sum(sizes))
        train_f1 = macro_f1(confusion_matrix(y_train, epoch_preds, num_classes))
        if x_val.shape[0]:
            val_f1, val_acc = _evaluate(classifier, x_val, y_val)
        else:
            val_f1, val_acc = 0.0, 0.0
        result.history.append(
            {
                "epoch": epoch,
                "train_loss": train_loss,
                "train_f1": train_f1,
                "val_f1": val_f1,
                "val_acc": val_acc,
            }
        )
        if config.verbose:
            print(
                f"epoch {epoch:3d}  loss {train_loss:.4f}  train_f1 {train_f1:.4f}"
                f"  val_f1 {val_f1:.4f}  val_acc {val_acc:.4f}"
            )

        if not config.early_stopping:
            result.best_epoch = epoch
            continue
        window = [h["val_f1"] for h in result.history[-config.ma_window :]]
        ma = float(np.mean(window))
        ma_scores.append(ma)
        if best_snapshot is None or ma > result.best_ma:
            result.best_ma = ma
            result.best_epoch = epoch
            best_snapshot = {
                name: arr.copy() for name, arr in classifier.named_tensors().items()
            }
            since_best = 0
        else:
            since_best += 1
            if since_best >= config.patience:
                result.stopped_early = True
                break

    if best_snapshot is not None:
        current = classifier.named_tensors()
        for name, arr in best_snapshot.items():
            current[name][...] = arr
    return result
