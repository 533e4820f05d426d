"""Class-weighted losses on probability outputs.

Both losses clamp probabilities to [1e-7, 1 - 1e-7] before taking logs, mean
over the batch, and return the gradient with respect to the (unclamped)
predictions so they compose with the sigmoid/softmax backward of the output
layer.
"""

import numpy as np

CLAMP = 1e-7


def weighted_bce(
    y_pred: np.ndarray, y_true: np.ndarray, class_weights: np.ndarray
) -> tuple[float, np.ndarray]:
    """Weighted binary cross-entropy.

    `y_pred` is (B,) or (B, 1) probabilities of class 1, `y_true` (B,) holds
    0/1 labels and `class_weights` is the per-class weight pair.  Each sample
    contributes -w[y] * (y log p + (1-y) log(1-p)); the result is the batch
    mean and the gradient of that mean in `y_pred`'s shape.
    """
    orig_shape = np.shape(y_pred)
    p = np.clip(np.reshape(y_pred, -1).astype(np.float64), CLAMP, 1.0 - CLAMP)
    y = np.asarray(y_true, dtype=np.float64).reshape(-1)
    if p.shape != y.shape:
        raise ValueError(f"prediction shape {orig_shape} does not match labels {y.shape}")
    w = np.asarray(class_weights, dtype=np.float64)[y.astype(np.intp)]
    losses = -w * (y * np.log(p) + (1.0 - y) * np.log1p(-p))
    grad = -w * (y / p - (1.0 - y) / (1.0 - p)) / p.size
    return float(losses.mean()), grad.reshape(orig_shape)


def weighted_cce(
    y_pred: np.ndarray, y_true: np.ndarray, class_weights: np.ndarray
) -> tuple[float, np.ndarray]:
    """Weighted categorical cross-entropy.

    `y_pred` is (B, K) class probabilities; `y_true` is either (B,) integer
    classes or (B, K) one-hot rows.  Each sample contributes
    -w[class] * log p[class].
    """
    p = np.asarray(y_pred, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError("y_pred must be (B, K)")
    y = np.asarray(y_true)
    labels = y.argmax(axis=1) if y.ndim == 2 else y.astype(np.intp)
    if labels.shape[0] != p.shape[0]:
        raise ValueError("batch size mismatch between predictions and labels")
    batch = p.shape[0]
    rows = np.arange(batch)
    picked = np.clip(p[rows, labels], CLAMP, 1.0 - CLAMP)
    w = np.asarray(class_weights, dtype=np.float64)[labels]
    losses = -w * np.log(picked)
    grad = np.zeros_like(p)
    grad[rows, labels] = -w / picked / batch
    return float(losses.mean()), grad
