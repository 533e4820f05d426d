"""Feed-forward, convolution, pooling, dropout and embedding layers.

Every layer stores its parameters in `params` and accumulates gradients of
the same shapes in `grads` during `backward`, which also returns the gradient
with respect to the layer input.  Forward passes cache whatever the backward
pass needs; layers are therefore not reentrant, but a forward/backward pair
is safe.
"""

import numpy as np

# -- activations ------------------------------------------------------------


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def softmax(x: np.ndarray) -> np.ndarray:
    """Row-wise softmax, shifted by the row max for stability."""
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


# -- initializers -------------------------------------------------------------


def glorot_uniform(rng: np.random.Generator, shape: tuple[int, ...], dtype=np.float32):
    """Uniform(-l, l) with l = sqrt(6 / (fan_in + fan_out))."""
    fan_in, fan_out = shape[0], shape[-1]
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def he_uniform(rng: np.random.Generator, shape: tuple[int, ...], dtype=np.float32):
    """Uniform(-l, l) with l = sqrt(6 / fan_in); fan_in spans all but the last axis."""
    fan_in = int(np.prod(shape[:-1]))
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def orthogonal(rng: np.random.Generator, size: int, dtype=np.float32):
    """Random orthogonal (size, size) matrix via QR decomposition."""
    a = rng.standard_normal((size, size))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))  # fix the sign ambiguity for a proper Haar draw
    return q.astype(dtype)


# -- base ---------------------------------------------------------------------


class Layer:
    def __init__(self, name: str):
        self.name = name
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def zero_grads(self) -> None:
        for g in self.grads.values():
            g[...] = 0.0

    def _register(self, **arrays: np.ndarray) -> None:
        for key, value in arrays.items():
            self.params[key] = value
            self.grads[key] = np.zeros_like(value)


# -- layers -------------------------------------------------------------------


class Dense(Layer):
    """Fully connected layer: activation(x @ W + b)."""

    def __init__(
        self,
        in_dim: int,
        out_dim: int,
        activation: str = "none",
        rng: np.random.Generator | None = None,
        dtype=np.float32,
        name: str = "dense",
    ):
        super().__init__(name)
        if activation not in ("none", "relu", "sigmoid", "softmax"):
            raise ValueError(f"unknown activation {activation!r}")
        self.activation = activation
        rng = rng or np.random.default_rng(0)
        self._register(
            W=glorot_uniform(rng, (in_dim, out_dim), dtype),
            b=np.zeros(out_dim, dtype=dtype),
        )

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        z = x @ self.params["W"] + self.params["b"]
        if self.activation == "relu":
            out = relu(z)
        elif self.activation == "sigmoid":
            out = sigmoid(z)
        elif self.activation == "softmax":
            out = softmax(z)
        else:
            out = z
        self._cache = (x, z, out)
        return out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        x, z, out = self._cache
        if self.activation == "relu":
            dz = dout * (z > 0)
        elif self.activation == "sigmoid":
            dz = dout * out * (1.0 - out)
        elif self.activation == "softmax":
            dz = out * (dout - (dout * out).sum(axis=-1, keepdims=True))
        else:
            dz = dout
        self.grads["W"] += x.T @ dz
        self.grads["b"] += dz.sum(axis=0)
        return dz @ self.params["W"].T


class Conv1D(Layer):
    """Valid (no padding) 1-D convolution over the time axis.

    Input (B, T, C_in) -> output (B, T - k + 1, C_out).  Kernels use the
    He-uniform initializer with fan_in = k * C_in.
    """

    def __init__(
        self,
        in_channels: int,
        filters: int,
        kernel_size: int,
        activation: str = "relu",
        rng: np.random.Generator | None = None,
        dtype=np.float32,
        name: str = "conv",
    ):
        super().__init__(name)
        if kernel_size < 1:
            raise ValueError("kernel_size must be >= 1")
        if activation not in ("none", "relu"):
            raise ValueError(f"unknown activation {activation!r}")
        self.kernel_size = kernel_size
        self.activation = activation
        rng = rng or np.random.default_rng(0)
        self._register(
            K=he_uniform(rng, (kernel_size, in_channels, filters), dtype),
            b=np.zeros(filters, dtype=dtype),
        )

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        k = self.kernel_size
        t_out = x.shape[1] - k + 1
        if t_out < 1:
            raise ValueError(
                f"{self.name}: input length {x.shape[1]} shorter than kernel {k}"
            )
        kern = self.params["K"]
        z = np.tile(self.params["b"], (x.shape[0], t_out, 1))
        for j in range(k):
            z += x[:, j : j + t_out, :] @ kern[j]
        out = relu(z) if self.activation == "relu" else z
        self._cache = (x, z)
        return out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        x, z = self._cache
        k = self.kernel_size
        t_out = z.shape[1]
        dz = dout * (z > 0) if self.activation == "relu" else dout
        self.grads["b"] += dz.sum(axis=(0, 1))
        kern = self.params["K"]
        dx = np.zeros_like(x)
        for j in range(k):
            self.grads["K"][j] += np.einsum("btc,bto->co", x[:, j : j + t_out, :], dz)
            dx[:, j : j + t_out, :] += dz @ kern[j].T
        return dx


class MaxPool1D(Layer):
    """Temporal max pooling; gradient routes to the first maximal position."""

    def __init__(self, pool_size: int = 4, stride: int | None = None, name: str = "maxpool"):
        super().__init__(name)
        if pool_size < 1:
            raise ValueError("pool_size must be >= 1")
        self.pool_size = pool_size
        self.stride = stride or pool_size

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        pool, stride = self.pool_size, self.stride
        t_out = (x.shape[1] - pool) // stride + 1
        if t_out < 1:
            raise ValueError(
                f"{self.name}: input length {x.shape[1]} shorter than pool {pool}"
            )
        windows = np.stack(
            [x[:, t * stride : t * stride + pool, :] for t in range(t_out)], axis=1
        )  # (B, T_out, pool, C)
        arg = windows.argmax(axis=2)
        self._cache = (x.shape, arg)
        return windows.max(axis=2)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        shape, arg = self._cache
        b, t_out, c = dout.shape
        dx = np.zeros(shape, dtype=dout.dtype)
        bi, ti, ci = np.ogrid[0:b, 0:t_out, 0:c]
        np.add.at(dx, (bi, ti * self.stride + arg, ci), dout)
        return dx


class GlobalMaxPool1D(Layer):
    """(B, T, C) -> (B, C) maximum over time, first index on ties."""

    def __init__(self, name: str = "gmp"):
        super().__init__(name)

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        arg = x.argmax(axis=1)
        self._cache = (x.shape, arg)
        return x.max(axis=1)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        shape, arg = self._cache
        b, c = dout.shape
        dx = np.zeros(shape, dtype=dout.dtype)
        bi, ci = np.ogrid[0:b, 0:c]
        np.add.at(dx, (bi, arg, ci), dout)
        return dx


class GlobalAvgPool1D(Layer):
    """(B, T, C) -> (B, C) mean over time."""

    def __init__(self, name: str = "gap"):
        super().__init__(name)

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._cache = x.shape
        return x.mean(axis=1)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        shape = self._cache
        return np.broadcast_to(dout[:, None, :] / shape[1], shape).astype(dout.dtype)


class SpatialDropout(Layer):
    """Inverted dropout of whole timestep rows of a (B, T, D) tensor.

    During training each row is zeroed independently with probability `rate`
    and survivors are scaled by 1/(1-rate); inference is the identity.
    """

    def __init__(self, rate: float, rng: np.random.Generator | None = None, name: str = "dropout"):
        super().__init__(name)
        if not 0.0 <= rate < 1.0:
            raise ValueError("rate must lie in [0, 1)")
        self.rate = rate
        self.rng = rng or np.random.default_rng(0)

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        if not training or self.rate == 0.0:
            self._mask = None
            return x
        keep = self.rng.random((x.shape[0], x.shape[1], 1)) >= self.rate
        self._mask = keep.astype(x.dtype) / (1.0 - self.rate)
        return x * self._mask

    def backward(self, dout: np.ndarray) -> np.ndarray:
        if self._mask is None:
            return dout
        return dout * self._mask


class Embedding(Layer):
    """Index lookup into a (V, D) table; row 0 (padding) never updates."""

    def __init__(self, weights: np.ndarray, trainable: bool = True, name: str = "embedding"):
        super().__init__(name)
        self.trainable = trainable
        if trainable:
            self._register(E=weights)
        self.weights = weights

    def forward(self, idx: np.ndarray, training: bool = False) -> np.ndarray:
        self._cache = idx
        return self.weights[idx]

    def backward(self, dout: np.ndarray) -> None:
        if not self.trainable:
            return None
        idx = self._cache
        grad = self.grads["E"]
        np.add.at(grad, idx.reshape(-1), dout.reshape(-1, dout.shape[-1]))
        grad[0] = 0.0
        return None
