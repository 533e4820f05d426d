"""LSTM and GRU sequence layers with full backpropagation through time.

Both layers use fused gate matrices: the LSTM kernel holds the input, forget,
candidate and output gates side by side as (D, 4H) / (H, 4H); the GRU fuses
the update and reset gates as (D, 2H) / (H, 2H) with a separate candidate
kernel, because the candidate sees the reset-scaled previous state.  Input
kernels are Glorot-uniform, recurrent kernels are built from per-gate
orthogonal blocks, and the LSTM forget-gate bias starts at one.
"""

import numpy as np

from .layers import Layer, glorot_uniform, orthogonal, sigmoid


def lstm_step(
    x_t: np.ndarray,
    h_prev: np.ndarray,
    c_prev: np.ndarray,
    W: np.ndarray,
    U: np.ndarray,
    b: np.ndarray,
):
    """One LSTM step over a batch; returns (h_t, c_t, cache).

    Gate order in the fused matrices is input, forget, candidate, output:

        i = sigmoid(a_i), f = sigmoid(a_f), g = tanh(a_g), o = sigmoid(a_o)
        c_t = f * c_prev + i * g
        h_t = o * tanh(c_t)
    """
    units = U.shape[0]
    a = x_t @ W + h_prev @ U + b
    i = sigmoid(a[:, :units])
    f = sigmoid(a[:, units : 2 * units])
    g = np.tanh(a[:, 2 * units : 3 * units])
    o = sigmoid(a[:, 3 * units :])
    c_t = f * c_prev + i * g
    tc = np.tanh(c_t)
    h_t = o * tc
    cache = (x_t, h_prev, c_prev, i, f, g, o, tc)
    return h_t, c_t, cache


def _lstm_step_backward(dh, dc, cache, W, U, grads):
    x_t, h_prev, c_prev, i, f, g, o, tc = cache
    do = dh * tc
    dc = dc + dh * o * (1.0 - tc * tc)
    da = np.concatenate(
        [
            dc * g * i * (1.0 - i),
            dc * c_prev * f * (1.0 - f),
            dc * i * (1.0 - g * g),
            do * o * (1.0 - o),
        ],
        axis=1,
    )
    grads["W"] += x_t.T @ da
    grads["U"] += h_prev.T @ da
    grads["b"] += da.sum(axis=0)
    return da @ W.T, da @ U.T, dc * f


def gru_step(
    x_t: np.ndarray,
    h_prev: np.ndarray,
    Wg: np.ndarray,
    Ug: np.ndarray,
    bg: np.ndarray,
    Wc: np.ndarray,
    Uc: np.ndarray,
    bc: np.ndarray,
):
    """One GRU step over a batch; returns (h_t, cache).

        z, r = sigmoid(x @ Wg + h_prev @ Ug + bg)   (split in halves)
        hbar = tanh(x @ Wc + (r * h_prev) @ Uc + bc)
        h_t  = (1 - z) * h_prev + z * hbar
    """
    units = Ug.shape[0]
    a = x_t @ Wg + h_prev @ Ug + bg
    z = sigmoid(a[:, :units])
    r = sigmoid(a[:, units:])
    rh = r * h_prev
    hbar = np.tanh(x_t @ Wc + rh @ Uc + bc)
    h_t = (1.0 - z) * h_prev + z * hbar
    cache = (x_t, h_prev, z, r, rh, hbar)
    return h_t, cache


def _gru_step_backward(dh, cache, Wg, Ug, Wc, Uc, grads):
    x_t, h_prev, z, r, rh, hbar = cache
    dz = dh * (hbar - h_prev)
    dhbar = dh * z
    dh_prev = dh * (1.0 - z)
    dac = dhbar * (1.0 - hbar * hbar)
    grads["Wc"] += x_t.T @ dac
    grads["Uc"] += rh.T @ dac
    grads["bc"] += dac.sum(axis=0)
    drh = dac @ Uc.T
    dh_prev += drh * r
    dag = np.concatenate(
        [dz * z * (1.0 - z), drh * h_prev * r * (1.0 - r)], axis=1
    )
    grads["Wg"] += x_t.T @ dag
    grads["Ug"] += h_prev.T @ dag
    grads["bg"] += dag.sum(axis=0)
    dh_prev += dag @ Ug.T
    dx_t = dag @ Wg.T + dac @ Wc.T
    return dx_t, dh_prev


def _orthogonal_blocks(rng, units, gates, dtype):
    return np.concatenate([orthogonal(rng, units, dtype) for _ in range(gates)], axis=1)


class LSTM(Layer):
    """Single-direction LSTM over (B, T, D) input."""

    def __init__(
        self,
        in_dim: int,
        units: int,
        return_sequences: bool = False,
        rng: np.random.Generator | None = None,
        dtype=np.float32,
        name: str = "lstm",
    ):
        super().__init__(name)
        self.units = units
        self.return_sequences = return_sequences
        rng = rng or np.random.default_rng(0)
        b = np.zeros(4 * units, dtype=dtype)
        b[units : 2 * units] = 1.0  # forget-gate bias
        self._register(
            W=glorot_uniform(rng, (in_dim, 4 * units), dtype),
            U=_orthogonal_blocks(rng, units, 4, dtype),
            b=b,
        )

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        batch, steps, _ = x.shape
        dtype = self.params["W"].dtype
        h = np.zeros((batch, self.units), dtype=dtype)
        c = np.zeros((batch, self.units), dtype=dtype)
        caches = []
        outputs = np.empty((batch, steps, self.units), dtype=dtype)
        for t in range(steps):
            h, c, cache = lstm_step(
                x[:, t, :], h, c, self.params["W"], self.params["U"], self.params["b"]
            )
            caches.append(cache)
            outputs[:, t, :] = h
        self._cache = (x.shape, caches)
        return outputs if self.return_sequences else h

    def backward(self, dout: np.ndarray) -> np.ndarray:
        shape, caches = self._cache
        batch, steps, _ = shape
        dx = np.zeros(shape, dtype=dout.dtype)
        dh = np.zeros((batch, self.units), dtype=dout.dtype)
        dc = np.zeros((batch, self.units), dtype=dout.dtype)
        for t in range(steps - 1, -1, -1):
            if self.return_sequences:
                dh = dh + dout[:, t, :]
            elif t == steps - 1:
                dh = dh + dout
            dx_t, dh, dc = _lstm_step_backward(
                dh, dc, caches[t], self.params["W"], self.params["U"], self.grads
            )
            dx[:, t, :] = dx_t
        return dx


class GRU(Layer):
    """Single-direction GRU over (B, T, D) input."""

    def __init__(
        self,
        in_dim: int,
        units: int,
        return_sequences: bool = False,
        rng: np.random.Generator | None = None,
        dtype=np.float32,
        name: str = "gru",
    ):
        super().__init__(name)
        self.units = units
        self.return_sequences = return_sequences
        rng = rng or np.random.default_rng(0)
        self._register(
            Wg=glorot_uniform(rng, (in_dim, 2 * units), dtype),
            Ug=_orthogonal_blocks(rng, units, 2, dtype),
            bg=np.zeros(2 * units, dtype=dtype),
            Wc=glorot_uniform(rng, (in_dim, units), dtype),
            Uc=orthogonal(rng, units, dtype),
            bc=np.zeros(units, dtype=dtype),
        )

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        batch, steps, _ = x.shape
        p = self.params
        h = np.zeros((batch, self.units), dtype=p["Wg"].dtype)
        caches = []
        outputs = np.empty((batch, steps, self.units), dtype=h.dtype)
        for t in range(steps):
            h, cache = gru_step(
                x[:, t, :], h, p["Wg"], p["Ug"], p["bg"], p["Wc"], p["Uc"], p["bc"]
            )
            caches.append(cache)
            outputs[:, t, :] = h
        self._cache = (x.shape, caches)
        return outputs if self.return_sequences else h

    def backward(self, dout: np.ndarray) -> np.ndarray:
        shape, caches = self._cache
        batch, steps, _ = shape
        p = self.params
        dx = np.zeros(shape, dtype=dout.dtype)
        dh = np.zeros((batch, self.units), dtype=dout.dtype)
        for t in range(steps - 1, -1, -1):
            if self.return_sequences:
                dh = dh + dout[:, t, :]
            elif t == steps - 1:
                dh = dh + dout
            dx_t, dh = _gru_step_backward(
                dh, caches[t], p["Wg"], p["Ug"], p["Wc"], p["Uc"], self.grads
            )
            dx[:, t, :] = dx_t
        return dx


class Bidirectional(Layer):
    """Runs one layer forward in time and an independent twin backward.

    Outputs are concatenated on the feature axis: per timestep when the
    children return sequences, otherwise as the pair of final states.
    """

    def __init__(self, fwd: Layer, bwd: Layer, name: str = "bidi"):
        super().__init__(name)
        if fwd.return_sequences != bwd.return_sequences:
            raise ValueError("directions must agree on return_sequences")
        self.fwd = fwd
        self.bwd = bwd
        self.return_sequences = fwd.return_sequences

    @property
    def children(self) -> list[Layer]:
        return [self.fwd, self.bwd]

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        out_f = self.fwd.forward(x, training)
        out_b = self.bwd.forward(np.ascontiguousarray(x[:, ::-1, :]), training)
        if self.return_sequences:
            return np.concatenate([out_f, out_b[:, ::-1, :]], axis=2)
        return np.concatenate([out_f, out_b], axis=1)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        units = self.fwd.units
        if self.return_sequences:
            d_f = dout[:, :, :units]
            d_b = np.ascontiguousarray(dout[:, ::-1, units:])
        else:
            d_f = dout[:, :units]
            d_b = dout[:, units:]
        dx = self.fwd.backward(np.ascontiguousarray(d_f))
        dx_b = self.bwd.backward(d_b)
        return dx + dx_b[:, ::-1, :]

    def zero_grads(self) -> None:
        self.fwd.zero_grads()
        self.bwd.zero_grads()
