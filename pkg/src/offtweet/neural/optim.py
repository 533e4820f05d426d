"""Adam optimizer with iteration-based learning-rate decay."""

import numpy as np


class Adam:
    """Adam with the step rate alpha_t = alpha / (1 + decay * t).

    The iteration counter increments before each update, so the very first
    step already uses t = 1 for both the decayed rate and the bias
    corrections.  Moment buffers are keyed by parameter name and updated in
    place; parameters are modified in place as well.
    """

    def __init__(
        self,
        learning_rate: float = 0.001,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
        decay: float = 0.001,
    ):
        if not 0.0 <= beta1 < 1.0 or not 0.0 <= beta2 < 1.0:
            raise ValueError("betas must lie in [0, 1)")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.decay = decay
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def current_rate(self) -> float:
        return self.learning_rate / (1.0 + self.decay * self.t)

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        """Apply one update to every named parameter array."""
        self.t += 1
        rate = self.current_rate()
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for name, p in params.items():
            g = grads[name]
            m = self.m.get(name)
            if m is None:
                m = self.m[name] = np.zeros_like(p)
            v = self.v.get(name)
            if v is None:
                v = self.v[name] = np.zeros_like(p)
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= rate * (m / bc1) / (np.sqrt(v / bc2) + self.epsilon)
