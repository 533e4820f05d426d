"""Small shared helpers."""

import numpy as np


def seed_sequence(seed) -> np.random.SeedSequence:
    """Normalize an int (or an existing SeedSequence) into a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)
