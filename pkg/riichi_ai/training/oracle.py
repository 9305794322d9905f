"""Oracle guiding: the dropout schedule on hidden-information features and the continual-training guard."""

from dataclasses import dataclass

import numpy as np


class OracleSchedule:
    """
    Keep-probability of oracle features per update.

    Decays linearly from ``start`` to 0 over ``decay_updates`` updates and
    stays at 0 afterwards.
    """

    def __init__(self, decay_updates=2000, start=1.0):
        if not 0.0 <= start <= 1.0:
            raise ValueError("Schedule start must lie in [0, 1]")
        self.decay_updates = int(decay_updates)
        self.start = float(start)

    def gamma(self, update):
        if self.decay_updates <= 0:
            return 0.0
        return max(0.0, self.start * (1.0 - update / self.decay_updates))

    def transitioned(self, update):
        """Whether ``update`` lies in the post-transition phase."""
        return self.gamma(update) == 0.0

    def to_dict(self):
        return {'kind': 'linear', 'decay_updates': self.decay_updates, 'start': self.start}


def apply_oracle_dropout(planes, gamma, rng):
    """
    Keep each oracle element independently with probability ``gamma``.

    Args:
        planes: Oracle-extension array
        gamma: Keep probability in [0, 1]
        rng: ``numpy.random.Generator``

    Returns:
        np.ndarray: Masked copy with the input dtype
    """
    planes = np.asarray(planes)
    if gamma >= 1.0:
        return planes.copy()
    if gamma <= 0.0:
        return np.zeros_like(planes)
    keep = rng.random(planes.shape) < gamma
    return (planes * keep).astype(planes.dtype)


@dataclass
class GuardResult:
    keep: np.ndarray
    learning_rate: float
    rejected: int
    active: bool


def continual_guard(importance_weights, post_transition, base_learning_rate, w_max=10.0,
                    lr_factor=0.1):
    """
    Learning rate and step filter for continual training after the oracle is gone.

    Args:
        importance_weights: Current over behaviour probability, per step
        post_transition: Whether the oracle schedule has reached zero
        base_learning_rate: Learning rate before the transition
        w_max: Steps with a larger weight are dropped
        lr_factor: Multiplier applied to the learning rate

    Returns:
        GuardResult
    """
    weights = np.asarray(importance_weights, dtype=np.float64)
    if not post_transition:
        return GuardResult(np.ones(weights.shape, dtype=bool), base_learning_rate, 0, False)
    keep = weights <= w_max
    return GuardResult(keep, base_learning_rate * lr_factor, int((~keep).sum()), True)
