"""Adaptive entropy regularization."""

from collections import deque


class EntropyController:
    """
    Keeps the policy entropy near a target by adjusting its coefficient.

    The coefficient moves by ``beta * (target - mean recent entropy)`` per
    update and is clamped at zero.
    """

    def __init__(self, alpha=0.01, beta=0.001, target=1.0, window=10):
        if alpha < 0:
            raise ValueError("Entropy coefficient must be non-negative")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.target = float(target)
        self.window = deque(maxlen=window)

    def observe(self, entropy):
        self.window.append(float(entropy))

    @property
    def mean_entropy(self):
        if not self.window:
            return self.target
        return sum(self.window) / len(self.window)

    def to_dict(self):
        return {'alpha': self.alpha, 'beta': self.beta, 'target': self.target,
                'mean_entropy': self.mean_entropy}


def update_entropy_coeff(controller, observed_entropy):
    """
    Record an empirical entropy and move the coefficient.

    Args:
        controller: ``EntropyController``
        observed_entropy: Mean entropy of the latest batch (>= 0)

    Returns:
        float: Updated coefficient
    """
    if observed_entropy < 0:
        raise ValueError("Entropy must be non-negative")
    controller.observe(observed_entropy)
    controller.alpha = max(0.0, controller.alpha + controller.beta * (controller.target - controller.mean_entropy))
    return controller.alpha
