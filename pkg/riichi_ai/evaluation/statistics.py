"""Significance tests for comparing agents."""

from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class RewardComparison:
    mean_a: float
    mean_b: float
    t_stat: float
    p_value: float
    alpha: float

    @property
    def difference(self):
        return self.mean_a - self.mean_b

    @property
    def significant(self):
        return bool(self.p_value < self.alpha)

    def to_dict(self):
        return {
            'mean_a': self.mean_a,
            'mean_b': self.mean_b,
            'difference': self.difference,
            't_stat': self.t_stat,
            'p_value': self.p_value,
            'alpha': self.alpha,
            'significant': self.significant,
        }


def compare_rewards(rewards_a, rewards_b, alpha=0.05):
    """
    One-sided Welch test that agent A earns more than agent B.

    Args:
        rewards_a: Per-game (or per-round) rewards of A
        rewards_b: Same for B
        alpha: Significance level

    Returns:
        RewardComparison
    """
    a = np.asarray(rewards_a, dtype=np.float64)
    b = np.asarray(rewards_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("Each sample needs at least two values")
    t_stat, p_value = stats.ttest_ind(a, b, equal_var=False, alternative='greater')
    return RewardComparison(float(a.mean()), float(b.mean()), float(t_stat), float(p_value), alpha)


def mean_stderr(values):
    """Sample mean and its standard error."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("No values")
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(stats.sem(values))


def pearson(x, y):
    """Pearson correlation and its two-sided p-value."""
    result = stats.pearsonr(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    return float(result[0]), float(result[1])
