"""Bootstrap statistics of the stable rank."""

import logging
from dataclasses import dataclass

import numpy as np

from .stable_rank import RankTally, stable_rank, is_undefined

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BootstrapSummary:
    """
    Distribution of stable ranks over resamples.

    Quartiles and whiskers are computed over the defined resamples only;
    whiskers are the most extreme values within 1.5 IQR of the box.
    """

    k: int
    n: int
    values: tuple
    undefined: int
    q1: float = None
    median: float = None
    q3: float = None
    whisker_low: float = None
    whisker_high: float = None
    mean: float = None

    @property
    def iqr(self):
        return None if self.q1 is None else self.q3 - self.q1

    @property
    def undefined_fraction(self):
        return self.undefined / self.n if self.n else 0.0

    @property
    def all_undefined(self):
        return self.n > 0 and self.undefined == self.n

    def to_dict(self):
        return {
            'k': self.k,
            'n': self.n,
            'undefined': self.undefined,
            'undefined_fraction': self.undefined_fraction,
            'q1': self.q1,
            'median': self.median,
            'q3': self.q3,
            'iqr': self.iqr,
            'whisker_low': self.whisker_low,
            'whisker_high': self.whisker_high,
            'mean': self.mean,
        }


def _ranks_of(records):
    if isinstance(records, np.ndarray):
        ranks = records.astype(np.int64)
    else:
        ranks = np.asarray([int(getattr(r, 'rank', r)) for r in records], dtype=np.int64)
    if ranks.size and (ranks.min() < 1 or ranks.max() > 4):
        raise ValueError("Final ranks must lie in 1..4")
    return ranks


def summarize(values, k, n, undefined):
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return BootstrapSummary(k, n, (), undefined)
    q1, median, q3 = np.percentile(values, [25, 50, 75])
    iqr = q3 - q1
    inside = values[(values >= q1 - 1.5 * iqr) & (values <= q3 + 1.5 * iqr)]
    return BootstrapSummary(
        k=k, n=n, values=tuple(float(v) for v in values), undefined=undefined,
        q1=float(q1), median=float(median), q3=float(q3),
        whisker_low=float(inside.min()), whisker_high=float(inside.max()),
        mean=float(values.mean()),
    )


def bootstrap_stable_rank(records, k, n, seed=0):
    """
    Stable rank over ``n`` resamples of ``k`` games drawn without replacement.

    Args:
        records: Final ranks of the agent under test, or objects with a ``rank``
        k: Games per resample
        n: Number of resamples
        seed: Seed of the resampling generator

    Returns:
        BootstrapSummary

    Raises:
        ValueError: If ``k`` exceeds the number of records
    """
    ranks = _ranks_of(records)
    if not 0 < k <= ranks.size:
        raise ValueError(f"Resample size {k} must lie in 1..{ranks.size}")
    rng = np.random.default_rng(seed)
    values = []
    undefined = 0
    for _ in range(n):
        picked = ranks[rng.choice(ranks.size, size=k, replace=False)]
        counts = np.bincount(picked, minlength=5)[1:]
        value = stable_rank(RankTally(*(int(c) for c in counts)))
        if is_undefined(value):
            undefined += 1
        else:
            values.append(value)
    if undefined:
        logger.warning(f"{undefined}/{n} resamples had no 4th place; excluded from quartiles")
    return summarize(values, k, n, undefined)
