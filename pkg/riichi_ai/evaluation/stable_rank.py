"""Rank tallies and the dan-valued stable rank."""

from dataclasses import dataclass


class Undefined:
    """Stable rank of a tally without any fourth place."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'UNDEFINED'

    def __bool__(self):
        return False


UNDEFINED = Undefined()


def is_undefined(value):
    return value is UNDEFINED


@dataclass(frozen=True)
class RankTally:
    """Game counts (or rates) by final rank."""

    n1: float = 0
    n2: float = 0
    n3: float = 0
    n4: float = 0

    def __post_init__(self):
        if min(self.counts) < 0:
            raise ValueError(f"Rank counts must be non-negative, got {self.counts}")

    @classmethod
    def from_ranks(cls, ranks):
        """Tally an iterable of final ranks 1..4."""
        counts = [0, 0, 0, 0]
        for rank in ranks:
            if rank not in (1, 2, 3, 4):
                raise ValueError(f"Invalid final rank {rank}")
            counts[rank - 1] += 1
        return cls(*counts)

    @property
    def counts(self):
        return (self.n1, self.n2, self.n3, self.n4)

    @property
    def total(self):
        return sum(self.counts)

    def rates(self):
        """Fraction of games at each rank."""
        total = self.total
        if total == 0:
            return (0.0, 0.0, 0.0, 0.0)
        return tuple(n / total for n in self.counts)

    def __add__(self, other):
        return RankTally(*(a + b for a, b in zip(self.counts, other.counts)))

    def to_dict(self):
        return {'n1': self.n1, 'n2': self.n2, 'n3': self.n3, 'n4': self.n4}


def stable_rank(tally):
    """
    Long-run dan level implied by a rank distribution: ``(5 n1 + 2 n2) / n4 - 2``.

    Args:
        tally: ``RankTally`` or a 4-sequence of counts or rates

    Returns:
        float, or ``UNDEFINED`` when no game finished fourth
    """
    if not isinstance(tally, RankTally):
        tally = RankTally(*tally)
    if tally.n4 == 0:
        return UNDEFINED
    return (5 * tally.n1 + 2 * tally.n2) / tally.n4 - 2
