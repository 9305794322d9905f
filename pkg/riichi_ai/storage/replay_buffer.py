"""Bounded FIFO replay buffer shared by self-play workers and the trainer."""

import threading
from collections import deque

import numpy as np

from ..utils.exceptions import BufferNotReadyError


class ReplayBuffer:
    """
    Multi-producer, single-consumer buffer of round trajectories.

    Pushing past capacity evicts the oldest entry. ``sample`` draws
    uniformly without replacement and removes nothing.
    """

    def __init__(self, capacity=20000, seed=None):
        if capacity < 1:
            raise ValueError("Replay buffer capacity must be positive")
        self.capacity = capacity
        self._items = deque()
        self._lock = threading.Lock()
        self._rng = np.random.default_rng(seed)
        self.pushed = 0
        self.evicted = 0
        self.sampled = 0

    def push(self, item):
        with self._lock:
            self._items.append(item)
            self.pushed += 1
            if len(self._items) > self.capacity:
                self._items.popleft()
                self.evicted += 1

    def extend(self, items):
        for item in items:
            self.push(item)

    def sample(self, n):
        """
        Draw ``n`` distinct entries uniformly.

        Raises:
            BufferNotReadyError: If fewer than ``n`` entries are held
        """
        with self._lock:
            size = len(self._items)
            if n > size:
                raise BufferNotReadyError(f"Requested {n} trajectories, buffer holds {size}")
            indices = self._rng.choice(size, size=n, replace=False)
            batch = [self._items[i] for i in indices]
            self.sampled += n
        return batch

    def snapshot(self):
        """Current contents, oldest first."""
        with self._lock:
            return list(self._items)

    def __len__(self):
        with self._lock:
            return len(self._items)

    @property
    def fill(self):
        return len(self) / self.capacity

    def get_stats(self):
        with self._lock:
            return {
                'size': len(self._items),
                'capacity': self.capacity,
                'pushed': self.pushed,
                'evicted': self.evicted,
                'sampled': self.sampled,
            }
