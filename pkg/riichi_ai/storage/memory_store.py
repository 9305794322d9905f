"""In-memory parameter store."""

import threading
from collections import OrderedDict

from ..utils.exceptions import StoreUnavailableError, VersionConflictError
from .base import ParameterStore, ParamSnapshot


class MemoryParameterStore(ParameterStore):
    """Parameter store holding snapshots in process memory."""

    def __init__(self, history=8):
        """
        Initialize memory store.

        Args:
            history: Number of recent versions kept for ``fetch_version``
        """
        self.history = max(1, history)
        self._snapshots = OrderedDict()
        # Readers take the reference without the lock; swapping it is atomic
        self._latest = None
        self._published = 0
        self._lock = threading.Lock()

    def publish(self, version, blob, meta=None):
        snapshot = ParamSnapshot.create(version, blob, meta)
        with self._lock:
            if self._latest is not None and snapshot.version <= self._latest.version:
                raise VersionConflictError(
                    f"Version {snapshot.version} does not exceed published version {self._latest.version}")
            self._snapshots[snapshot.version] = snapshot
            while len(self._snapshots) > self.history:
                self._snapshots.popitem(last=False)
            self._latest = snapshot
            self._published += 1
        return snapshot.version

    def fetch(self):
        snapshot = self._latest
        if snapshot is None:
            raise StoreUnavailableError("No parameters have been published")
        return snapshot

    def fetch_version(self, version):
        with self._lock:
            return self._snapshots.get(version)

    def latest_version(self):
        snapshot = self._latest
        return None if snapshot is None else snapshot.version

    def get_stats(self):
        with self._lock:
            return {
                'latest_version': self.latest_version(),
                'published': self._published,
                'history': list(self._snapshots),
            }

    def clear(self):
        with self._lock:
            self._snapshots.clear()
            self._latest = None
            self._published = 0
