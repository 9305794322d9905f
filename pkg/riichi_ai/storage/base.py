"""Abstract parameter store interface."""

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

from ..utils.exceptions import CheckpointError


@dataclass(frozen=True)
class ParamSnapshot:
    """One published parameter version: checkpoint blob, metadata and blob checksum."""

    version: int
    blob: bytes
    meta: dict = field(default_factory=dict)
    checksum: str = ''

    @classmethod
    def create(cls, version, blob, meta=None):
        return cls(int(version), bytes(blob), dict(meta or {}), hashlib.sha256(blob).hexdigest())

    def verify(self):
        """
        Raises:
            CheckpointError: If the blob does not match its checksum
        """
        if hashlib.sha256(self.blob).hexdigest() != self.checksum:
            raise CheckpointError(f"Snapshot v{self.version} failed its checksum")
        return True


class ParameterStore(ABC):
    """
    Single-writer, many-reader store of versioned policy parameters.

    Versions strictly increase; ``fetch`` always returns one complete
    snapshot.
    """

    @abstractmethod
    def publish(self, version, blob, meta=None):
        """
        Publish a new version.

        Args:
            version: Integer greater than every published version
            blob: Checkpoint bytes
            meta: JSON-serializable metadata (oracle keep-probability, update id)

        Returns:
            int: The published version

        Raises:
            VersionConflictError: If ``version`` does not increase
        """
        pass

    @abstractmethod
    def fetch(self):
        """
        Latest snapshot.

        Returns:
            ParamSnapshot

        Raises:
            StoreUnavailableError: Before the first publish
        """
        pass

    @abstractmethod
    def fetch_version(self, version):
        """Snapshot of an older version still held in history, or None."""
        pass

    @abstractmethod
    def latest_version(self):
        """Latest published version, or None."""
        pass

    @abstractmethod
    def get_stats(self):
        """
        Get store statistics.

        Returns:
            dict: Statistics (latest_version, published, history)
        """
        pass

    @abstractmethod
    def clear(self):
        """Remove every snapshot."""
        pass
