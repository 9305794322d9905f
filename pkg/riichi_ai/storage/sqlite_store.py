"""SQLite parameter store."""

import json
import logging
import os
import sqlite3
import threading

from ..utils.exceptions import StoreUnavailableError, VersionConflictError
from .base import ParameterStore, ParamSnapshot

logger = logging.getLogger(__name__)


class SQLiteParameterStore(ParameterStore):
    """SQLite-backed parameter store with a durable version history."""

    def __init__(self, db_path='params.db', history=8):
        """
        Initialize SQLite store.

        Args:
            db_path: Path to SQLite database file
            history: Versions kept on disk (0 keeps all)
        """
        self.db_path = db_path
        self.history = history
        self._lock = threading.Lock()
        db_dir = os.path.dirname(db_path)
        if db_dir:
            os.makedirs(db_dir, exist_ok=True)
        self._init_database()

    def _connect(self):
        return sqlite3.connect(self.db_path, timeout=30)

    def _init_database(self):
        """Create database tables if they don't exist."""
        conn = self._connect()
        cursor = conn.cursor()

        cursor.execute('''
            CREATE TABLE IF NOT EXISTS snapshots (
                version INTEGER PRIMARY KEY,
                blob BLOB NOT NULL,
                meta TEXT,
                checksum TEXT NOT NULL,
                created_at TEXT DEFAULT CURRENT_TIMESTAMP
            )
        ''')

        conn.commit()
        conn.close()

    def publish(self, version, blob, meta=None):
        snapshot = ParamSnapshot.create(version, blob, meta)
        with self._lock:
            conn = self._connect()
            try:
                cursor = conn.cursor()
                cursor.execute('BEGIN IMMEDIATE')
                cursor.execute('SELECT MAX(version) FROM snapshots')
                (latest,) = cursor.fetchone()
                if latest is not None and snapshot.version <= latest:
                    conn.rollback()
                    raise VersionConflictError(
                        f"Version {snapshot.version} does not exceed published version {latest}")
                cursor.execute('''
                    INSERT INTO snapshots (version, blob, meta, checksum)
                    VALUES (?, ?, ?, ?)
                ''', (snapshot.version, sqlite3.Binary(snapshot.blob),
                      json.dumps(snapshot.meta, sort_keys=True), snapshot.checksum))
                if self.history:
                    cursor.execute('''
                        DELETE FROM snapshots WHERE version NOT IN (
                            SELECT version FROM snapshots ORDER BY version DESC LIMIT ?
                        )
                    ''', (self.history,))
                conn.commit()
            finally:
                conn.close()
        logger.debug(f"Published parameters v{snapshot.version} to {self.db_path}")
        return snapshot.version

    def _select(self, where, params=()):
        conn = self._connect()
        try:
            cursor = conn.cursor()
            cursor.execute(f'SELECT version, blob, meta, checksum FROM snapshots {where}', params)
            row = cursor.fetchone()
        finally:
            conn.close()
        if row is None:
            return None
        version, blob, meta, checksum = row
        return ParamSnapshot(version, bytes(blob), json.loads(meta) if meta else {}, checksum)

    def fetch(self):
        snapshot = self._select('ORDER BY version DESC LIMIT 1')
        if snapshot is None:
            raise StoreUnavailableError("No parameters have been published")
        snapshot.verify()
        return snapshot

    def fetch_version(self, version):
        return self._select('WHERE version = ?', (version,))

    def latest_version(self):
        conn = self._connect()
        try:
            cursor = conn.cursor()
            cursor.execute('SELECT MAX(version) FROM snapshots')
            (latest,) = cursor.fetchone()
        finally:
            conn.close()
        return latest

    def get_stats(self):
        conn = self._connect()
        try:
            cursor = conn.cursor()
            cursor.execute('SELECT version FROM snapshots ORDER BY version')
            versions = [row[0] for row in cursor.fetchall()]
        finally:
            conn.close()
        return {
            'latest_version': versions[-1] if versions else None,
            'published': len(versions),
            'history': versions,
            'database_path': self.db_path,
        }

    def clear(self):
        with self._lock:
            conn = self._connect()
            try:
                conn.execute('DELETE FROM snapshots')
                conn.commit()
            finally:
                conn.close()
