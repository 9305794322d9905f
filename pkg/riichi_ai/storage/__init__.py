"""Parameter stores, the replay buffer and replay logs."""

from .base import ParameterStore, ParamSnapshot
from .memory_store import MemoryParameterStore
from .sqlite_store import SQLiteParameterStore
from .replay_buffer import ReplayBuffer
from .replay_log import ReplayLog, ReplayWriter, read_replay, write_replay, verify_replay


def create_parameter_store(store_type='memory', db_path=None, history=8):
    """
    Build a parameter store by type name.

    Args:
        store_type: 'memory' or 'sqlite'
        db_path: Database path for 'sqlite'
        history: Versions retained
    """
    if store_type == 'memory':
        return MemoryParameterStore(history=history)
    if store_type == 'sqlite':
        return SQLiteParameterStore(db_path or 'params.db', history=history)
    raise ValueError(f"Unknown store type: {store_type}")


__all__ = [
    'ParameterStore',
    'ParamSnapshot',
    'MemoryParameterStore',
    'SQLiteParameterStore',
    'ReplayBuffer',
    'ReplayLog',
    'ReplayWriter',
    'read_replay',
    'write_replay',
    'verify_replay',
    'create_parameter_store',
]
