"""Versioned channel layout of the 34-column feature planes."""

import hashlib
import json
import os
from collections import OrderedDict

import numpy as np

from ..utils.exceptions import LayoutMismatchError

NUM_COLUMNS = 34
RIVER_RECENCY = 4
LOOKAHEAD_DEPTH = 6
LOOKAHEAD_THRESHOLDS = (1000, 2000, 3900, 7700, 12000)

# Score buckets at 0/10k/20k/30k/40k+; wall buckets in steps of 10.
SCORE_BUCKETS = 5
WALL_BUCKETS = 8
HONBA_BUCKETS = 5
POT_BUCKETS = 4
ROUND_BUCKETS = 8

NORMAL_CHANNELS = (
    ('hand', 4),
    ('drawn_tile', 1),
    ('melds_self', 4), ('melds_next', 4), ('melds_across', 4), ('melds_prev', 4),
    ('river_self', 4), ('river_next', 4), ('river_across', 4), ('river_prev', 4),
    ('recent_self', RIVER_RECENCY), ('recent_next', RIVER_RECENCY),
    ('recent_across', RIVER_RECENCY), ('recent_prev', RIVER_RECENCY),
    ('dora_indicators', 4),
    ('riichi', 4),
    ('round', ROUND_BUCKETS),
    ('dealer', 4),
    ('honba', HONBA_BUCKETS),
    ('pot', POT_BUCKETS),
    ('score_self', SCORE_BUCKETS), ('score_next', SCORE_BUCKETS),
    ('score_across', SCORE_BUCKETS), ('score_prev', SCORE_BUCKETS),
    ('live_wall', WALL_BUCKETS),
    ('seat_wind', 4),
    ('prevalent_wind', 4),
)

ORACLE_CHANNELS = (
    ('hidden_next', 4), ('hidden_across', 4), ('hidden_prev', 4),
    ('wall_live', 4), ('wall_dead', 4),
)

CALL_CHANNELS = (
    ('call_claimed', 1), ('call_consumed', 1), ('call_meld', 1),
)

RELATIVE_NAMES = ('self', 'next', 'across', 'prev')


def _ranges(channels, offset=0):
    ranges = OrderedDict()
    for name, count in channels:
        ranges[name] = (offset, offset + count)
        offset += count
    return ranges


class FeatureLayout:
    """
    Channel registry for every input group of the policy network.

    The network input stacks, in order: normal planes, look-ahead planes
    (depth x thresholds), oracle planes and call-candidate planes.
    """

    def __init__(self, lookahead_depth=LOOKAHEAD_DEPTH, thresholds=LOOKAHEAD_THRESHOLDS):
        self.lookahead_depth = lookahead_depth
        self.thresholds = tuple(thresholds)
        self.normal = _ranges(NORMAL_CHANNELS)
        self.n_normal = sum(count for _, count in NORMAL_CHANNELS)
        self.n_lookahead = lookahead_depth * len(self.thresholds)
        self.oracle = _ranges(ORACLE_CHANNELS)
        self.n_oracle = sum(count for _, count in ORACLE_CHANNELS)
        self.call = _ranges(CALL_CHANNELS)
        self.n_call = sum(count for _, count in CALL_CHANNELS)

    @property
    def total_channels(self):
        return self.n_normal + self.n_lookahead + self.n_oracle + self.n_call

    @property
    def input_slices(self):
        """Slices of the stacked network input by group."""
        a = self.n_normal
        b = a + self.n_lookahead
        c = b + self.n_oracle
        return {
            'normal': slice(0, a),
            'lookahead': slice(a, b),
            'oracle': slice(b, c),
            'call': slice(c, c + self.n_call),
        }

    def descriptor(self):
        """Channel name -> [start, end) over the stacked input."""
        out = OrderedDict()
        for name, (start, end) in self.normal.items():
            out[f"normal.{name}"] = [start, end]
        base = self.n_normal
        for k in range(self.lookahead_depth):
            for i, threshold in enumerate(self.thresholds):
                index = base + k * len(self.thresholds) + i
                out[f"lookahead.k{k + 1}.s{threshold}"] = [index, index + 1]
        base += self.n_lookahead
        for name, (start, end) in self.oracle.items():
            out[f"oracle.{name}"] = [base + start, base + end]
        base += self.n_oracle
        for name, (start, end) in self.call.items():
            out[f"call.{name}"] = [base + start, base + end]
        return out

    @property
    def layout_version(self):
        """Identifier that changes whenever channel ordering or counts change."""
        text = json.dumps(self.descriptor(), sort_keys=False, separators=(',', ':'))
        digest = hashlib.sha256(text.encode('utf-8')).hexdigest()[:12]
        return f"c{self.total_channels}-{digest}"

    def save_descriptor(self, path):
        """Write the descriptor JSON next to a checkpoint."""
        payload = {'layout_version': self.layout_version, 'channels': self.descriptor()}
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=2)

    def __eq__(self, other):
        return isinstance(other, FeatureLayout) and self.layout_version == other.layout_version

    def __hash__(self):
        return hash(self.layout_version)


DEFAULT_LAYOUT = FeatureLayout()


def cumulative_rows(counts, rows=4):
    """
    Cumulative count encoding: row n is 1 where count > n.

    Args:
        counts: Length-34 counts
        rows: Number of rows

    Returns:
        np.ndarray: ``rows x 34`` uint8
    """
    counts = np.asarray(counts)
    return (counts[None, :] > np.arange(rows)[:, None]).astype(np.uint8)


def dump_planes(path, planes, layout_version):
    """
    Write a plane fixture: an ASCII header line then one byte per cell.

    Args:
        path: Output path
        planes: ``C x 34`` binary array
        layout_version: Layout identifier stored in the header
    """
    planes = np.asarray(planes, dtype=np.uint8)
    header = f"{layout_version} {planes.shape[0]} {planes.shape[1]}\n".encode('ascii')
    out_dir = os.path.dirname(path)
    if out_dir and not os.path.exists(out_dir):
        os.makedirs(out_dir, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(header)
        f.write(np.ascontiguousarray(planes).tobytes(order='C'))


def load_planes(path, expected_version=None):
    """
    Read a plane fixture written by ``dump_planes``.

    Raises:
        LayoutMismatchError: If the header version differs from ``expected_version``
    """
    with open(path, 'rb') as f:
        header = f.readline().decode('ascii').split()
        body = f.read()
    version, rows, cols = header[0], int(header[1]), int(header[2])
    if expected_version is not None and version != expected_version:
        raise LayoutMismatchError(f"Plane file has layout {version}, expected {expected_version}")
    planes = np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)
    return version, planes.copy()
