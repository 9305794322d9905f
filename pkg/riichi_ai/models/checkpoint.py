"""
Checkpoint blobs.

Layout: ``RIAI`` magic, a 4-byte little-endian header length, a JSON header
(format version, type tag, layout_version, rule-config hash, parameter
version, network config, tensor names and shapes, parameter count), the
little-endian float32 payload and a trailing SHA-256 of everything before it.
"""

import hashlib
import json
import os
import struct
from collections import OrderedDict

import numpy as np
import torch

from .. import FORMAT_VERSION
from ..features.layout import FeatureLayout
from ..utils.exceptions import CheckpointError, LayoutMismatchError
from .network import PolicyNetwork

MAGIC = b'RIAI'
POLICY_TAG = 'policy'
DIGEST_SIZE = 32


def encode_blob(tag, tensors, meta):
    """
    Serialize named tensors with a header.

    Args:
        tag: Blob type tag
        tensors: Ordered mapping name -> tensor
        meta: Extra JSON-serializable header fields

    Returns:
        bytes
    """
    shapes = [[name, list(t.shape)] for name, t in tensors.items()]
    arrays = [t.detach().cpu().numpy().astype('<f4').ravel() for t in tensors.values()]
    payload = np.concatenate(arrays).tobytes() if arrays else b''
    header = dict(meta)
    header.update({
        'format_version': FORMAT_VERSION,
        'type': tag,
        'tensors': shapes,
        'parameter_count': int(sum(a.size for a in arrays)),
    })
    header_bytes = json.dumps(header, sort_keys=True, separators=(',', ':')).encode('utf-8')
    body = MAGIC + struct.pack('<I', len(header_bytes)) + header_bytes + payload
    return body + hashlib.sha256(body).digest()


def decode_blob(blob, tag=None):
    """
    Parse and verify a blob.

    Returns:
        tuple: (header dict, OrderedDict name -> float32 tensor)

    Raises:
        CheckpointError: On bad magic, checksum, format version or type tag
    """
    if len(blob) < len(MAGIC) + 4 + DIGEST_SIZE or blob[:4] != MAGIC:
        raise CheckpointError("Not a checkpoint blob")
    body, digest = blob[:-DIGEST_SIZE], blob[-DIGEST_SIZE:]
    if hashlib.sha256(body).digest() != digest:
        raise CheckpointError("Checkpoint checksum mismatch")
    (header_len,) = struct.unpack('<I', body[4:8])
    try:
        header = json.loads(body[8:8 + header_len].decode('utf-8'))
    except ValueError as e:
        raise CheckpointError(f"Unreadable checkpoint header: {e}")
    if header.get('format_version') != FORMAT_VERSION:
        raise CheckpointError(f"Unsupported checkpoint format {header.get('format_version')}")
    if tag is not None and header.get('type') != tag:
        raise CheckpointError(f"Expected a {tag} checkpoint, got {header.get('type')}")
    payload = np.frombuffer(body[8 + header_len:], dtype='<f4')
    if payload.size != header['parameter_count']:
        raise CheckpointError("Checkpoint payload size does not match its header")
    tensors = OrderedDict()
    offset = 0
    for name, shape in header['tensors']:
        size = int(np.prod(shape)) if shape else 1
        tensors[name] = torch.from_numpy(payload[offset:offset + size].reshape(shape).astype(np.float32))
        offset += size
    return header, tensors


def policy_to_blob(net, rules_hash=''):
    meta = {
        'layout_version': net.layout_version,
        'lookahead_depth': net.layout.lookahead_depth,
        'thresholds': list(net.layout.thresholds),
        'rules_hash': rules_hash,
        'version': int(net.version),
        'config': net.config,
    }
    return encode_blob(POLICY_TAG, net.state_dict(), meta)


def policy_from_blob(blob, expected_layout_version=None, expected_rules_hash=None):
    """
    Rebuild a ``PolicyNetwork`` from a blob.

    Raises:
        LayoutMismatchError: If the blob's layout differs from the expected one
        CheckpointError: On corruption or a rule-config hash mismatch
    """
    header, tensors = decode_blob(blob, POLICY_TAG)
    if expected_layout_version is not None and header['layout_version'] != expected_layout_version:
        raise LayoutMismatchError(
            f"Checkpoint layout {header['layout_version']} != expected {expected_layout_version}")
    if expected_rules_hash is not None and header['rules_hash'] != expected_rules_hash:
        raise CheckpointError("Checkpoint was trained under different rules")
    layout = FeatureLayout(header['lookahead_depth'], tuple(header['thresholds']))
    if layout.layout_version != header['layout_version']:
        raise LayoutMismatchError("Checkpoint layout cannot be rebuilt by this version")
    net = PolicyNetwork(layout, **header['config'])
    net.load_state_dict(tensors)
    net.version = header['version']
    return net


def save_checkpoint(net, path, rules_hash=''):
    """
    Write ``net`` to a new file.

    Raises:
        CheckpointError: If ``path`` already exists
    """
    if os.path.exists(path):
        raise CheckpointError(f"Refusing to overwrite checkpoint {path}")
    out_dir = os.path.dirname(path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(policy_to_blob(net, rules_hash))
    return path


def load_checkpoint(path, expected_layout_version=None, expected_rules_hash=None):
    """
    Read a policy checkpoint.

    Raises:
        CheckpointError: If the file is missing or corrupt
    """
    if not os.path.exists(path):
        raise CheckpointError(f"Checkpoint not found: {path}")
    with open(path, 'rb') as f:
        blob = f.read()
    return policy_from_blob(blob, expected_layout_version, expected_rules_hash)


def read_header(path):
    with open(path, 'rb') as f:
        blob = f.read()
    header, _ = decode_blob(blob)
    return header
