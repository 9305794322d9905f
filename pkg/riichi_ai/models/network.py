"""Convolutional policy network over the 34-column feature planes."""

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..features.layout import DEFAULT_LAYOUT, NUM_COLUMNS

HEADS = ('discard', 'riichi', 'chow', 'pong', 'kong')
HEAD_SIZES = {'discard': 34, 'riichi': 2, 'chow': 2, 'pong': 2, 'kong': 2}
BINARY_HEADS = ('riichi', 'chow', 'pong', 'kong')


class ResBlock(nn.Module):
    """Two 1-D convolutions with a skip connection."""

    def __init__(self, filters, kernel_size=3):
        super().__init__()
        padding = kernel_size // 2
        self.conv1 = nn.Conv1d(filters, filters, kernel_size, padding=padding)
        self.conv2 = nn.Conv1d(filters, filters, kernel_size, padding=padding)

    def forward(self, x):
        out = F.relu(self.conv1(x))
        out = self.conv2(out)
        return F.relu(out + x)


class BinaryHead(nn.Module):
    """Yes/no decision from a 1x1 projection of the trunk."""

    def __init__(self, filters, outputs=2):
        super().__init__()
        self.project = nn.Conv1d(filters, 1, 1)
        self.linear = nn.Linear(NUM_COLUMNS, outputs)

    def forward(self, features):
        return self.linear(self.project(features).squeeze(1))


class PolicyNetwork(nn.Module):
    """
    Shared residual trunk with discard, riichi, chow, pong, kong and value heads.

    The oracle slice of the input is multiplied by ``oracle_gate`` before the
    trunk; closing the gate makes outputs independent of oracle values.
    """

    def __init__(self, layout=DEFAULT_LAYOUT, blocks=6, filters=64, kernel_size=3):
        super().__init__()
        self.layout = layout
        self.layout_version = layout.layout_version
        self.config = {'blocks': blocks, 'filters': filters, 'kernel_size': kernel_size}
        self.version = 0

        self.conv_input = nn.Conv1d(layout.total_channels, filters, kernel_size, padding=kernel_size // 2)
        self.res_blocks = nn.ModuleList([ResBlock(filters, kernel_size) for _ in range(blocks)])

        self.discard_project = nn.Conv1d(filters, 1, 1)
        self.discard_bias = nn.Parameter(torch.zeros(NUM_COLUMNS))
        self.binary_heads = nn.ModuleDict({name: BinaryHead(filters) for name in BINARY_HEADS})
        self.value_head = BinaryHead(filters, outputs=1)

        gate = torch.ones(layout.total_channels, 1)
        self.register_buffer('oracle_gate', gate)

    def set_oracle_enabled(self, enabled):
        """Open or close the oracle slice of the input."""
        gate = torch.ones_like(self.oracle_gate)
        if not enabled:
            gate[self.layout.input_slices['oracle']] = 0.0
        self.oracle_gate.copy_(gate)

    @property
    def oracle_enabled(self):
        return bool(self.oracle_gate[self.layout.input_slices['oracle']].all())

    def trunk(self, x):
        x = x * self.oracle_gate
        out = F.relu(self.conv_input(x))
        for block in self.res_blocks:
            out = block(out)
        return out

    def forward(self, x, head):
        """
        Logits of ``head`` and the value estimate.

        Args:
            x: ``B x C x 34`` input
            head: One of ``HEADS``

        Returns:
            tuple: (``B x HEAD_SIZES[head]`` logits, ``B`` values)
        """
        features = self.trunk(x)
        value = self.value_head(features).squeeze(-1)
        return self.head_logits(features, head), value

    def head_logits(self, features, head):
        """Logits of ``head`` from trunk features (``B x filters x 34``)."""
        if head == 'discard':
            return self.discard_project(features).squeeze(1) + self.discard_bias
        return self.binary_heads[head](features)

    def head_parameters(self, heads):
        """Parameters owned by the given heads (the trunk excluded)."""
        params = []
        for head in heads:
            if head == 'discard':
                params.extend(self.discard_project.parameters())
                params.append(self.discard_bias)
            else:
                params.extend(self.binary_heads[head].parameters())
        return params

    def clone(self):
        """Independent copy carrying the same version and gate."""
        other = PolicyNetwork(self.layout, **self.config)
        other.to(next(self.parameters()).dtype)
        other.load_state_dict(self.state_dict())
        other.version = self.version
        return other


def zero_parameters(net):
    """Set every parameter to zero."""
    with torch.no_grad():
        for param in net.parameters():
            param.zero_()
    return net
