"""Masked action distributions and action selection."""

from dataclasses import dataclass

import numpy as np
import torch

from ..features.layout import DEFAULT_LAYOUT, NUM_COLUMNS
from ..utils.exceptions import EmptyLegalSetError, LayoutMismatchError
from .network import HEAD_SIZES


@dataclass
class PolicyInput:
    """Stacked network input for one decision: ``total_channels x 34``."""

    planes: np.ndarray
    layout_version: str


@dataclass
class ActionDistribution:
    """Probabilities over one head's outputs; zero outside the legal mask."""

    probs: np.ndarray
    logits: np.ndarray
    mask: np.ndarray
    entropy: float

    def support(self):
        return np.nonzero(self.mask)[0].tolist()


def build_input(observation, lookahead=None, oracle=None, call=None, layout=DEFAULT_LAYOUT):
    """
    Stack feature groups in layout order; missing groups are zero.

    Args:
        observation: ``Observation``
        lookahead: ``LookaheadPlanes`` or None
        oracle: ``OracleExtension`` or None
        call: Call-candidate planes or None

    Returns:
        PolicyInput
    """
    if observation.layout_version != layout.layout_version:
        raise LayoutMismatchError(
            f"Observation layout {observation.layout_version} != {layout.layout_version}")
    planes = np.zeros((layout.total_channels, NUM_COLUMNS), dtype=np.uint8)
    slices = layout.input_slices
    planes[slices['normal']] = observation.planes
    if lookahead is not None:
        planes[slices['lookahead']] = lookahead.flat()
    if oracle is not None:
        planes[slices['oracle']] = oracle.planes
    if call is not None:
        planes[slices['call']] = call
    return PolicyInput(planes, layout.layout_version)


def masked_log_softmax(logits, mask):
    """
    Log-probabilities with illegal entries at ``-inf``.

    Args:
        logits: ``B x A`` tensor
        mask: ``B x A`` bool tensor

    Raises:
        EmptyLegalSetError: If a row has no legal entry
    """
    if not bool(mask.any(dim=-1).all()):
        raise EmptyLegalSetError("Legality mask has no legal action")
    masked = logits.masked_fill(~mask, float('-inf'))
    return torch.log_softmax(masked, dim=-1)


def masked_entropy(log_probs, mask):
    """Entropy over the legal support (differentiable)."""
    probs = log_probs.exp()
    safe = torch.where(mask, log_probs, torch.zeros_like(log_probs))
    return -(probs * safe).sum(dim=-1)


def forward(net, policy_input, head, mask):
    """
    Masked distribution of ``head`` for one decision.

    Args:
        net: ``PolicyNetwork``
        policy_input: ``PolicyInput``
        head: Head name
        mask: Bool array of length ``HEAD_SIZES[head]``

    Returns:
        tuple: (ActionDistribution, value)

    Raises:
        LayoutMismatchError: If the input layout differs from the network's
        EmptyLegalSetError: If the mask is empty
    """
    if policy_input.layout_version != net.layout_version:
        raise LayoutMismatchError(
            f"Input layout {policy_input.layout_version} != network layout {net.layout_version}")
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (HEAD_SIZES[head],):
        raise ValueError(f"Mask for head {head} must have {HEAD_SIZES[head]} entries")
    dtype = next(net.parameters()).dtype
    with torch.no_grad():
        x = torch.as_tensor(policy_input.planes, dtype=dtype).unsqueeze(0)
        logits, value = net(x, head)
        mask_t = torch.as_tensor(mask).unsqueeze(0)
        log_probs = masked_log_softmax(logits, mask_t)
        entropy = masked_entropy(log_probs, mask_t)
    probs = log_probs.exp()[0].cpu().numpy().astype(np.float64)
    dist = ActionDistribution(
        probs=probs,
        logits=logits[0].cpu().numpy().astype(np.float64),
        mask=mask,
        entropy=float(entropy[0]),
    )
    return dist, float(value[0])


def select_action(dist, mode='greedy', rng=None, temperature=1.0, epsilon=0.0):
    """
    Choose an output index from a distribution.

    Args:
        dist: ``ActionDistribution``
        mode: 'greedy', 'sample' or 'epsilon'
        rng: ``numpy.random.Generator`` for the stochastic modes
        temperature: Logit temperature for 'sample' (``inf`` is uniform)
        epsilon: Exploration rate for 'epsilon'

    Returns:
        tuple: (index, probability with which the mode picks that index)
    """
    legal = dist.support()
    greedy = int(np.argmax(np.where(dist.mask, dist.probs, -1.0)))
    if mode == 'greedy':
        return greedy, 1.0
    if mode == 'sample':
        probs = tempered_probs(dist, temperature)
        index = int(rng.choice(len(probs), p=probs))
        return index, float(probs[index])
    if mode == 'epsilon':
        if rng.random() < epsilon:
            index = int(legal[int(rng.integers(len(legal)))])
        else:
            index = greedy
        prob = epsilon / len(legal) + (1.0 - epsilon) * (index == greedy)
        return index, float(prob)
    raise ValueError(f"Unknown selection mode: {mode}")


def tempered_probs(dist, temperature):
    """Legal-support softmax of ``logits / temperature``."""
    if np.isinf(temperature):
        probs = dist.mask.astype(np.float64)
        return probs / probs.sum()
    scaled = np.where(dist.mask, dist.logits / temperature, -np.inf)
    scaled = scaled - scaled[dist.mask].max()
    probs = np.exp(scaled)
    return probs / probs.sum()
