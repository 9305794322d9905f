"""
Importance-sampled policy gradient with an entropy bonus.

For steps collected by a behaviour policy, the surrogate

    L = -mean(ratio * A) - alpha * mean(H) + c_v * mean((V - R)^2)

with ``ratio = pi(a|s) / b(a|s)`` and ``A = R - V`` (baseline not
differentiated) has gradient ``-mean(ratio * grad log pi(a|s) * A) -
alpha * grad H`` in the policy parameters. Behaviour probabilities always
come from the stored trajectories.
"""

from dataclasses import dataclass, asdict

import numpy as np
import torch

from ..models.distribution import masked_entropy, masked_log_softmax


@dataclass
class PGDiagnostics:
    loss: float = 0.0
    policy_loss: float = 0.0
    value_loss: float = 0.0
    entropy: float = 0.0
    mean_is_weight: float = 0.0
    max_is_weight: float = 0.0
    n_steps: int = 0

    def to_dict(self):
        return asdict(self)


def _check_finite(batch):
    for name in ('returns', 'behavior_probs'):
        values = getattr(batch, name)
        if not np.all(np.isfinite(values)):
            raise ValueError(f"Non-finite {name} in {batch.head} batch")
    if not np.all(np.isfinite(batch.planes)):
        raise ValueError(f"Non-finite planes in {batch.head} batch")


def _head_terms(net, batch, dtype):
    x = torch.as_tensor(batch.planes, dtype=dtype)
    mask = torch.as_tensor(batch.masks)
    actions = torch.as_tensor(batch.actions).unsqueeze(1)
    returns = torch.as_tensor(batch.returns, dtype=dtype)
    behavior = torch.as_tensor(batch.behavior_probs, dtype=dtype)

    logits, value = net(x, batch.head)
    log_probs = masked_log_softmax(logits, mask)
    ratio = torch.exp(log_probs.gather(1, actions).squeeze(1) - torch.log(behavior))
    advantage = returns - value.detach()
    policy_loss = -(ratio * advantage).mean()
    entropy = masked_entropy(log_probs, mask).mean()
    value_loss = ((value - returns) ** 2).mean()
    return policy_loss, entropy, value_loss, ratio.detach()


def pg_loss(net, batches, alpha, value_coef=0.5):
    """
    Surrogate loss over one or more head batches.

    Args:
        net: ``PolicyNetwork``
        batches: ``HeadBatch`` list (empty batches are skipped)
        alpha: Entropy coefficient
        value_coef: Weight of the baseline regression

    Returns:
        tuple: (loss tensor, PGDiagnostics)

    Raises:
        ValueError: If the batch is empty or holds non-finite values
    """
    batches = [b for b in batches if b is not None and len(b)]
    if not batches:
        raise ValueError("Policy-gradient batch is empty")
    dtype = next(net.parameters()).dtype
    total = sum(len(b) for b in batches)

    loss = 0.0
    diag = PGDiagnostics(n_steps=total)
    ratios = []
    for batch in batches:
        _check_finite(batch)
        policy_loss, entropy, value_loss, ratio = _head_terms(net, batch, dtype)
        share = len(batch) / total
        loss = loss + share * (policy_loss - alpha * entropy + value_coef * value_loss)
        diag.policy_loss += share * float(policy_loss)
        diag.value_loss += share * float(value_loss)
        diag.entropy += share * float(entropy)
        ratios.append(ratio.cpu().numpy())

    ratios = np.concatenate(ratios)
    diag.loss = float(loss)
    diag.mean_is_weight = float(ratios.mean())
    diag.max_is_weight = float(ratios.max())
    return loss, diag


def pg_loss_and_grad(net, batches, alpha, params=None, value_coef=0.5):
    """
    Surrogate loss and its gradient.

    Args:
        net: ``PolicyNetwork``
        batches: ``HeadBatch`` list
        alpha: Entropy coefficient
        params: Parameters to differentiate (all by default)
        value_coef: Weight of the baseline regression

    Returns:
        tuple: (loss, list of gradient tensors aligned with ``params``, PGDiagnostics)
    """
    params = list(net.parameters()) if params is None else list(params)
    loss, diag = pg_loss(net, batches, alpha, value_coef)
    grads = torch.autograd.grad(loss, params, allow_unused=True)
    grads = [torch.zeros_like(p) if g is None else g for p, g in zip(params, grads)]
    return float(loss), grads, diag


def importance_weights(net, batch):
    """Current-over-behaviour probability of each step's action, without gradients."""
    dtype = next(net.parameters()).dtype
    with torch.no_grad():
        logits, _ = net(torch.as_tensor(batch.planes, dtype=dtype), batch.head)
        log_probs = masked_log_softmax(logits, torch.as_tensor(batch.masks))
        chosen = log_probs.gather(1, torch.as_tensor(batch.actions).unsqueeze(1)).squeeze(1)
    return np.exp(chosen.cpu().numpy().astype(np.float64)) / batch.behavior_probs
