"""Supervised training of a policy head on (input, label) samples."""

import logging
import os
from dataclasses import dataclass, field

import numpy as np
import torch

from .. import FORMAT_VERSION
from ..utils.exceptions import DatasetError
from .distribution import masked_log_softmax
from .network import HEAD_SIZES

logger = logging.getLogger(__name__)


@dataclass
class SupervisedDataset:
    """Samples of one head: stacked inputs, legality masks and labels."""

    head: str
    planes: np.ndarray
    masks: np.ndarray
    labels: np.ndarray
    layout_version: str = ''

    def __len__(self):
        return int(self.labels.shape[0])

    def validate(self):
        """
        Raises:
            DatasetError: If empty or a label falls outside its mask
        """
        if len(self) == 0:
            raise DatasetError(f"Dataset for head {self.head} is empty")
        if self.masks.shape[1] != HEAD_SIZES[self.head]:
            raise DatasetError(f"Masks for head {self.head} have the wrong width")
        legal = self.masks[np.arange(len(self)), self.labels]
        if not legal.all():
            bad = int(np.argmin(legal))
            raise DatasetError(f"Label {int(self.labels[bad])} of sample {bad} is not legal")

    def subset(self, indices):
        return SupervisedDataset(self.head, self.planes[indices], self.masks[indices],
                                 self.labels[indices], self.layout_version)

    def save(self, path, config_hash=''):
        out_dir = os.path.dirname(path)
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
        np.savez_compressed(path, head=self.head, planes=self.planes, masks=self.masks,
                            labels=self.labels, layout_version=self.layout_version,
                            format_version=FORMAT_VERSION, config_hash=config_hash)

    @classmethod
    def load(cls, path):
        with np.load(path) as data:
            return cls(str(data['head']), data['planes'], data['masks'].astype(bool),
                       data['labels'].astype(np.int64), str(data['layout_version']))

    @classmethod
    def from_records(cls, head, records, layout_version=''):
        records = [r for r in records if r.head == head]
        if not records:
            width = HEAD_SIZES[head]
            return cls(head, np.zeros((0, 0, 34), dtype=np.uint8), np.zeros((0, width), dtype=bool),
                       np.zeros(0, dtype=np.int64), layout_version)
        return cls(
            head,
            np.stack([r.planes for r in records]).astype(np.uint8),
            np.stack([r.mask for r in records]).astype(bool),
            np.array([r.action_index for r in records], dtype=np.int64),
            layout_version,
        )


@dataclass
class AccuracyReport:
    head: str
    train_accuracy: float
    holdout_accuracy: float
    n_train: int
    n_holdout: int
    losses: list = field(default_factory=list)

    def to_dict(self):
        return {
            'head': self.head,
            'train_accuracy': self.train_accuracy,
            'holdout_accuracy': self.holdout_accuracy,
            'n_train': self.n_train,
            'n_holdout': self.n_holdout,
            'final_loss': self.losses[-1] if self.losses else None,
        }


def head_accuracy(net, dataset, batch_size=512):
    """Top-1 agreement of the masked head with the labels."""
    dtype = next(net.parameters()).dtype
    correct = 0
    net.eval()
    with torch.no_grad():
        for start in range(0, len(dataset), batch_size):
            x = torch.as_tensor(dataset.planes[start:start + batch_size], dtype=dtype)
            mask = torch.as_tensor(dataset.masks[start:start + batch_size])
            logits, _ = net(x, dataset.head)
            log_probs = masked_log_softmax(logits, mask)
            predicted = log_probs.argmax(dim=-1).numpy()
            correct += int((predicted == dataset.labels[start:start + batch_size]).sum())
    return correct / max(1, len(dataset))


def supervised_train(net, dataset, epochs=10, batch_size=256, learning_rate=1e-3,
                     holdout_fraction=0.1, seed=0):
    """
    Minimize masked cross-entropy of one head.

    Args:
        net: ``PolicyNetwork`` (trained in place)
        dataset: ``SupervisedDataset``
        epochs: Passes over the training split
        batch_size: Mini-batch size
        learning_rate: Adam step size
        holdout_fraction: Share of samples held out for accuracy
        seed: Shuffle seed

    Returns:
        tuple: (net, AccuracyReport)

    Raises:
        DatasetError: If the dataset is empty or a label is illegal
    """
    dataset.validate()
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(dataset))
    n_holdout = int(len(dataset) * holdout_fraction)
    holdout = dataset.subset(order[:n_holdout]) if n_holdout else None
    train = dataset.subset(order[n_holdout:])

    torch.manual_seed(seed)
    dtype = next(net.parameters()).dtype
    optimizer = torch.optim.Adam(net.parameters(), lr=learning_rate)
    losses = []
    for epoch in range(epochs):
        net.train()
        perm = rng.permutation(len(train))
        total, batches = 0.0, 0
        for start in range(0, len(train), batch_size):
            idx = perm[start:start + batch_size]
            x = torch.as_tensor(train.planes[idx], dtype=dtype)
            mask = torch.as_tensor(train.masks[idx])
            labels = torch.as_tensor(train.labels[idx])
            logits, _ = net(x, dataset.head)
            log_probs = masked_log_softmax(logits, mask)
            loss = -log_probs.gather(1, labels.unsqueeze(1)).mean()
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss)
            batches += 1
        losses.append(total / max(1, batches))
        logger.debug(f"SL {dataset.head} epoch {epoch + 1}/{epochs} loss {losses[-1]:.4f}")

    train_acc = head_accuracy(net, train)
    holdout_acc = head_accuracy(net, holdout) if holdout is not None else train_acc
    report = AccuracyReport(dataset.head, train_acc, holdout_acc, len(train), n_holdout, losses)
    logger.info(f"SL {dataset.head}: train {train_acc:.3f} holdout {holdout_acc:.3f}")
    return net, report
