"""
In-process inference engine.

Workers query policy heads through this boundary so a remote engine can
replace it; at desk scale it wraps one network behind a lock and swaps in
new parameter snapshots as they are published.
"""

import logging
import threading

import numpy as np
import torch

from ..features.layout import DEFAULT_LAYOUT
from ..models.agent import PolicyAgent
from ..models.checkpoint import policy_from_blob
from ..models.distribution import ActionDistribution, forward, masked_entropy, masked_log_softmax

logger = logging.getLogger(__name__)


class LocalInferenceEngine:
    """Thread-safe holder of the current policy parameters."""

    def __init__(self, net=None, layout=DEFAULT_LAYOUT):
        self._net = net
        self._lock = threading.RLock()
        self.layout = net.layout if net is not None else layout
        self.meta = {}

    @property
    def version(self):
        with self._lock:
            return None if self._net is None else self._net.version

    @property
    def net(self):
        with self._lock:
            return self._net

    def load_snapshot(self, snapshot):
        """
        Swap in a published snapshot if it is newer than the held one.

        Returns:
            bool: Whether the parameters changed
        """
        with self._lock:
            if self._net is not None and self._net.version == snapshot.version:
                return False
        snapshot.verify()
        net = policy_from_blob(snapshot.blob, expected_layout_version=self.layout.layout_version)
        net.eval()
        with self._lock:
            self._net = net
            self.meta = dict(snapshot.meta)
        logger.debug(f"Inference engine now at v{snapshot.version}")
        return True

    def distribution(self, policy_input, head, mask):
        with self._lock:
            return forward(self._net, policy_input, head, mask)[0]

    def infer_batch(self, head, inputs, masks):
        """
        Distributions for several decisions of one head in one pass.

        Args:
            head: Head name
            inputs: ``PolicyInput`` list
            masks: Bool arrays matching ``inputs``

        Returns:
            list: ``ActionDistribution`` per input
        """
        if not inputs:
            return []
        with self._lock:
            net = self._net
            dtype = next(net.parameters()).dtype
            x = torch.as_tensor(np.stack([p.planes for p in inputs]), dtype=dtype)
            mask_t = torch.as_tensor(np.stack(masks).astype(bool))
            with torch.no_grad():
                logits, _ = net(x, head)
                log_probs = masked_log_softmax(logits, mask_t)
                entropy = masked_entropy(log_probs, mask_t)
        probs = log_probs.exp().cpu().numpy().astype(np.float64)
        logits = logits.cpu().numpy().astype(np.float64)
        return [ActionDistribution(probs[i], logits[i], np.asarray(masks[i], dtype=bool), float(entropy[i]))
                for i in range(len(inputs))]


class InferenceAgent(PolicyAgent):
    """Policy agent whose head queries go through an inference engine."""

    name = 'learner'

    def __init__(self, engine, **kwargs):
        self.engine = engine
        super().__init__(engine.net, **kwargs)

    @property
    def version(self):
        return self.engine.version

    def confidence(self, head, policy_input, mask):
        return self.engine.distribution(policy_input, head, mask)
