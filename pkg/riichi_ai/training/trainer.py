"""
Reinforcement-learning trainer.

Each update samples round trajectories, computes the importance-sampled
policy gradient with the entropy bonus, moves the entropy coefficient,
advances the oracle schedule and publishes the new parameters.
"""

import logging
import math
import os
import time
from dataclasses import dataclass, field

import torch

from ..models.checkpoint import policy_to_blob, save_checkpoint
from ..utils.exceptions import BufferNotReadyError, ConfigurationError, TrainingDivergedError
from .entropy import EntropyController, update_entropy_coeff
from .oracle import OracleSchedule, continual_guard
from .policy_gradient import PGDiagnostics, importance_weights, pg_loss_and_grad
from .progress_tracker import ProgressTracker
from .trajectory import build_head_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentPreset:
    """Reward source and oracle use of a training run."""

    name: str
    reward: str
    oracle: bool


PRESETS = {
    'rl-basic': AgentPreset('rl-basic', 'round', False),
    'rl-1': AgentPreset('rl-1', 'global', False),
    'rl-2': AgentPreset('rl-2', 'global', True),
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"Unknown agent preset '{name}' (choose from {sorted(PRESETS)})")


@dataclass
class TrainerConfig:
    preset: str = 'rl-basic'
    batch_size: int = 64
    learning_rate: float = 1e-3
    alpha: float = 0.01
    beta: float = 0.001
    entropy_target: float = 1.0
    entropy_window: int = 10
    oracle_decay_updates: int = 2000
    w_max: float = 10.0
    lr_decay: float = 0.1
    trainable_heads: tuple = ('discard',)
    train_trunk: bool = True
    value_coef: float = 0.5
    reward_scale: float = 0.01
    checkpoint_every: int = 100
    checkpoint_dir: str = None
    metrics_path: str = None
    rules_hash: str = ''
    log_every: int = 50

    @classmethod
    def from_config(cls, config, **overrides):
        """Build from a ``Config`` class; keyword overrides win."""
        values = dict(
            preset=config.AGENT_PRESET,
            batch_size=config.RL_BATCH_SIZE,
            learning_rate=config.RL_LEARNING_RATE,
            alpha=config.ENTROPY_ALPHA,
            beta=config.ENTROPY_BETA,
            entropy_target=config.ENTROPY_TARGET,
            entropy_window=config.ENTROPY_WINDOW,
            oracle_decay_updates=config.ORACLE_DECAY_UPDATES,
            w_max=config.IS_WEIGHT_MAX,
            lr_decay=config.LR_DECAY_AFTER_ORACLE,
            trainable_heads=tuple(config.RL_TRAINABLE_HEADS),
            reward_scale=config.REWARD_SCALE,
            checkpoint_every=config.CHECKPOINT_EVERY,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class UpdateResult:
    update: int
    version: int
    diagnostics: PGDiagnostics = field(default_factory=PGDiagnostics)
    alpha: float = 0.0
    gamma: float = 0.0
    learning_rate: float = 0.0
    rejected: int = 0
    skipped: bool = False

    def to_record(self):
        return {
            'update': self.update,
            'version': self.version,
            'loss': self.diagnostics.loss,
            'entropy': self.diagnostics.entropy,
            'mean_is_weight': self.diagnostics.mean_is_weight,
            'n_steps': self.diagnostics.n_steps,
            'gamma': self.gamma,
            'alpha': self.alpha,
            'lr': self.learning_rate,
            'rejected': self.rejected,
            'skipped': self.skipped,
        }


def trainable_parameters(net, heads, train_trunk=True):
    params = []
    if train_trunk:
        params.extend(net.conv_input.parameters())
        params.extend(net.res_blocks.parameters())
    params.extend(net.head_parameters(heads))
    params.extend(net.value_head.parameters())
    return params


class RLTrainer:
    """Single logical trainer over one policy network."""

    def __init__(self, net, config=None, store=None, metrics_writer=None):
        """
        Initialize trainer.

        Args:
            net: ``PolicyNetwork`` (SL-initialized or random), trained in place
            config: ``TrainerConfig``
            store: Optional ``ParameterStore`` receiving every new version
            metrics_writer: Optional ``MetricsWriter`` for per-update records
        """
        self.net = net
        self.config = config or TrainerConfig()
        self.preset = get_preset(self.config.preset)
        self.store = store
        self.metrics_writer = metrics_writer

        self.entropy = EntropyController(self.config.alpha, self.config.beta,
                                         self.config.entropy_target, self.config.entropy_window)
        self.schedule = OracleSchedule(self.config.oracle_decay_updates) if self.preset.oracle else None
        self.net.set_oracle_enabled(self.preset.oracle)

        self.params = trainable_parameters(net, self.config.trainable_heads, self.config.train_trunk)
        self.optimizer = torch.optim.Adam(self.params, lr=self.config.learning_rate)
        self.updates = 0
        self.post_transition = False
        self.history = []

    @property
    def gamma(self):
        """Oracle keep-probability for the next batch of self-play."""
        if self.schedule is None or self.post_transition:
            return 0.0
        return self.schedule.gamma(self.updates)

    @property
    def learning_rate(self):
        return self.optimizer.param_groups[0]['lr']

    def publish(self):
        """Publish the current parameters if the store does not have this version yet."""
        if self.store is None:
            return None
        latest = self.store.latest_version()
        if latest is not None and latest >= self.net.version:
            return latest
        meta = {'gamma': self.gamma, 'update': self.updates, 'preset': self.preset.name,
                'oracle': self.net.oracle_enabled}
        return self.store.publish(self.net.version, policy_to_blob(self.net, self.config.rules_hash), meta)

    def _enter_continual_phase(self):
        self.post_transition = True
        self.net.set_oracle_enabled(False)
        logger.info(f"Oracle schedule reached zero at update {self.updates}; "
                    f"learning rate x{self.config.lr_decay}, rejecting weights > {self.config.w_max}")

    def _guard(self, batches):
        kept, rejected = [], 0
        lr = self.config.learning_rate
        for batch in batches:
            weights = importance_weights(self.net, batch)
            guard = continual_guard(weights, self.post_transition, self.config.learning_rate,
                                    self.config.w_max, self.config.lr_decay)
            lr = guard.learning_rate
            rejected += guard.rejected
            batch = batch.subset(guard.keep) if guard.active else batch
            if len(batch):
                kept.append(batch)
        for group in self.optimizer.param_groups:
            group['lr'] = lr
        return kept, rejected

    def _diverged(self, reason):
        path = None
        if self.config.checkpoint_dir:
            path = os.path.join(self.config.checkpoint_dir, f'diverged-u{self.updates}-{int(time.time())}.ckpt')
            save_checkpoint(self.net, path, self.config.rules_hash)
        logger.error(f"Training diverged at update {self.updates}: {reason} (snapshot: {path})")
        raise TrainingDivergedError(f"Training diverged at update {self.updates}: {reason}", path)

    def update(self, trajectories):
        """
        One gradient step on a batch of round trajectories.

        Args:
            trajectories: ``RoundTrajectory`` list

        Returns:
            UpdateResult

        Raises:
            TrainingDivergedError: If the loss or a gradient is not finite
        """
        for trajectory in trajectories:
            trajectory.validate()
        if self.schedule is not None and not self.post_transition and self.schedule.transitioned(self.updates):
            self._enter_continual_phase()

        batches = [build_head_batch(trajectories, head, self.preset.reward, self.config.reward_scale)
                   for head in self.config.trainable_heads]
        batches = [b for b in batches if b is not None]
        batches, rejected = self._guard(batches)

        result = UpdateResult(update=self.updates, version=self.net.version, gamma=self.gamma,
                              learning_rate=self.learning_rate, rejected=rejected)
        if not batches:
            logger.warning(f"Update {self.updates}: no usable steps in batch, skipped")
            result.skipped = True
            result.alpha = self.entropy.alpha
            self._emit(result)
            return result

        loss, grads, diag = pg_loss_and_grad(self.net, batches, self.entropy.alpha, self.params,
                                             self.config.value_coef)
        if not math.isfinite(loss):
            self._diverged(f"loss is {loss}")
        if not all(torch.isfinite(g).all() for g in grads):
            self._diverged("non-finite gradient")

        self.optimizer.zero_grad()
        for param, grad in zip(self.params, grads):
            param.grad = grad
        self.optimizer.step()

        result.alpha = update_entropy_coeff(self.entropy, diag.entropy)
        result.diagnostics = diag
        self.updates += 1
        self.net.version += 1
        result.version = self.net.version
        self.publish()
        self._emit(result)
        return result

    def _emit(self, result):
        record = result.to_record()
        self.history.append(record)
        if self.metrics_writer is not None:
            self.metrics_writer.write(record)
        logger.debug(f"update {record['update']} loss {record['loss']:.4f} entropy {record['entropy']:.3f} "
                     f"w {record['mean_is_weight']:.3f} alpha {record['alpha']:.5f} gamma {record['gamma']:.3f}")

    def save_checkpoint(self):
        if not self.config.checkpoint_dir:
            return None
        path = os.path.join(self.config.checkpoint_dir, f'policy-v{self.net.version:06d}.ckpt')
        if os.path.exists(path):
            return path
        return save_checkpoint(self.net, path, self.config.rules_hash)


def _next_batch(buffer, batch_size, poll_interval, timeout, stop_event):
    waited = 0.0
    while True:
        if stop_event is not None and stop_event.is_set():
            return None
        try:
            return buffer.sample(batch_size)
        except BufferNotReadyError:
            if timeout is not None and waited >= timeout:
                raise
            time.sleep(poll_interval)
            waited += poll_interval


def train_loop(trainer, buffer, updates, poll_interval=0.05, timeout=None, stop_event=None):
    """
    Run ``updates`` trainer steps on batches drawn from a replay buffer.

    Args:
        trainer: ``RLTrainer``
        buffer: ``ReplayBuffer`` fed by self-play workers
        updates: Number of gradient steps
        poll_interval: Seconds between buffer polls while it fills
        timeout: Give up waiting for a batch after this many seconds
        stop_event: Optional ``threading.Event`` to stop early

    Returns:
        list: Checkpoint paths written every ``checkpoint_every`` updates

    Raises:
        BufferNotReadyError: If no batch arrives within ``timeout``
        TrainingDivergedError: On a non-finite loss
    """
    trainer.publish()
    tracker = ProgressTracker(updates, label='train-rl', log_every=trainer.config.log_every, unit='updates')
    paths = []
    every = trainer.config.checkpoint_every
    for _ in range(updates):
        batch = _next_batch(buffer, trainer.config.batch_size, poll_interval, timeout, stop_event)
        if batch is None:
            logger.info("Training stopped")
            break
        trainer.update(batch)
        tracker.update()
        if every and trainer.updates % every == 0:
            path = trainer.save_checkpoint()
            if path:
                paths.append(path)
    tracker.finish()
    return paths
