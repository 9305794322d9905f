"""Round trajectories produced by self-play and their batching for the trainer."""

from dataclasses import dataclass, field

import numpy as np

from ..utils.exceptions import DatasetError

REWARD_KINDS = ('round', 'global')


@dataclass
class RoundTrajectory:
    """
    The recorded decisions of one seat in one round.

    ``steps`` are ``DecisionRecord`` objects in decision order. The round
    carries exactly one reward: the seat's round score, and, when a reward
    predictor is attached, the attributed global reward.
    """

    game_id: str
    round_index: int
    seat: int
    seed: int
    steps: list = field(default_factory=list)
    round_score: int = 0
    global_reward: float = None

    @property
    def versions(self):
        return sorted({step.version for step in self.steps})

    def validate(self):
        """
        Raises:
            ValueError: If a behaviour probability lies outside (0, 1]
        """
        for step in self.steps:
            if not 0.0 < step.behavior_prob <= 1.0:
                raise ValueError(f"Behaviour probability {step.behavior_prob} outside (0, 1]")

    def reward(self, kind='round', scale=0.01):
        """
        Round reward for the given preset reward kind.

        Raises:
            DatasetError: If the global reward is requested but missing
        """
        if kind == 'round':
            return self.round_score * scale
        if kind == 'global':
            if self.global_reward is None:
                raise DatasetError(f"Trajectory {self.game_id}/{self.round_index} has no global reward")
            return float(self.global_reward)
        raise ValueError(f"Unknown reward kind: {kind}")

    def to_dict(self):
        return {
            'game_id': self.game_id,
            'round_index': self.round_index,
            'seat': self.seat,
            'seed': self.seed,
            'round_score': self.round_score,
            'global_reward': self.global_reward,
            'steps': [step.to_dict() for step in self.steps],
        }


@dataclass
class HeadBatch:
    """Stacked steps of one head."""

    head: str
    planes: np.ndarray
    masks: np.ndarray
    actions: np.ndarray
    behavior_probs: np.ndarray
    returns: np.ndarray
    versions: np.ndarray

    def __len__(self):
        return int(self.actions.shape[0])

    def subset(self, keep):
        return HeadBatch(self.head, self.planes[keep], self.masks[keep], self.actions[keep],
                         self.behavior_probs[keep], self.returns[keep], self.versions[keep])


def build_head_batch(trajectories, head, reward_kind='round', reward_scale=0.01):
    """
    Stack the steps of ``head`` from a list of trajectories.

    Every step of a round receives that round's reward as its return.

    Returns:
        HeadBatch or None when no step belongs to ``head``
    """
    planes, masks, actions, probs, returns, versions = [], [], [], [], [], []
    for trajectory in trajectories:
        steps = [s for s in trajectory.steps if s.head == head]
        if not steps:
            continue
        value = trajectory.reward(reward_kind, reward_scale)
        for step in steps:
            planes.append(step.planes)
            masks.append(step.mask)
            actions.append(step.action_index)
            probs.append(step.behavior_prob)
            returns.append(value)
            versions.append(step.version)
    if not actions:
        return None
    return HeadBatch(
        head=head,
        planes=np.stack(planes),
        masks=np.stack(masks).astype(bool),
        actions=np.asarray(actions, dtype=np.int64),
        behavior_probs=np.asarray(probs, dtype=np.float64),
        returns=np.asarray(returns, dtype=np.float64),
        versions=np.asarray(versions, dtype=np.int64),
    )
