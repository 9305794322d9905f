"""
Run-time policy adaptation.

At the start of a round the adapting seat samples worlds consistent with
what it can see, plays each of them out with four copies of the offline
policy, and finetunes a copy of the policy on the importance-weighted
return

    J(theta) = sum_tau R(tau) * p(tau; theta) / p(tau; theta_o)

where only the adapting seat's decisions enter ``p``; the other seats and
the deal are part of the environment. Rollouts are collected once, before
any update. The adapted copy lives for one round and is then dropped.
"""

import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field, asdict

import numpy as np
import torch
from joblib import Parallel, delayed

from ..core.game import final_ranks
from ..core.rules import RuleConfig
from ..features.layout import LOOKAHEAD_DEPTH
from ..models.agent import PolicyAgent
from ..models.distribution import masked_log_softmax
from ..reward.predictor import game_reward
from ..selfplay.game_runner import GameRunner
from ..training.progress_tracker import ProgressTracker
from .worlds import VisibleInfo, sample_worlds

logger = logging.getLogger(__name__)

RETURN_KINDS = ('round', 'game')
FEATURE_CHUNK = 1024


@dataclass
class AdaptationConfig:
    worlds: int = 1000
    steps: int = 5
    learning_rate: float = 1e-4
    heads: tuple = ('discard',)
    reward: str = 'round'
    reward_scale: float = 0.01
    temperature: float = 1.0
    lookahead_depth: int = LOOKAHEAD_DEPTH
    n_jobs: int = 1
    seed: int = 0
    max_steps: int = 10000

    def __post_init__(self):
        if self.reward not in RETURN_KINDS:
            raise ValueError(f"Unknown rollout return '{self.reward}' (choose from {RETURN_KINDS})")
        if self.worlds < 1:
            raise ValueError("Adaptation needs at least one world")

    @classmethod
    def from_config(cls, config, **overrides):
        values = dict(
            worlds=config.ADAPT_WORLDS,
            steps=config.ADAPT_STEPS,
            learning_rate=config.RL_LEARNING_RATE * config.ADAPT_LR_FACTOR,
            heads=tuple(config.RL_TRAINABLE_HEADS),
            reward=config.ADAPT_RETURN,
            reward_scale=config.REWARD_SCALE,
            lookahead_depth=config.LOOKAHEAD_SEARCH_DEPTH,
            n_jobs=config.ADAPT_JOBS,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class Rollout:
    """One played-out world: the adapting seat's decisions and its return."""

    world_seed: int
    steps: list
    ret: float
    round_score: int = 0


def rollout_return(outcome, seat, kind='round', scale=0.01, rules=None):
    """
    Return of a finished rollout for ``seat``.

    ``round`` is the scaled round score; ``game`` adds the ranking-point
    reward of the rank the settled scores would give if the game ended.
    """
    value = outcome.round_score_deltas[seat] * scale
    if kind == 'game':
        rules = rules or RuleConfig()
        rank = final_ranks(outcome.settlement.scores_after)[seat]
        value += game_reward(rank, rules.game_reward, scale=1.0)
    return float(value)


def play_world(agents, world, info, rng, max_steps=10000):
    """Play one world to the end of its round; returns the ``RoundRecord``."""
    state = world.to_state(info)
    runner = GameRunner(agents, state.rules, record_events=False, max_steps=max_steps)
    return runner.play_round(state, rng, round_index=info.round_id)


def rollout(net, world, info, config=None, rng=None):
    """
    Play ``world`` with the policy in all four seats.

    Args:
        net: ``PolicyNetwork`` (not modified)
        world: ``WorldSample``
        info: ``VisibleInfo`` of the adapting seat
        config: ``AdaptationConfig``
        rng: Generator for action sampling (default: seeded by the world)

    Returns:
        Rollout
    """
    config = config or AdaptationConfig()
    rng = rng if rng is not None else np.random.default_rng(world.seed)
    agents = [PolicyAgent(net, mode='sample', temperature=config.temperature,
                          lookahead_depth=config.lookahead_depth, record=(seat == info.seat))
              for seat in range(4)]
    record = play_world(agents, world, info, rng, config.max_steps)
    ret = rollout_return(record.outcome, info.seat, config.reward, config.reward_scale, info.rules)
    return Rollout(world.seed, list(record.decisions[info.seat]), ret,
                   int(record.outcome.round_score_deltas[info.seat]))


def run_rollouts(net, worlds, info, config):
    """Roll out every world; worlds run in parallel threads when ``n_jobs`` > 1."""
    if config.n_jobs == 1:
        tracker = ProgressTracker(len(worlds), label='rollouts', log_every=max(1, len(worlds) // 4))
        results = []
        for world in worlds:
            results.append(rollout(net, world, info, config))
            tracker.update(item_name='rollout')
        return results
    return Parallel(n_jobs=config.n_jobs, prefer='threads')(
        delayed(rollout)(net, world, info, config) for world in worlds)


def _steps_by_head(rollouts):
    grouped = defaultdict(list)
    for index, item in enumerate(rollouts):
        for step in item.steps:
            grouped[step.head].append((index, step))
    return grouped


def trunk_features(net, rollouts):
    """
    Trunk features of every recorded step, grouped by head, without gradients.

    Returns:
        dict: head -> (trajectory index tensor, features, masks, actions, behaviour probs)
    """
    dtype = next(net.parameters()).dtype
    out = {}
    for head, items in _steps_by_head(rollouts).items():
        chunks = []
        with torch.no_grad():
            for start in range(0, len(items), FEATURE_CHUNK):
                part = items[start:start + FEATURE_CHUNK]
                x = torch.as_tensor(np.stack([s.planes for _, s in part]), dtype=dtype)
                chunks.append(net.trunk(x))
        out[head] = (
            torch.as_tensor([i for i, _ in items], dtype=torch.long),
            torch.cat(chunks),
            torch.as_tensor(np.stack([s.mask for _, s in items]).astype(bool)),
            torch.as_tensor([s.action_index for _, s in items], dtype=torch.long),
            torch.as_tensor([s.behavior_prob for _, s in items], dtype=dtype),
        )
    return out


def trajectory_log_ratios(net, rollouts, features=None):
    """
    ``log p(tau; theta) - log p(tau; theta_o)`` per rollout.

    With ``features`` (from ``trunk_features``) only the heads are
    re-evaluated; otherwise the full network runs with gradients.
    """
    dtype = next(net.parameters()).dtype
    log_ratio = torch.zeros(len(rollouts), dtype=dtype)
    if features is None:
        for head, items in _steps_by_head(rollouts).items():
            x = torch.as_tensor(np.stack([s.planes for _, s in items]), dtype=dtype)
            logits, _ = net(x, head)
            mask = torch.as_tensor(np.stack([s.mask for _, s in items]).astype(bool))
            actions = torch.as_tensor([s.action_index for _, s in items], dtype=torch.long)
            behavior = torch.as_tensor([s.behavior_prob for _, s in items], dtype=dtype)
            chosen = masked_log_softmax(logits, mask).gather(1, actions.unsqueeze(1)).squeeze(1)
            index = torch.as_tensor([i for i, _ in items], dtype=torch.long)
            log_ratio = log_ratio.index_add(0, index, chosen - torch.log(behavior))
        return log_ratio
    for head, (index, feats, mask, actions, behavior) in features.items():
        logits = net.head_logits(feats, head)
        chosen = masked_log_softmax(logits, mask).gather(1, actions.unsqueeze(1)).squeeze(1)
        log_ratio = log_ratio.index_add(0, index, chosen - torch.log(behavior))
    return log_ratio


def adaptation_objective(net, rollouts, returns=None, features=None):
    """
    Importance-weighted return sum over the collected rollouts.

    At the parameters the rollouts were collected with, every ratio is 1 and
    the value is the plain sum of returns.

    Args:
        net: ``PolicyNetwork`` being adapted
        rollouts: ``Rollout`` list
        returns: Optional return override, one per rollout
        features: Optional cached trunk features

    Returns:
        torch.Tensor: Scalar objective (differentiable in the head parameters)
    """
    dtype = next(net.parameters()).dtype
    if returns is None:
        returns = [r.ret for r in rollouts]
    returns = torch.as_tensor(np.asarray(returns, dtype=np.float64), dtype=dtype)
    ratios = torch.exp(trajectory_log_ratios(net, rollouts, features))
    return (returns * ratios).sum()


@dataclass
class AdaptationReport:
    k: int
    steps: int
    skipped: int
    mean_return_before: float
    mean_return_after: float
    root_shift: float
    seconds: float = 0.0
    objective_trace: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


class AdaptationSession:
    """
    One round's adaptation state.

    ``offline`` is never modified; ``adapted`` starts as a copy of it.
    """

    def __init__(self, offline, rollouts, config=None):
        self.offline = offline
        self.config = config or AdaptationConfig()
        self.rollouts = list(rollouts)
        if not self.rollouts:
            raise ValueError("Adaptation needs at least one rollout")
        self.returns = np.asarray([r.ret for r in self.rollouts], dtype=np.float64)
        self.adapted = offline.clone()
        self.steps_taken = 0
        self.skipped = 0
        self.objective_trace = []
        self.seconds = 0.0
        self._features = None

    @classmethod
    def collect(cls, net, info, config=None, seed=None):
        """
        Sample worlds for ``info`` and roll them out under ``net``.

        Args:
            net: Offline ``PolicyNetwork``
            info: ``VisibleInfo`` or ``(state, seat)``
            config: ``AdaptationConfig``
            seed: World seed (default: ``config.seed``)
        """
        config = config or AdaptationConfig()
        if isinstance(info, tuple):
            info = VisibleInfo.from_state(*info)
        started = time.time()
        worlds = sample_worlds(info, config.worlds, config.seed if seed is None else seed)
        session = cls(net, run_rollouts(net, worlds, info, config), config)
        session.seconds = time.time() - started
        return session

    @property
    def features(self):
        if self._features is None:
            self._features = trunk_features(self.offline, self.rollouts)
        return self._features

    def objective(self, net=None):
        return adaptation_objective(net or self.adapted, self.rollouts, self.returns, self.features)

    def root_shift(self):
        """Mean total-variation distance between offline and adapted policies at each rollout's first discard."""
        if 'discard' not in self.features:
            return 0.0
        index, feats, mask, _, _ = self.features['discard']
        first = {}
        for row, trajectory in enumerate(index.tolist()):
            first.setdefault(trajectory, row)
        rows = torch.as_tensor(sorted(first.values()), dtype=torch.long)
        with torch.no_grad():
            before = masked_log_softmax(self.offline.head_logits(feats[rows], 'discard'), mask[rows]).exp()
            after = masked_log_softmax(self.adapted.head_logits(feats[rows], 'discard'), mask[rows]).exp()
        return float(0.5 * (before - after).abs().sum(dim=1).mean())

    def report(self):
        with torch.no_grad():
            after = float(self.objective()) / len(self.rollouts)
        return AdaptationReport(
            k=len(self.rollouts),
            steps=self.steps_taken,
            skipped=self.skipped,
            mean_return_before=float(self.returns.mean()),
            mean_return_after=after,
            root_shift=self.root_shift(),
            seconds=self.seconds,
            objective_trace=list(self.objective_trace),
        )


def adapt(session):
    """
    Finetune ``session.adapted`` by gradient ascent on the adaptation objective.

    Only the configured heads move; the trunk and the offline network stay
    fixed. A step whose objective or gradient is not finite is skipped.

    Returns:
        PolicyNetwork: The adapted network
    """
    config = session.config
    net = session.adapted
    params = net.head_parameters(config.heads)
    for param in net.parameters():
        param.requires_grad_(False)
    for param in params:
        param.requires_grad_(True)
    optimizer = torch.optim.SGD(params, lr=config.learning_rate)
    features = session.features
    k = len(session.rollouts)

    started = time.time()
    for step in range(config.steps):
        objective = adaptation_objective(net, session.rollouts, session.returns, features) / k
        if not torch.isfinite(objective):
            session.skipped += 1
            logger.warning(f"Adaptation step {step}: non-finite objective, skipped")
            continue
        optimizer.zero_grad()
        (-objective).backward()
        if not all(p.grad is None or torch.isfinite(p.grad).all() for p in params):
            session.skipped += 1
            logger.warning(f"Adaptation step {step}: non-finite gradient, skipped")
            continue
        optimizer.step()
        session.steps_taken += 1
        session.objective_trace.append(float(objective))
    session.seconds += time.time() - started
    net.eval()
    logger.debug(f"Adapted over {k} rollouts: {session.steps_taken} steps, {session.skipped} skipped")
    return net


class PolicyAdapter(PolicyAgent):
    """
    Policy agent that adapts at the start of every round.

    ``begin_round`` collects rollouts from the seat's information set and
    plays the round with the adapted copy; ``end_round`` drops it, so every
    round starts again from the offline parameters.
    """

    name = 'adapter'

    def __init__(self, net, config=None, mode='greedy', **kwargs):
        self.config = config or AdaptationConfig()
        kwargs.setdefault('lookahead_depth', self.config.lookahead_depth)
        kwargs.setdefault('record', False)
        super().__init__(net, mode=mode, **kwargs)
        self.offline = net
        self.reports = []

    def begin_round(self, state, seat, rng):
        seed = int(rng.integers(2 ** 62)) if rng is not None else self.config.seed + len(self.reports)
        session = AdaptationSession.collect(self.offline, VisibleInfo.from_state(state, seat), self.config, seed)
        self.net = adapt(session)
        report = session.report()
        self.reports.append(report)
        logger.info(f"Round {state.round_id} seat {seat}: adapted on {report.k} rollouts, "
                    f"mean return {report.mean_return_before:.3f} -> {report.mean_return_after:.3f}, "
                    f"root shift {report.root_shift:.4f}")

    def end_round(self, outcome, seat):
        self.net = self.offline


@dataclass
class AdaptationEvaluation:
    pairs: int
    wins: int
    ties: int
    losses: int
    mean_score_difference: float
    report: AdaptationReport = None

    @property
    def win_rate(self):
        """Adapted wins over all pairs, ties counted as half."""
        return (self.wins + 0.5 * self.ties) / self.pairs if self.pairs else 0.0

    def to_dict(self):
        data = asdict(self)
        data['win_rate'] = self.win_rate
        return data


def evaluate_adaptation(net, info, config=None, pairs=1000, seed=1):
    """
    Paired comparison of the adapted and offline policy on one fixed hand.

    The policy adapts once on worlds drawn with ``config.seed``; each test
    world (drawn with ``seed``) is then played twice with the same sampling
    stream, once with the adapted and once with the offline policy in the
    adapting seat. The offline policy fills the other seats both times.

    Returns:
        AdaptationEvaluation
    """
    config = config or AdaptationConfig()
    if isinstance(info, tuple):
        info = VisibleInfo.from_state(*info)
    session = AdaptationSession.collect(net, info, config)
    adapted = adapt(session)

    def table(policy):
        agents = [PolicyAgent(net, mode='sample', temperature=config.temperature,
                              lookahead_depth=config.lookahead_depth, record=False) for _ in range(4)]
        agents[info.seat] = PolicyAgent(policy, mode='sample', temperature=config.temperature,
                                        lookahead_depth=config.lookahead_depth, record=False)
        return agents

    wins = ties = losses = 0
    differences = []
    tracker = ProgressTracker(pairs, label='paired-eval', log_every=max(1, pairs // 10))
    for world in sample_worlds(info, pairs, seed):
        scores = []
        for policy in (adapted, net):
            record = play_world(table(policy), world, info, np.random.default_rng(world.seed), config.max_steps)
            scores.append(record.outcome.round_score_deltas[info.seat])
        differences.append(scores[0] - scores[1])
        if scores[0] > scores[1]:
            wins += 1
        elif scores[0] == scores[1]:
            ties += 1
        else:
            losses += 1
        tracker.update(item_name='pair')
    result = AdaptationEvaluation(pairs, wins, ties, losses, float(np.mean(differences)), session.report())
    logger.info(f"Adapted vs offline over {pairs} pairs: win rate {result.win_rate:.3f}")
    return result
