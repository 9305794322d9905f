"""Supervised datasets from scripted or checkpoint teachers."""

import logging
from collections import Counter

from ..core.rules import RuleConfig
from ..features.layout import DEFAULT_LAYOUT, LOOKAHEAD_DEPTH
from ..models.agent import ScriptedAgent, PolicyAgent
from ..models.checkpoint import load_checkpoint
from ..models.network import HEADS
from ..models.supervised import SupervisedDataset
from ..training.progress_tracker import ProgressTracker
from ..utils.exceptions import ConfigurationError
from .game_runner import GameRunner
from .worker import game_rng

logger = logging.getLogger(__name__)


def make_teacher(spec='scripted', layout=DEFAULT_LAYOUT, lookahead_depth=LOOKAHEAD_DEPTH):
    """
    Recording teacher agent.

    Args:
        spec: 'scripted' or a checkpoint path
    """
    if spec == 'scripted':
        return ScriptedAgent(record=True, layout=layout, lookahead_depth=lookahead_depth)
    if spec.startswith('policy:'):
        spec = spec.split(':', 1)[1]
    if not spec:
        raise ConfigurationError("Empty teacher spec")
    net = load_checkpoint(spec, expected_layout_version=layout.layout_version)
    net.eval()
    return PolicyAgent(net, mode='greedy', lookahead_depth=lookahead_depth, record=True)


def generate_sl_dataset(teacher='scripted', games=10, seed=0, layout=DEFAULT_LAYOUT, lookahead_depth=LOOKAHEAD_DEPTH,
                        rules=None):
    """
    Play seeded teacher-only games and keep one sample per head query.

    Args:
        teacher: Teacher spec ('scripted' or a checkpoint path)
        games: Number of games
        seed: Base seed
        layout: ``FeatureLayout`` of the recorded planes
        lookahead_depth: Runtime lookahead search depth
        rules: ``RuleConfig``

    Returns:
        tuple: (dict head -> SupervisedDataset, Counter of decision points per head)
    """
    rules = rules or RuleConfig()
    agent = make_teacher(teacher, layout, lookahead_depth)
    runner = GameRunner([agent] * 4, rules, record_events=False)
    records = []
    tracker = ProgressTracker(games, label='gen-data', log_every=max(1, games // 10), unit='games')
    for index in range(games):
        rng, game_seed = game_rng(seed, 0, index)
        game = runner.play_game(game_seed, rng, game_id=f"sl{index}")
        for round_record in game.rounds:
            for seat in range(4):
                records.extend(round_record.decisions[seat])
        tracker.update()

    counts = Counter(r.head for r in records)
    datasets = {head: SupervisedDataset.from_records(head, records, layout.layout_version) for head in HEADS}
    for dataset in datasets.values():
        if len(dataset):
            dataset.validate()
    logger.info(f"Generated SL samples from {games} games: "
                + ', '.join(f"{h}={counts.get(h, 0)}" for h in HEADS))
    return datasets, counts
