"""Performance benchmarking script."""

import argparse
import sys
import os
import time

import numpy as np
import torch

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from riichi_ai.core.round import deal_round
from riichi_ai.core.rules import load_rules
from riichi_ai.features.layout import LOOKAHEAD_DEPTH, FeatureLayout
from riichi_ai.features.observation import encode_observation
from riichi_ai.models.network import PolicyNetwork
from riichi_ai.selfplay.game_runner import GameRunner
from riichi_ai.selfplay.opponents import make_agent
from riichi_ai.selfplay.worker import game_rng
from riichi_ai.utils.logger import setup_logger
from riichi_ai.utils.metrics import MetricsCollector, Timer


def benchmark_games(agent_spec, num_games=10, layout=None, lookahead_depth=LOOKAHEAD_DEPTH, rules=None):
    """
    Benchmark full-game throughput.

    Args:
        agent_spec: Agent spec seated at every position
        num_games: Number of games to play
        layout: ``FeatureLayout`` for network agents
        lookahead_depth: Runtime lookahead search depth
        rules: ``RuleConfig``

    Returns:
        dict: Benchmark results
    """
    layout = layout or FeatureLayout()
    cache = {}
    agents = [make_agent(agent_spec, layout, lookahead_depth, cache) for _ in range(4)]
    runner = GameRunner(agents, rules, record_events=False)
    metrics = MetricsCollector()
    rounds = 0

    for index in range(num_games):
        rng, game_seed = game_rng(0, 0, index)
        with Timer(metrics, 'game'):
            record = runner.play_game(game_seed, rng, game_id=f"bench{index}")
        rounds += len(record.rounds)

    stats = metrics.get_stats('game')
    return {
        'mean_time': stats['mean'],
        'min_time': stats['min'],
        'max_time': stats['max'],
        'games_per_second': 1.0 / stats['mean'] if stats['mean'] else 0.0,
        'rounds_per_game': rounds / num_games,
        'samples': stats['count'],
    }


def benchmark_encoding(layout, num_samples=200):
    """Benchmark observation encoding on fresh deals."""
    metrics = MetricsCollector()
    for seed in range(num_samples):
        state = deal_round(seed)
        with Timer(metrics, 'encode'):
            encode_observation(state, seed % 4, layout)
    return metrics.get_stats('encode')


def benchmark_inference(net, batch_sizes=(1, 32, 256), repeats=20):
    """
    Benchmark policy forward passes.

    Returns:
        dict: batch size -> mean seconds per forward pass
    """
    net.eval()
    results = {}
    for batch_size in batch_sizes:
        x = torch.from_numpy(np.random.default_rng(0).integers(
            0, 2, size=(batch_size, net.layout.total_channels, 34)).astype(np.float32))
        times = []
        with torch.no_grad():
            net(x, 'discard')
            for _ in range(repeats):
                start_time = time.time()
                net(x, 'discard')
                times.append(time.time() - start_time)
        results[batch_size] = sum(times) / len(times)
    return results


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(description='Benchmark game and inference performance')

    parser.add_argument(
        '--agent',
        type=str,
        default='scripted',
        help="Agent spec seated at every position (default: scripted)"
    )

    parser.add_argument(
        '--num-games',
        type=int,
        default=10,
        help='Number of games for the throughput benchmark'
    )

    parser.add_argument(
        '--lookahead-depth',
        type=int,
        default=LOOKAHEAD_DEPTH,
        help=f'Runtime lookahead search depth (default: {LOOKAHEAD_DEPTH})'
    )

    parser.add_argument(
        '--blocks',
        type=int,
        default=6,
        help='Residual blocks of the benchmarked network'
    )

    parser.add_argument(
        '--filters',
        type=int,
        default=64,
        help='Filters of the benchmarked network'
    )

    parser.add_argument(
        '--rules',
        type=str,
        default=None,
        help='Rule file (default: standard rules)'
    )

    args = parser.parse_args()

    logger = setup_logger()
    rules = load_rules(args.rules)
    layout = FeatureLayout()

    logger.info("=" * 60)
    logger.info("Benchmarking Game Throughput")
    logger.info("=" * 60)

    game_results = benchmark_games(args.agent, args.num_games, layout, args.lookahead_depth, rules)

    logger.info(f"Games played: {game_results['samples']}")
    logger.info(f"Mean time: {game_results['mean_time']:.3f}s ({game_results['games_per_second']:.2f} games/s)")
    logger.info(f"Min time: {game_results['min_time']:.3f}s")
    logger.info(f"Max time: {game_results['max_time']:.3f}s")
    logger.info(f"Rounds per game: {game_results['rounds_per_game']:.2f}")

    logger.info("=" * 60)
    logger.info("Benchmarking Feature Encoding")
    logger.info("=" * 60)

    encode_stats = benchmark_encoding(layout)
    logger.info(f"Mean encode time: {encode_stats['mean'] * 1000:.3f}ms over {encode_stats['count']} states")

    logger.info("=" * 60)
    logger.info("Benchmarking Policy Inference")
    logger.info("=" * 60)

    net = PolicyNetwork(layout, args.blocks, args.filters)
    for batch_size, seconds in benchmark_inference(net).items():
        logger.info(f"Batch {batch_size}: {seconds * 1000:.3f}ms per forward ({batch_size / seconds:.0f} states/s)")

    logger.info("Benchmark complete!")


if __name__ == '__main__':
    main()
