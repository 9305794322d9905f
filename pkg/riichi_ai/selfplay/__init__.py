"""Self-play runtime: game runner, workers, inference boundary and data generation."""

from .game_runner import GameRunner, GameRecord, RoundRecord, round_trajectory
from .inference import LocalInferenceEngine, InferenceAgent
from .opponents import make_agent, parse_opponents
from .worker import WorkerConfig, WorkerReport, run_selfplay_worker, SelfPlayRuntime, play_games, game_rng
from .datagen import generate_sl_dataset

__all__ = [
    'GameRunner', 'GameRecord', 'RoundRecord', 'round_trajectory',
    'LocalInferenceEngine', 'InferenceAgent',
    'make_agent', 'parse_opponents',
    'WorkerConfig', 'WorkerReport', 'run_selfplay_worker', 'SelfPlayRuntime', 'play_games', 'game_rng',
    'generate_sl_dataset',
]
