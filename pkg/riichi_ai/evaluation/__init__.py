"""Evaluation: stable rank, ranking points, matchsets and bootstrap statistics."""

from .stable_rank import RankTally, UNDEFINED, is_undefined, stable_rank
from .ranking import RankProgression, ranking_points, reward_vector, simulate_rank_progression
from .bootstrap import BootstrapSummary, bootstrap_stable_rank
from .statistics import RewardComparison, compare_rewards, mean_stderr, pearson
from .matchset import (
    MatchConfig, MatchGame, MatchResult, play_match_game, read_results, run_matchset, write_results,
    write_summary,
)

__all__ = [
    'RankTally', 'UNDEFINED', 'is_undefined', 'stable_rank',
    'RankProgression', 'ranking_points', 'reward_vector', 'simulate_rank_progression',
    'BootstrapSummary', 'bootstrap_stable_rank',
    'RewardComparison', 'compare_rewards', 'mean_stderr', 'pearson',
    'MatchConfig', 'MatchGame', 'MatchResult', 'play_match_game', 'read_results', 'run_matchset',
    'write_results', 'write_summary',
]
