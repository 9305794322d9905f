"""Global reward predictor and per-round reward attribution."""

from .predictor import (
    RewardPredictor, TrainingGame, train_predictor, predict_prefix, attribute_round_rewards,
    synthetic_linear_dataset, game_reward, save_predictor, load_predictor,
)

__all__ = [
    'RewardPredictor', 'TrainingGame', 'train_predictor', 'predict_prefix',
    'attribute_round_rewards', 'synthetic_linear_dataset', 'game_reward',
    'save_predictor', 'load_predictor',
]
