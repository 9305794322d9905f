"""Self-play reinforcement learning."""

from .trajectory import RoundTrajectory, HeadBatch, build_head_batch
from .entropy import EntropyController, update_entropy_coeff
from .oracle import OracleSchedule, apply_oracle_dropout, continual_guard
from .policy_gradient import PGDiagnostics, pg_loss, pg_loss_and_grad, importance_weights
from .trainer import AgentPreset, PRESETS, get_preset, TrainerConfig, RLTrainer, train_loop
from .progress_tracker import ProgressTracker

__all__ = [
    'RoundTrajectory', 'HeadBatch', 'build_head_batch',
    'EntropyController', 'update_entropy_coeff',
    'OracleSchedule', 'apply_oracle_dropout', 'continual_guard',
    'PGDiagnostics', 'pg_loss', 'pg_loss_and_grad', 'importance_weights',
    'AgentPreset', 'PRESETS', 'get_preset', 'TrainerConfig', 'RLTrainer', 'train_loop',
    'ProgressTracker',
]
