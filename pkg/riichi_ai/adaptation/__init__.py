"""Run-time policy adaptation from sampled worlds."""

from .worlds import VisibleInfo, WorldSample, sample_world, sample_worlds
from .pmcpa import (
    AdaptationConfig, AdaptationEvaluation, AdaptationReport, AdaptationSession, PolicyAdapter, Rollout,
    adapt, adaptation_objective, evaluate_adaptation, rollout, rollout_return,
)

__all__ = [
    'VisibleInfo', 'WorldSample', 'sample_world', 'sample_worlds',
    'AdaptationConfig', 'AdaptationEvaluation', 'AdaptationReport', 'AdaptationSession', 'PolicyAdapter',
    'Rollout', 'adapt', 'adaptation_objective', 'evaluate_adaptation', 'rollout', 'rollout_return',
]
