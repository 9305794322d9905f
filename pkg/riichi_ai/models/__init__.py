"""Policy network, decision flow and checkpoints."""

from .network import PolicyNetwork, HEADS, HEAD_SIZES
from .distribution import ActionDistribution, PolicyInput, build_input, forward, select_action
from .agent import (
    Agent, DecisionView, Decision, DecisionRecord, PolicyAgent, ScriptedAgent, FoldAgent,
    RandomAgent, winning_model,
)
from .supervised import SupervisedDataset, AccuracyReport, supervised_train
from .checkpoint import save_checkpoint, load_checkpoint, encode_blob, decode_blob

__all__ = [
    'PolicyNetwork', 'HEADS', 'HEAD_SIZES',
    'ActionDistribution', 'PolicyInput', 'build_input', 'forward', 'select_action',
    'Agent', 'DecisionView', 'Decision', 'DecisionRecord', 'PolicyAgent', 'ScriptedAgent',
    'FoldAgent', 'RandomAgent', 'winning_model',
    'SupervisedDataset', 'AccuracyReport', 'supervised_train',
    'save_checkpoint', 'load_checkpoint', 'encode_blob', 'decode_blob',
]
