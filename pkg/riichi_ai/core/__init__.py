"""Rules engine: tiles, hands, scoring, rounds and games."""

from .hand import Hand, Meld, MeldKind, Decomposition, detect_win, shanten
from .rules import RuleConfig, load_rules
from .round import (
    Action,
    ActionKind,
    Phase,
    RoundState,
    RoundOutcome,
    OutcomeKind,
    deal_round,
    draw_tile,
    legal_actions,
    apply_action,
)
from .scoring import score_hand, settle_round
from .game import GameState, GameOutcome, new_game, advance_game, final_ranks

__all__ = [
    'Hand', 'Meld', 'MeldKind', 'Decomposition', 'detect_win', 'shanten',
    'RuleConfig', 'load_rules',
    'Action', 'ActionKind', 'Phase', 'RoundState', 'RoundOutcome', 'OutcomeKind',
    'deal_round', 'draw_tile', 'legal_actions', 'apply_action',
    'score_hand', 'settle_round',
    'GameState', 'GameOutcome', 'new_game', 'advance_game', 'final_ranks',
]
