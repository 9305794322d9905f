"""Plays full games between four agents and records decisions and events."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..core.game import GameState, advance_game, new_game
from ..core.round import Phase, RoundOutcome, apply_action, draw_tile, pending_seats
from ..core.rules import RuleConfig
from ..features.layout import DEFAULT_LAYOUT
from ..features.round_summary import encode_reward_input
from ..models.agent import DecisionView
from ..reward.predictor import predict_all_prefixes
from ..storage.replay_log import (
    ReplayLog, action_event, dora_event, draw_event, game_end_event, make_header,
    outcome_events, round_start_event,
)
from ..training.trajectory import RoundTrajectory

logger = logging.getLogger(__name__)


@dataclass
class RoundRecord:
    round_index: int
    seed: int
    outcome: RoundOutcome
    events: list = field(default_factory=list)
    decisions: dict = field(default_factory=dict)

    @property
    def deltas(self):
        return tuple(self.outcome.round_score_deltas)


@dataclass
class GameRecord:
    game_id: str
    seed: int
    agents: tuple
    rounds: list = field(default_factory=list)
    outcome: object = None

    @property
    def ranks(self):
        return self.outcome.ranks

    def to_replay(self, rules, layout_version=DEFAULT_LAYOUT.layout_version):
        header = make_header(rules.config_hash, layout_version, self.seed, self.agents, game_id=self.game_id)
        events = [e for record in self.rounds for e in record.events]
        events.append(game_end_event(self.outcome))
        return ReplayLog(header, events)


def round_trajectory(game_id, record, seat, prefix_outcomes=(), predictor=None):
    """
    Trajectory of ``seat`` for one finished round.

    Args:
        game_id: Game identifier
        record: ``RoundRecord``
        seat: Recording seat
        prefix_outcomes: Outcomes of the game's earlier rounds
        predictor: Optional ``RewardPredictor`` for the attributed reward
    """
    global_reward = None
    if predictor is not None:
        rounds = encode_reward_input(list(prefix_outcomes) + [record.outcome], seat)
        values = predict_all_prefixes(predictor, rounds)
        global_reward = float(values[-1] - values[-2])
    return RoundTrajectory(
        game_id=game_id,
        round_index=record.round_index,
        seat=seat,
        seed=record.seed,
        steps=list(record.decisions.get(seat, [])),
        round_score=int(record.outcome.round_score_deltas[seat]),
        global_reward=global_reward,
    )


class GameRunner:
    """Drives the engine for one table of agents."""

    def __init__(self, agents, rules=None, record_events=True, max_steps=10000):
        """
        Initialize runner.

        Args:
            agents: Four ``Agent`` objects indexed by seat
            rules: ``RuleConfig``
            record_events: Keep replay events per round
            max_steps: Safety cap on engine steps per round
        """
        if len(agents) != 4:
            raise ValueError("A table needs exactly four agents")
        self.agents = list(agents)
        self.rules = rules or RuleConfig()
        self.record_events = record_events
        self.max_steps = max_steps

    def play_round(self, state, rng, is_last_round=False, round_index=0):
        """
        Play one dealt round to completion.

        Returns:
            RoundRecord
        """
        for seat, agent in enumerate(self.agents):
            agent.begin_round(state, seat, rng)
        events = [round_start_event(state)] if self.record_events else []
        decisions = {seat: [] for seat in range(4)}

        for _ in range(self.max_steps):
            if state.phase == Phase.AWAIT_DRAW:
                state = draw_tile(state)
                if self.record_events:
                    events.append(draw_event(state))
                continue
            seat = pending_seats(state)[0]
            view = DecisionView(state, seat, is_last_round, round_index)
            decision = self.agents[seat].act(view, rng)
            decisions[seat].extend(decision.records)
            result = apply_action(state, decision.action)
            if self.record_events:
                events.append(action_event(decision.action))
            if isinstance(result, RoundOutcome):
                if self.record_events:
                    events.extend(outcome_events(result))
                for s, agent in enumerate(self.agents):
                    agent.end_round(result, s)
                return RoundRecord(round_index, state.rng_seed, result, events, decisions)
            if self.record_events and result.dora_revealed > state.dora_revealed:
                events.append(dora_event(result))
            state = result
        raise RuntimeError(f"Round {round_index} exceeded {self.max_steps} steps")

    def play_game(self, game_seed, rng=None, dealer=0, game_id=None, on_round=None):
        """
        Play a full game.

        Args:
            game_seed: Seed of every deal in the game
            rng: ``numpy.random.Generator`` for agent sampling
            dealer: First dealer
            game_id: Identifier (default: derived from the seed)
            on_round: Callback ``(round_record, earlier_outcomes)`` after each round

        Returns:
            GameRecord
        """
        rng = rng if rng is not None else np.random.default_rng(game_seed)
        game_id = game_id or f"g{game_seed}"
        record = GameRecord(game_id, int(game_seed), tuple(getattr(a, 'name', 'agent') for a in self.agents))
        game = new_game(game_seed, self.rules, dealer)
        while isinstance(game, GameState):
            state = game.start_round()
            round_record = self.play_round(state, rng, game.is_last_round(), game.rounds_played)
            if on_round is not None:
                on_round(round_record, [r.outcome for r in record.rounds])
            record.rounds.append(round_record)
            game = advance_game(game, round_record.outcome)
        record.outcome = game
        logger.debug(f"Game {game_id}: {len(record.rounds)} rounds, ranks {game.ranks}")
        return record
