"""Multi-round game: dealer rotation, schedule, termination and ranks."""

from dataclasses import dataclass, field

import numpy as np

from .round import deal_round
from .rules import RuleConfig
from .tiles import EAST


def round_seed(game_seed, round_index):
    """64-bit shuffle seed of the ``round_index``-th round of a game."""
    state = np.random.SeedSequence([int(game_seed), int(round_index)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def final_ranks(scores):
    """
    Ranks 1..4 per seat by score; ties go to the lower seat index.

    Args:
        scores: Four scores indexed by seat

    Returns:
        tuple: Rank of each seat
    """
    order = sorted(range(4), key=lambda seat: (-scores[seat], seat))
    ranks = [0] * 4
    for position, seat in enumerate(order):
        ranks[seat] = position + 1
    return tuple(ranks)


@dataclass
class GameState:
    """Between-round state of a game."""

    scores: list
    seed: int = 0
    dealer: int = 0
    honba: int = 0
    riichi_pot: int = 0
    schedule_index: int = 0
    rounds_played: int = 0
    history: list = field(default_factory=list)
    rules: RuleConfig = field(default_factory=RuleConfig, compare=False, repr=False)

    @property
    def prevalent_wind(self):
        return EAST + min(self.schedule_index // 4, 3)

    def is_last_round(self):
        """Whether the next round is the last one the schedule or cap allows."""
        return (self.schedule_index >= self.rules.round_schedule - 1
                or self.rounds_played >= self.rules.round_cap - 1)

    def start_round(self):
        """Deal the next round."""
        return deal_round(
            round_seed(self.seed, self.rounds_played),
            dealer=self.dealer,
            round_id=self.rounds_played,
            scores=list(self.scores),
            honba=self.honba,
            riichi_pot=self.riichi_pot,
            prevalent_wind=self.prevalent_wind,
            rules=self.rules,
        )


@dataclass(frozen=True)
class GameOutcome:
    """Final result of a game; scores plus leftover pot sum to the starting total."""

    final_scores: tuple
    ranks: tuple
    rewards: tuple
    leftover_pot: int
    rounds: tuple
    seed: int = 0


def new_game(seed, rules=None, dealer=0):
    """
    Start a game with every seat at the starting score.

    Args:
        seed: Game seed; round seeds derive from it
        rules: ``RuleConfig``
        dealer: First dealer

    Returns:
        GameState
    """
    rules = rules or RuleConfig()
    return GameState(scores=[rules.starting_score] * 4, seed=seed, dealer=dealer, rules=rules)


def advance_game(game, outcome):
    """
    Apply a settled round to the game.

    The dealer repeats on a dealer win (and on dealer tenpai at an
    exhaustive draw when configured); otherwise the deal rotates and the
    schedule advances. The game ends when the schedule is exhausted, the
    round cap is hit, or any score drops below zero.

    Args:
        game: ``GameState`` (left unchanged)
        outcome: ``RoundOutcome`` of the round dealt by ``game``

    Returns:
        GameState or GameOutcome
    """
    rules = game.rules
    settlement = outcome.settlement
    history = list(game.history) + [outcome]
    scores = list(settlement.scores_after)
    schedule_index = game.schedule_index + (0 if settlement.dealer_repeats else 1)
    rounds_played = game.rounds_played + 1

    finished = (
        any(score < 0 for score in scores)
        or schedule_index >= rules.round_schedule
        or rounds_played >= rules.round_cap
    )
    if finished:
        ranks = final_ranks(scores)
        rewards = tuple(rules.game_reward[rank - 1] for rank in ranks)
        return GameOutcome(tuple(scores), ranks, rewards, settlement.pot_after, tuple(history), game.seed)

    return GameState(
        scores=scores,
        seed=game.seed,
        dealer=settlement.dealer_next,
        honba=settlement.honba_next,
        riichi_pot=settlement.pot_after,
        schedule_index=schedule_index,
        rounds_played=rounds_played,
        history=history,
        rules=rules,
    )
