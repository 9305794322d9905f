"""Unit tests for the multi-round game loop."""

import unittest
import sys
import os
from dataclasses import replace

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from riichi_ai.core.game import GameOutcome, GameState, new_game, advance_game, final_ranks
from riichi_ai.core.round import RoundOutcome, OutcomeKind
from riichi_ai.core.scoring import settle_round
from tests.layouts import play_random_round

SLOW = os.environ.get('RIICHI_AI_SLOW_TESTS') == '1'


def settled(game, **fields):
    state = game.start_round()
    outcome = RoundOutcome(**fields)
    return replace(outcome, settlement=settle_round(outcome, state, game.rules), final_state=state)


class TestGameFlow(unittest.TestCase):
    """Test cases for advance_game."""

    def test_dealer_win_repeats(self):
        """Test a dealer win keeps the dealer and adds a honba."""
        game = new_game(1)
        nxt = advance_game(game, settled(game, kind=OutcomeKind.TSUMO, winner=0, points=1500))
        self.assertIsInstance(nxt, GameState)
        self.assertEqual(nxt.dealer, 0)
        self.assertEqual(nxt.honba, 1)
        self.assertEqual(nxt.schedule_index, 0)
        self.assertEqual(nxt.scores, [26500, 24500, 24500, 24500])

    def test_non_dealer_win_in_last_round_ends(self):
        """Test a non-dealer win in the final scheduled round ends the game."""
        game = new_game(2)
        game.schedule_index = 7
        game.dealer = 3
        game.rounds_played = 7
        outcome = advance_game(game, settled(game, kind=OutcomeKind.RON, winner=1, loser=2, points=8000))
        self.assertIsInstance(outcome, GameOutcome)
        self.assertEqual(outcome.final_scores, (25000, 33000, 17000, 25000))
        self.assertEqual(outcome.ranks, (2, 1, 4, 3))
        self.assertEqual(outcome.rewards, (20, 50, -135, 0))

    def test_negative_score_ends(self):
        """Test a seat below zero ends the game immediately."""
        game = new_game(3)
        game.scores = [5000, 31000, 31000, 33000]
        outcome = advance_game(game, settled(game, kind=OutcomeKind.RON, winner=1, loser=0, points=8000))
        self.assertIsInstance(outcome, GameOutcome)
        self.assertLess(outcome.final_scores[0], 0)
        self.assertEqual(sum(outcome.final_scores) + outcome.leftover_pot, 100000)

    def test_round_cap(self):
        """Test dealer repeats stop at the round cap."""
        game = new_game(4)
        game.rounds_played = 11
        outcome = advance_game(game, settled(game, kind=OutcomeKind.TSUMO, winner=0, points=1500))
        self.assertIsInstance(outcome, GameOutcome)
        self.assertEqual(len(outcome.rounds), 1)

    def test_final_ranks_tie_break(self):
        """Test equal scores rank the lower seat first."""
        self.assertEqual(final_ranks([25000, 25000, 30000, 20000]), (2, 3, 1, 4))

    def test_random_games_sum_to_total(self):
        """Test full random games keep scores plus pot at 100000."""
        games = 10 if SLOW else 2
        for seed in range(games):
            rng = np.random.default_rng(seed)
            game = new_game(seed)
            while isinstance(game, GameState):
                outcome = play_random_round(game.start_round(), rng)
                self.assertEqual(sum(outcome.round_score_deltas) + outcome.pot_delta, 0)
                game = advance_game(game, outcome)
            self.assertEqual(sum(game.final_scores) + game.leftover_pot, 100000)
            self.assertEqual(sorted(game.ranks), [1, 2, 3, 4])
            self.assertLessEqual(len(game.rounds), 12)


if __name__ == '__main__':
    unittest.main()
