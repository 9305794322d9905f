"""Per-round summary vectors fed to the global reward predictor."""

from dataclasses import dataclass

import numpy as np

SUMMARY_DIM = 11
POINT_SCALE = 100.0


@dataclass(frozen=True)
class RoundSummaryVector:
    """
    One completed round from one seat's perspective.

    Scores are stored in points; ``to_array`` scales them by 1/100. The four
    accumulated scores and the dealer one-hot are in relative seat order
    (self, next, across, previous).
    """

    round_score: int
    accumulated_scores: tuple
    dealer_offset: int
    honba: int
    riichi_pot: int

    @classmethod
    def from_fields(cls, seat, round_score_deltas, scores_after, dealer, honba, riichi_pot):
        relative = tuple(scores_after[(seat + i) % 4] for i in range(4))
        return cls(
            round_score=int(round_score_deltas[seat]),
            accumulated_scores=relative,
            dealer_offset=(dealer - seat) % 4,
            honba=int(honba),
            riichi_pot=int(riichi_pot),
        )

    def to_array(self):
        vector = np.zeros(SUMMARY_DIM, dtype=np.float32)
        vector[0] = self.round_score / POINT_SCALE
        vector[1:5] = np.asarray(self.accumulated_scores, dtype=np.float32) / POINT_SCALE
        vector[5 + self.dealer_offset] = 1.0
        vector[9] = self.honba
        vector[10] = self.riichi_pot / POINT_SCALE
        return vector


def summarize_outcome(outcome, seat):
    """
    Summary of a settled ``RoundOutcome`` for ``seat``.

    Dealer and honba are those the round was played under; the pot is what
    remains after settlement.
    """
    state = outcome.final_state
    settlement = outcome.settlement
    return RoundSummaryVector.from_fields(
        seat, outcome.round_score_deltas, settlement.scores_after,
        state.dealer, state.honba, settlement.pot_after,
    )


def encode_reward_input(rounds, seat):
    """
    Encode the completed rounds of a game for the reward predictor.

    Args:
        rounds: Settled ``RoundOutcome`` objects or ``RoundSummaryVector``
            objects, oldest first (may be empty)
        seat: Perspective seat

    Returns:
        np.ndarray: ``K x 11`` float32 (``0 x 11`` for no rounds)
    """
    vectors = []
    for item in rounds:
        if not isinstance(item, RoundSummaryVector):
            item = summarize_outcome(item, seat)
        vectors.append(item.to_array())
    if not vectors:
        return np.zeros((0, SUMMARY_DIM), dtype=np.float32)
    return np.stack(vectors)
