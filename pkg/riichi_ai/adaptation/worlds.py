"""
World sampling for run-time adaptation.

A world fixes everything the adapting seat cannot see at round start: the
other three hands and the order of both walls. Revealed dora indicators
stay at the front of the dead wall; every other unseen tile is dealt
uniformly from the pool.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..core.round import DEAD_WALL_SIZE, HAND_SIZE, LIVE_WALL_SIZE, RoundState
from ..core.tiles import EAST, NUM_TILES
from ..utils.exceptions import PoolInconsistencyError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VisibleInfo:
    """What the adapting seat knows when a round starts."""

    seat: int
    hand: tuple
    indicators: tuple
    dealer: int = 0
    round_id: int = 0
    scores: tuple = None
    honba: int = 0
    riichi_pot: int = 0
    prevalent_wind: int = EAST
    rules: object = None

    @classmethod
    def from_state(cls, state, seat):
        """Read the seat's information set from a freshly dealt round."""
        return cls(
            seat=seat,
            hand=tuple(sorted(state.seats[seat].hand.concealed)),
            indicators=tuple(state.dora_indicators),
            dealer=state.dealer,
            round_id=state.round_id,
            scores=tuple(state.scores),
            honba=state.honba,
            riichi_pot=state.riichi_pot,
            prevalent_wind=state.prevalent_wind,
            rules=state.rules,
        )

    def unseen_pool(self):
        """
        Tiles the seat has not seen, in id order.

        Raises:
            PoolInconsistencyError: If the hand or indicators are malformed
        """
        known = list(self.hand) + list(self.indicators)
        if len(self.hand) != HAND_SIZE:
            raise PoolInconsistencyError(f"Adapting seat must hold {HAND_SIZE} tiles, got {len(self.hand)}")
        if not 1 <= len(self.indicators) <= 5:
            raise PoolInconsistencyError(f"Invalid indicator count {len(self.indicators)}")
        if any(not 0 <= t < NUM_TILES for t in known):
            raise PoolInconsistencyError("Tile id out of range")
        if len(set(known)) != len(known):
            raise PoolInconsistencyError("A tile appears twice among the known tiles")
        known = set(known)
        return [t for t in range(NUM_TILES) if t not in known]


@dataclass(frozen=True)
class WorldSample:
    """One completion of the hidden tiles."""

    hands: tuple
    live_wall: tuple
    dead_wall: tuple
    seed: int

    def to_state(self, info):
        """Fresh ``RoundState`` of this world under the round context of ``info``."""
        return RoundState.from_layout(
            [list(h) for h in self.hands], list(self.live_wall), list(self.dead_wall),
            dealer=info.dealer, round_id=info.round_id, scores=info.scores, honba=info.honba,
            riichi_pot=info.riichi_pot, prevalent_wind=info.prevalent_wind, rng_seed=self.seed,
            rules=info.rules,
        )

    def opponent_tiles(self, seat):
        return [t for i, h in enumerate(self.hands) if i != seat for t in h]


def sample_world(info, rng, seed=0):
    """
    Deal one world consistent with ``info``.

    Args:
        info: ``VisibleInfo``
        rng: ``numpy.random.Generator``
        seed: Seed recorded on the world

    Returns:
        WorldSample
    """
    pool = np.asarray(info.unseen_pool())
    shuffled = [int(t) for t in rng.permutation(pool)]
    hands = []
    offset = 0
    for seat in range(4):
        if seat == info.seat:
            hands.append(tuple(info.hand))
        else:
            hands.append(tuple(sorted(shuffled[offset:offset + HAND_SIZE])))
            offset += HAND_SIZE
    live = shuffled[offset:offset + LIVE_WALL_SIZE]
    offset += LIVE_WALL_SIZE
    dead = list(info.indicators) + shuffled[offset:]
    if len(dead) != DEAD_WALL_SIZE:
        raise PoolInconsistencyError(f"Dead wall would hold {len(dead)} tiles")
    return WorldSample(tuple(hands), tuple(live), tuple(dead), int(seed))


def sample_worlds(info, k, seed=0):
    """
    Sample ``k`` worlds uniformly from the unseen pool.

    Each world gets its own generator spawned from ``seed``, so a world does
    not depend on how many others are drawn.

    Args:
        info: ``VisibleInfo`` (or a ``(state, seat)`` pair)
        k: Number of worlds
        seed: Base seed

    Returns:
        list: ``WorldSample`` objects

    Raises:
        PoolInconsistencyError: If the visible information is inconsistent
    """
    if isinstance(info, tuple):
        info = VisibleInfo.from_state(*info)
    info.unseen_pool()
    worlds = []
    for child in np.random.SeedSequence(int(seed)).spawn(int(k)):
        world_seed = int(child.generate_state(1, dtype=np.uint64)[0])
        worlds.append(sample_world(info, np.random.default_rng(child), world_seed))
    logger.debug(f"Sampled {k} worlds for seat {info.seat}")
    return worlds
