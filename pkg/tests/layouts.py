"""Helpers for building rigged rounds in tests."""

import numpy as np

from riichi_ai.core.round import RoundState, Phase, ActionKind, Action, draw_tile, apply_action, legal_actions
from riichi_ai.core.tiles import string_to_tiles, kind_of, NUM_TILES


class TilePool:
    """Hands out distinct tile ids by notation, lowest free copy first."""

    def __init__(self):
        self.used = set()

    def take(self, notation):
        tiles = []
        for tile in string_to_tiles(notation):
            kind = kind_of(tile)
            free = [t for t in range(kind * 4, kind * 4 + 4) if t not in self.used]
            if not free:
                raise ValueError(f"no copy of kind {kind} left for {notation}")
            self.used.add(free[0])
            tiles.append(free[0])
        return tiles

    def rest(self, seed=0):
        remaining = [t for t in range(NUM_TILES) if t not in self.used]
        order = np.random.default_rng(seed).permutation(len(remaining))
        return [remaining[i] for i in order]


def build_round(hands, live_prefix=(), dead_prefix='', dealer=0, seed=0, **kwargs):
    """
    Build a round from notation.

    Args:
        hands: Dict seat -> notation (13 tiles); unspecified seats get filler
        live_prefix: Notations of the first live-wall draws, in order
        dead_prefix: Notation of the first dead-wall tiles (indicators)
        dealer: Dealer seat

    Returns:
        RoundState
    """
    pool = TilePool()
    seat_tiles = {seat: pool.take(notation) for seat, notation in hands.items()}
    live = []
    for notation in live_prefix:
        live.extend(pool.take(notation))
    dead = pool.take(dead_prefix) if dead_prefix else []
    filler = pool.rest(seed)

    for seat in range(4):
        if seat not in seat_tiles:
            seat_tiles[seat] = [filler.pop() for _ in range(13)]
    while len(dead) < 14:
        dead.append(filler.pop())
    live.extend(filler)
    return RoundState.from_layout([seat_tiles[s] for s in range(4)], live, dead, dealer=dealer, **kwargs)


def tsumogiri_until(state, seat):
    """
    Advance with draw-and-discard for every other seat, passing on all calls,
    until ``seat`` has drawn and must decide.
    """
    while True:
        if state.phase == Phase.AWAIT_DRAW:
            state = draw_tile(state)
            if state.turn == seat:
                return state
        elif state.phase == Phase.AWAIT_CALLS:
            pending = [s for s in state.pending.eligible if s not in state.pending.responses]
            state = apply_action(state, Action(ActionKind.PASS, pending[0]))
        elif state.phase == Phase.AWAIT_DISCARD:
            state = apply_action(state, Action(ActionKind.DISCARD, state.turn, state.drawn_tile))
        else:
            raise AssertionError('round ended early')


def play_random_round(state, rng, on_state=None):
    """Play a round to completion choosing uniformly among legal actions."""
    from riichi_ai.core.round import RoundOutcome, pending_seats

    while True:
        if on_state is not None:
            on_state(state)
        if state.phase == Phase.AWAIT_DRAW:
            state = draw_tile(state)
            continue
        seat = pending_seats(state)[0]
        actions = legal_actions(state, seat)
        result = apply_action(state, actions[int(rng.integers(len(actions)))])
        if isinstance(result, RoundOutcome):
            return result
        state = result
