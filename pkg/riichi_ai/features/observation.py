"""Observation, oracle and call-candidate planes for one seat."""

from dataclasses import dataclass

import numpy as np

from ..core.tiles import NUM_KINDS, counts_34, kind_of
from .layout import (
    DEFAULT_LAYOUT, HONBA_BUCKETS, POT_BUCKETS, RELATIVE_NAMES, RIVER_RECENCY,
    ROUND_BUCKETS, SCORE_BUCKETS, WALL_BUCKETS, cumulative_rows,
)


@dataclass
class Observation:
    """Binary ``C_n x 34`` planes of one seat's information set."""

    planes: np.ndarray
    layout_version: str
    seat: int


@dataclass
class OracleExtension:
    """Binary ``C_o x 34`` planes of the hidden zones."""

    planes: np.ndarray
    layout_version: str
    seat: int


def relative_seat(seat, offset):
    return (seat + offset) % 4


def _bucket(value, width, buckets):
    return int(min(max(value // width, 0), buckets - 1))


def _fill_categorical(planes, start, index):
    planes[start + index, :] = 1


def encode_observation(state, seat, layout=DEFAULT_LAYOUT):
    """
    Encode everything ``seat`` can see.

    Args:
        state: ``RoundState``
        seat: Observing seat
        layout: ``FeatureLayout``

    Returns:
        Observation: Deterministic binary planes
    """
    planes = np.zeros((layout.n_normal, NUM_KINDS), dtype=np.uint8)
    ch = layout.normal
    own = state.seats[seat]

    start, end = ch['hand']
    planes[start:end] = cumulative_rows(own.hand.concealed_counts())

    if state.turn == seat and state.drawn_tile is not None:
        planes[ch['drawn_tile'][0], kind_of(state.drawn_tile)] = 1

    for offset, name in enumerate(RELATIVE_NAMES):
        other = state.seats[relative_seat(seat, offset)]
        meld_tiles = [tile for meld in other.hand.melds for tile in meld.tiles]
        start, end = ch[f"melds_{name}"]
        planes[start:end] = cumulative_rows(counts_34(meld_tiles))

        start, end = ch[f"river_{name}"]
        planes[start:end] = cumulative_rows(counts_34(other.river))

        start, _ = ch[f"recent_{name}"]
        for r, tile in enumerate(reversed(other.river[-RIVER_RECENCY:])):
            planes[start + r, kind_of(tile)] = 1

        if other.hand.riichi_declared:
            _fill_categorical(planes, ch['riichi'][0], offset)

        _fill_categorical(planes, ch[f"score_{name}"][0],
                          _bucket(other.score, 10000, SCORE_BUCKETS))

    start, end = ch['dora_indicators']
    planes[start:end] = cumulative_rows(counts_34(state.dora_indicators))

    _fill_categorical(planes, ch['round'][0], min(state.round_id, ROUND_BUCKETS - 1))
    _fill_categorical(planes, ch['dealer'][0], (state.dealer - seat) % 4)
    _fill_categorical(planes, ch['honba'][0], min(state.honba, HONBA_BUCKETS - 1))
    _fill_categorical(planes, ch['pot'][0],
                      min(state.riichi_pot // state.rules.riichi_bet, POT_BUCKETS - 1))
    _fill_categorical(planes, ch['live_wall'][0], _bucket(len(state.live_wall), 10, WALL_BUCKETS))
    _fill_categorical(planes, ch['seat_wind'][0], (seat - state.dealer) % 4)
    _fill_categorical(planes, ch['prevalent_wind'][0], state.prevalent_wind - 27)

    return Observation(planes, layout.layout_version, seat)


def encode_oracle(state, seat, layout=DEFAULT_LAYOUT):
    """
    Encode the tiles ``seat`` cannot see: the other concealed hands and both walls.

    Args:
        state: ``RoundState``
        seat: Observing seat
        layout: ``FeatureLayout``

    Returns:
        OracleExtension: Cumulative 4-channel encodings per hidden zone
    """
    planes = np.zeros((layout.n_oracle, NUM_KINDS), dtype=np.uint8)
    ch = layout.oracle
    for offset, name in enumerate(RELATIVE_NAMES[1:], start=1):
        other = state.seats[relative_seat(seat, offset)]
        start, end = ch[f"hidden_{name}"]
        planes[start:end] = cumulative_rows(other.hand.concealed_counts())
    start, end = ch['wall_live']
    planes[start:end] = cumulative_rows(counts_34(state.live_wall))
    start, end = ch['wall_dead']
    planes[start:end] = cumulative_rows(counts_34(state.dead_wall))
    return OracleExtension(planes, layout.layout_version, seat)


def encode_call_candidate(claimed_kind=None, consumed_kinds=(), meld_kinds=(), layout=DEFAULT_LAYOUT):
    """
    Planes describing a call under consideration.

    Args:
        claimed_kind: Kind of the discard being claimed
        consumed_kinds: Kinds taken from the caller's hand
        meld_kinds: Kinds of the resulting meld

    Returns:
        np.ndarray: ``n_call x 34`` uint8 (zeros when no call is considered)
    """
    planes = np.zeros((layout.n_call, NUM_KINDS), dtype=np.uint8)
    ch = layout.call
    if claimed_kind is not None:
        planes[ch['call_claimed'][0], claimed_kind] = 1
    for kind in consumed_kinds:
        planes[ch['call_consumed'][0], kind] = 1
    for kind in meld_kinds:
        planes[ch['call_meld'][0], kind] = 1
    return planes


def zone_counts(observation, oracle, layout=DEFAULT_LAYOUT):
    """
    Per-kind tile totals over every zone the two encodings cover.

    Hand, melds and rivers come from the observation, the other hands and
    both walls from the oracle extension.
    """
    total = np.zeros(NUM_KINDS, dtype=np.int64)
    groups = [('hand', observation.planes, layout.normal)]
    groups += [(f"melds_{n}", observation.planes, layout.normal) for n in RELATIVE_NAMES]
    groups += [(f"river_{n}", observation.planes, layout.normal) for n in RELATIVE_NAMES]
    groups += [(name, oracle.planes, layout.oracle) for name in layout.oracle]
    for name, planes, ranges in groups:
        start, end = ranges[name]
        total += planes[start:end].sum(axis=0, dtype=np.int64)
    return total
