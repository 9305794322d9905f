"""Round state machine: dealing, legality, transitions and outcomes."""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .hand import (
    Hand, Meld, MeldKind, enumerate_decompositions, is_tenpai, shanten, winning_kinds,
)
from .rules import RuleConfig
from .scoring import WinContext, score_hand, settle_round
from .tiles import (
    EAST, NUM_TILES, can_start_run, kind_of, wind_kind_for_seat,
)
from ..utils.exceptions import (
    IllegalActionError, InvalidSeatError, NoYakuError, RoundFinishedError, TileCountError,
)

DEAD_WALL_SIZE = 14
LIVE_WALL_SIZE = 70
HAND_SIZE = 13
MAX_INDICATORS = 5
REPLACEMENT_INSERT_INDEX = 10


class Phase(Enum):
    AWAIT_DRAW = 'await_draw'
    AWAIT_DISCARD = 'await_discard'
    AWAIT_CALLS = 'await_calls'
    FINISHED = 'finished'


class ActionKind(Enum):
    DISCARD = 'discard'
    RIICHI = 'riichi'
    CHOW = 'chow'
    PONG = 'pong'
    KONG = 'kong'
    CLOSED_KONG = 'closed_kong'
    ADD_KONG = 'add_kong'
    WIN = 'win'
    PASS = 'pass'


_ACTION_ORDER = {kind: i for i, kind in enumerate(ActionKind)}


class OutcomeKind(Enum):
    TSUMO = 'tsumo'
    RON = 'ron'
    EXHAUSTIVE_DRAW = 'exhaustive_draw'


@dataclass(frozen=True)
class Action:
    """
    One player decision.

    ``tile`` is the discarded, claimed, declared or winning tile id;
    ``chow_start`` is the lowest kind of a chow.
    """

    kind: ActionKind
    actor: int
    tile: Optional[int] = None
    chow_start: Optional[int] = None

    def sort_key(self):
        return (_ACTION_ORDER[self.kind], -1 if self.tile is None else self.tile,
                -1 if self.chow_start is None else self.chow_start)

    def to_dict(self):
        data = {'kind': self.kind.value, 'actor': self.actor}
        if self.tile is not None:
            data['tile'] = self.tile
        if self.chow_start is not None:
            data['chow_start'] = self.chow_start
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(ActionKind(data['kind']), data['actor'], data.get('tile'), data.get('chow_start'))

    def __str__(self):
        parts = [self.kind.value, f"seat={self.actor}"]
        if self.tile is not None:
            parts.append(f"tile={self.tile}")
        if self.chow_start is not None:
            parts.append(f"chow_start={self.chow_start}")
        return f"Action({', '.join(parts)})"


@dataclass
class SeatState:
    hand: Hand
    river: list = field(default_factory=list)
    score: int = 25000
    riichi_river_index: Optional[int] = None

    def copy(self):
        return SeatState(self.hand.copy(), list(self.river), self.score, self.riichi_river_index)


@dataclass
class CallWindow:
    """Responses collected after a discard or an added kong."""

    tile: int
    discarder: int
    robbing: bool = False
    eligible: tuple = ()
    responses: dict = field(default_factory=dict)

    def copy(self):
        return CallWindow(self.tile, self.discarder, self.robbing, self.eligible, dict(self.responses))


@dataclass
class RoundState:
    """Authoritative state of one round."""

    seats: list
    live_wall: list
    dead_wall: list
    dealer: int
    turn: int
    phase: Phase = Phase.AWAIT_DRAW
    dora_revealed: int = 1
    riichi_pot: int = 0
    honba: int = 0
    round_id: int = 0
    rng_seed: int = 0
    prevalent_wind: int = EAST
    drawn_tile: Optional[int] = None
    discard_only: bool = False
    pending: Optional[CallWindow] = None
    kong_count: int = 0
    step: int = 0
    start_scores: tuple = ()
    start_pot: int = 0
    rules: RuleConfig = field(default_factory=RuleConfig, compare=False, repr=False)

    @property
    def dora_indicators(self):
        """Revealed indicator tiles (the i-th indicator is ``dead_wall[i]``)."""
        return list(self.dead_wall[:self.dora_revealed])

    @property
    def scores(self):
        return [seat.score for seat in self.seats]

    def seat_wind(self, seat):
        return wind_kind_for_seat(seat, self.dealer)

    def clone(self):
        new = replace(self)
        new.seats = [seat.copy() for seat in self.seats]
        new.live_wall = list(self.live_wall)
        new.dead_wall = list(self.dead_wall)
        new.pending = self.pending.copy() if self.pending else None
        return new

    @classmethod
    def from_layout(cls, hands, live_wall, dead_wall, dealer=0, round_id=0, scores=None,
                    honba=0, riichi_pot=0, prevalent_wind=EAST, rng_seed=0, rules=None):
        """
        Build a fresh round from explicit tile placement.

        Args:
            hands: Four 13-tile lists indexed by seat
            live_wall: Live wall in draw order
            dead_wall: 14 tiles (0..4 indicators, 5..9 under-indicators,
                10..13 kong replacements drawn from the end)
            dealer: Dealer seat, who draws first
            scores: Carried scores (default: the starting score each)

        Returns:
            RoundState: State in ``AWAIT_DRAW`` with one indicator revealed

        Raises:
            TileCountError: If the layout does not hold all 136 tiles once
        """
        rules = rules or RuleConfig()
        if len(hands) != 4 or any(len(h) != HAND_SIZE for h in hands):
            raise TileCountError("Each of the four hands needs 13 tiles")
        if len(dead_wall) != DEAD_WALL_SIZE:
            raise TileCountError(f"Dead wall needs {DEAD_WALL_SIZE} tiles, got {len(dead_wall)}")
        everything = [t for h in hands for t in h] + list(live_wall) + list(dead_wall)
        if sorted(everything) != list(range(NUM_TILES)):
            raise TileCountError("Layout must contain every tile exactly once")
        if scores is None:
            scores = [rules.starting_score] * 4
        seats = [SeatState(Hand(sorted(int(t) for t in hands[i])), [], int(scores[i]))
                 for i in range(4)]
        return cls(
            seats=seats,
            live_wall=[int(t) for t in live_wall],
            dead_wall=[int(t) for t in dead_wall],
            dealer=dealer,
            turn=dealer,
            riichi_pot=riichi_pot,
            honba=honba,
            round_id=round_id,
            rng_seed=rng_seed,
            prevalent_wind=prevalent_wind,
            start_scores=tuple(int(s) for s in scores),
            start_pot=riichi_pot,
            rules=rules,
        )


@dataclass(frozen=True)
class RoundOutcome:
    """
    Result of a finished round.

    ``final_state`` is the state at the moment the round ended, before the
    settlement transfers; ``round_score_deltas`` cover the whole round,
    riichi bets included.
    """

    kind: OutcomeKind
    winner: Optional[int] = None
    loser: Optional[int] = None
    yaku: tuple = ()
    han: int = 0
    dora: int = 0
    points: int = 0
    win_tile: Optional[int] = None
    tenpai_flags: tuple = (False, False, False, False)
    round_score_deltas: tuple = (0, 0, 0, 0)
    pot_delta: int = 0
    settlement: object = None
    final_state: object = field(default=None, compare=False, repr=False)


def deal_round(seed, dealer=0, round_id=0, scores=None, honba=0, riichi_pot=0,
               prevalent_wind=EAST, rules=None):
    """
    Shuffle and deal a round.

    Tiles ``13i..13i+12`` of the shuffle go to the i-th seat counted from
    the dealer, the next 70 form the live wall and the last 14 the dead wall.

    Args:
        seed: 64-bit shuffle seed
        dealer: Dealer seat
        round_id: Round counter within the game
        scores: Carried scores (sum + pot = 100000)
        honba: Repeat counter
        riichi_pot: Carried riichi bets
        prevalent_wind: Round wind kind
        rules: ``RuleConfig``

    Returns:
        RoundState: Fresh round awaiting the dealer's draw
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = [int(t) for t in rng.permutation(NUM_TILES)]
    hands = [None] * 4
    for i in range(4):
        hands[(dealer + i) % 4] = perm[HAND_SIZE * i:HAND_SIZE * (i + 1)]
    live = perm[4 * HAND_SIZE:4 * HAND_SIZE + LIVE_WALL_SIZE]
    dead = perm[4 * HAND_SIZE + LIVE_WALL_SIZE:]
    return RoundState.from_layout(
        hands, live, dead, dealer=dealer, round_id=round_id, scores=scores, honba=honba,
        riichi_pot=riichi_pot, prevalent_wind=prevalent_wind, rng_seed=seed, rules=rules,
    )


def tile_multiset(state):
    """Sorted list of every tile id held in any zone of ``state``."""
    tiles = list(state.live_wall) + list(state.dead_wall)
    for seat in state.seats:
        tiles.extend(seat.hand.all_tiles())
        tiles.extend(seat.river)
    return sorted(tiles)


def pending_seats(state):
    """Seats that still owe a decision in the current phase."""
    if state.phase == Phase.AWAIT_DISCARD:
        return [state.turn]
    if state.phase == Phase.AWAIT_CALLS:
        window = state.pending
        return [seat for seat in window.eligible if seat not in window.responses]
    return []


def win_score(state, seat, hand, tsumo):
    """
    Score of ``hand`` (14 effective tiles, winning tile included), or ``None``.

    ``None`` covers both an incomplete shape and a shape without yaku.
    """
    decompositions = enumerate_decompositions(hand)
    if not decompositions:
        return None
    context = WinContext(
        tsumo=tsumo,
        is_dealer=seat == state.dealer,
        seat_wind=state.seat_wind(seat),
        prevalent_wind=state.prevalent_wind,
        riichi=hand.riichi_declared,
        dora_indicators=tuple(state.dora_indicators),
        honba=state.honba,
    )
    try:
        return score_hand(decompositions, context, state.rules)
    except NoYakuError:
        return None


def canonical_tile(hand, kind, drawn_tile=None):
    """Tile used to act on ``kind``: the drawn tile if it matches, else the lowest id."""
    if drawn_tile is not None and kind_of(drawn_tile) == kind and drawn_tile in hand.concealed:
        return drawn_tile
    return min(t for t in hand.concealed if kind_of(t) == kind)


def _kong_allowed(state):
    return state.kong_count < state.rules.max_kongs and len(state.live_wall) >= 1


def _riichi_keeps_waits(hand, drawn_tile):
    kind = kind_of(drawn_tile)
    before = hand.copy()
    before.concealed.remove(drawn_tile)
    after = hand.copy()
    tiles = [t for t in after.concealed if kind_of(t) == kind]
    for t in tiles:
        after.concealed.remove(t)
    after.melds.append(Meld(MeldKind.CLOSED_KONG, tuple(sorted(tiles)), None, True))
    waits_before = winning_kinds(before)
    return bool(waits_before) and winning_kinds(after) == waits_before


def _discard_phase_actions(state):
    seat = state.turn
    seat_state = state.seats[seat]
    hand = seat_state.hand
    rules = state.rules
    actions = []

    if not state.discard_only and state.drawn_tile is not None:
        if win_score(state, seat, hand, tsumo=True) is not None:
            actions.append(Action(ActionKind.WIN, seat, state.drawn_tile))

    counts = hand.concealed_counts()
    if hand.riichi_declared:
        actions.append(Action(ActionKind.DISCARD, seat, state.drawn_tile))
        kind = kind_of(state.drawn_tile)
        if counts[kind] == 4 and _kong_allowed(state) and _riichi_keeps_waits(hand, state.drawn_tile):
            actions.append(Action(ActionKind.CLOSED_KONG, seat, canonical_tile(hand, kind)))
        return tuple(sorted(actions, key=Action.sort_key))

    kinds = sorted({kind_of(t) for t in hand.concealed})
    for kind in kinds:
        actions.append(Action(ActionKind.DISCARD, seat, canonical_tile(hand, kind, state.drawn_tile)))

    if not state.discard_only:
        can_riichi = (
            hand.is_closed()
            and seat_state.score >= rules.riichi_bet
            and len(state.live_wall) >= rules.min_riichi_wall
            and shanten(hand) <= 0
        )
        if can_riichi:
            for kind in kinds:
                tile = canonical_tile(hand, kind, state.drawn_tile)
                rest = hand.copy()
                rest.concealed.remove(tile)
                if is_tenpai(rest):
                    actions.append(Action(ActionKind.RIICHI, seat, tile))
        if _kong_allowed(state):
            for kind in kinds:
                if counts[kind] == 4:
                    actions.append(Action(ActionKind.CLOSED_KONG, seat, canonical_tile(hand, kind)))
            for meld in hand.melds:
                if meld.kind == MeldKind.PONG and counts[meld.base_kind] >= 1:
                    tile = canonical_tile(hand, meld.base_kind)
                    actions.append(Action(ActionKind.ADD_KONG, seat, tile))

    return tuple(sorted(actions, key=Action.sort_key))


def _call_options(state, seat, window):
    tile = window.tile
    kind = kind_of(tile)
    hand = state.seats[seat].hand
    options = [Action(ActionKind.PASS, seat)]

    if win_score(state, seat, hand.with_tile(tile), tsumo=False) is not None:
        options.append(Action(ActionKind.WIN, seat, tile))

    if window.robbing or hand.riichi_declared or not state.live_wall:
        return tuple(sorted(options, key=Action.sort_key))

    counts = hand.concealed_counts()
    if counts[kind] >= 2:
        options.append(Action(ActionKind.PONG, seat, tile))
    if counts[kind] >= 3 and _kong_allowed(state):
        options.append(Action(ActionKind.KONG, seat, tile))
    if seat == (window.discarder + 1) % 4 and kind < 27:
        for start in (kind - 2, kind - 1, kind):
            if start < 0 or start // 9 != kind // 9 or not can_start_run(start):
                continue
            others = [k for k in (start, start + 1, start + 2) if k != kind]
            if all(counts[k] >= 1 for k in others):
                options.append(Action(ActionKind.CHOW, seat, tile, chow_start=start))

    return tuple(sorted(options, key=Action.sort_key))


def legal_actions(state, seat):
    """
    Legal actions of ``seat`` in ``state``.

    Args:
        state: ``RoundState``
        seat: Seat 0..3

    Returns:
        tuple: Sorted ``Action`` objects (empty when the seat does not act)

    Raises:
        RoundFinishedError: If the round is over
        InvalidSeatError: If ``seat`` is not 0..3
    """
    if state.phase == Phase.FINISHED:
        raise RoundFinishedError("Round is finished")
    if seat not in (0, 1, 2, 3):
        raise InvalidSeatError(f"Unknown seat {seat!r}")
    if state.phase == Phase.AWAIT_DISCARD:
        return _discard_phase_actions(state) if seat == state.turn else ()
    if state.phase == Phase.AWAIT_CALLS:
        window = state.pending
        if seat not in window.eligible or seat in window.responses:
            return ()
        return _call_options(state, seat, window)
    return ()


def _illegal_reason(state, action, legal):
    if action.actor not in (0, 1, 2, 3):
        return f"unknown seat {action.actor}"
    if state.phase == Phase.AWAIT_DRAW:
        return "a tile must be drawn first"
    if not legal:
        return f"seat {action.actor} has no decision in phase {state.phase.value}"
    if state.phase == Phase.AWAIT_CALLS and action.kind in (ActionKind.DISCARD, ActionKind.RIICHI):
        return "discards are not allowed while calls are pending"
    if state.phase == Phase.AWAIT_DISCARD and action.kind in (
            ActionKind.PASS, ActionKind.CHOW, ActionKind.PONG, ActionKind.KONG):
        return "calls are only allowed on another player's discard"
    hand = state.seats[action.actor].hand
    if action.kind in (ActionKind.DISCARD, ActionKind.RIICHI):
        if hand.riichi_declared and action.tile != state.drawn_tile:
            return "a riichi hand may only discard the drawn tile"
        if action.tile not in hand.concealed:
            return "tile is not in the concealed hand"
        if action.kind == ActionKind.RIICHI:
            return "riichi needs a closed tenpai hand, enough points and enough live wall"
        return "discard must use the canonical tile of its kind"
    if action.kind == ActionKind.WIN:
        return "hand is not complete or carries no yaku"
    if action.kind == ActionKind.CHOW:
        return "chow is only for the next seat and needs the two other tiles"
    if action.kind in (ActionKind.CLOSED_KONG, ActionKind.ADD_KONG, ActionKind.KONG):
        return "kong needs the tiles, a free kong slot and live wall, and keeps riichi waits"
    return "action is not in the legal set"


def draw_tile(state):
    """
    Draw the next live-wall tile for the seat to move.

    Returns:
        RoundState: New state in ``AWAIT_DISCARD``

    Raises:
        RoundFinishedError: If the round is over
        IllegalActionError: Outside ``AWAIT_DRAW``
    """
    if state.phase == Phase.FINISHED:
        raise RoundFinishedError("Round is finished")
    if state.phase != Phase.AWAIT_DRAW:
        raise IllegalActionError('draw', f"round is in phase {state.phase.value}")
    new = state.clone()
    tile = new.live_wall.pop(0)
    new.seats[new.turn].hand.concealed.append(tile)
    new.drawn_tile = tile
    new.discard_only = False
    new.phase = Phase.AWAIT_DISCARD
    new.step += 1
    return new


def _take_tiles(hand, kind, count):
    tiles = sorted(t for t in hand.concealed if kind_of(t) == kind)[:count]
    for t in tiles:
        hand.concealed.remove(t)
    return tiles


def _draw_replacement(state, seat):
    tile = state.dead_wall.pop()
    state.dead_wall.insert(REPLACEMENT_INSERT_INDEX, state.live_wall.pop())
    state.dora_revealed = min(state.dora_revealed + 1, MAX_INDICATORS)
    state.seats[seat].hand.concealed.append(tile)
    state.drawn_tile = tile
    state.discard_only = False
    state.kong_count += 1


def _settle(state, outcome):
    settlement = settle_round(outcome, state, state.rules)
    deltas = tuple(after - before for after, before in zip(settlement.scores_after, state.start_scores))
    return replace(
        outcome,
        round_score_deltas=deltas,
        pot_delta=settlement.pot_after - state.start_pot,
        settlement=settlement,
        final_state=state,
    )


def _exhaustive_draw(state):
    state.phase = Phase.FINISHED
    state.pending = None
    flags = tuple(is_tenpai(seat.hand) for seat in state.seats)
    return _settle(state, RoundOutcome(OutcomeKind.EXHAUSTIVE_DRAW, tenpai_flags=flags))


def _finish_win(state, winner, loser, tile, tsumo):
    hand = state.seats[winner].hand
    if not tsumo:
        hand = hand.with_tile(tile)
    result = win_score(state, winner, hand, tsumo)
    state.phase = Phase.FINISHED
    state.pending = None
    outcome = RoundOutcome(
        OutcomeKind.TSUMO if tsumo else OutcomeKind.RON,
        winner=winner,
        loser=loser,
        yaku=result.yaku,
        han=result.han,
        dora=result.dora,
        points=result.points,
        win_tile=tile,
    )
    return _settle(state, outcome)


def _open_window(state, tile, discarder, robbing):
    window = CallWindow(tile, discarder, robbing)
    state.pending = window
    order = [(discarder + offset) % 4 for offset in (1, 2, 3)]
    window.eligible = tuple(seat for seat in order if len(_call_options(state, seat, window)) > 1)
    if not window.eligible:
        return _after_no_call(state)
    state.phase = Phase.AWAIT_CALLS
    return state


def _complete_add_kong(state, seat, tile):
    hand = state.seats[seat].hand
    hand.concealed.remove(tile)
    kind = kind_of(tile)
    for i, meld in enumerate(hand.melds):
        if meld.kind == MeldKind.PONG and meld.base_kind == kind:
            hand.melds[i] = Meld(MeldKind.ADD_KONG, tuple(sorted(meld.tiles + (tile,))),
                                 meld.source_seat, False)
            break
    state.turn = seat
    state.phase = Phase.AWAIT_DISCARD
    _draw_replacement(state, seat)
    return state


def _after_no_call(state):
    window = state.pending
    state.pending = None
    if window.robbing:
        return _complete_add_kong(state, window.discarder, window.tile)
    if not state.live_wall:
        return _exhaustive_draw(state)
    state.turn = (window.discarder + 1) % 4
    state.phase = Phase.AWAIT_DRAW
    return state


def _claim(state, action, window):
    discarder = window.discarder
    tile = window.tile
    state.seats[discarder].river.pop()
    hand = state.seats[action.actor].hand
    kind = kind_of(tile)
    if action.kind == ActionKind.CHOW:
        taken = []
        for k in range(action.chow_start, action.chow_start + 3):
            if k != kind:
                taken.extend(_take_tiles(hand, k, 1))
        meld = Meld(MeldKind.CHOW, tuple(sorted(taken + [tile])), discarder, False)
    elif action.kind == ActionKind.PONG:
        meld = Meld(MeldKind.PONG, tuple(sorted(_take_tiles(hand, kind, 2) + [tile])), discarder, False)
    else:
        meld = Meld(MeldKind.KONG, tuple(sorted(_take_tiles(hand, kind, 3) + [tile])), discarder, False)
    hand.melds.append(meld)

    state.pending = None
    state.turn = action.actor
    state.phase = Phase.AWAIT_DISCARD
    if action.kind == ActionKind.KONG:
        _draw_replacement(state, action.actor)
    else:
        state.drawn_tile = None
        state.discard_only = True
    return state


def _resolve_calls(state):
    window = state.pending
    responses = [window.responses[seat] for seat in window.eligible]
    for response in responses:
        if response.kind == ActionKind.WIN:
            return _finish_win(state, response.actor, window.discarder, window.tile, tsumo=False)
    for response in responses:
        if response.kind in (ActionKind.PONG, ActionKind.KONG):
            return _claim(state, response, window)
    for response in responses:
        if response.kind == ActionKind.CHOW:
            return _claim(state, response, window)
    return _after_no_call(state)


def apply_action(state, action):
    """
    Apply a legal action.

    Calls on a discard are collected from every eligible seat and then
    resolved: a win (closest seat after the discarder) beats pong/kong,
    which beats chow. An added kong first opens a window in which other
    seats may only win on the added tile.

    Args:
        state: ``RoundState`` (left unchanged)
        action: ``Action`` from ``legal_actions``

    Returns:
        RoundState or RoundOutcome

    Raises:
        RoundFinishedError: If the round is over
        IllegalActionError: If the action is not legal; the message names the failed rule
    """
    if state.phase == Phase.FINISHED:
        raise RoundFinishedError("Round is finished")
    legal = legal_actions(state, action.actor) if action.actor in (0, 1, 2, 3) else ()
    if action not in legal:
        raise IllegalActionError(action, _illegal_reason(state, action, legal))

    new = state.clone()
    new.step += 1
    seat = action.actor
    kind = action.kind

    if new.phase == Phase.AWAIT_CALLS:
        new.pending.responses[seat] = action
        if len(new.pending.responses) < len(new.pending.eligible):
            return new
        return _resolve_calls(new)

    if kind == ActionKind.WIN:
        return _finish_win(new, seat, None, action.tile, tsumo=True)

    seat_state = new.seats[seat]
    if kind in (ActionKind.DISCARD, ActionKind.RIICHI):
        seat_state.hand.concealed.remove(action.tile)
        seat_state.river.append(action.tile)
        if kind == ActionKind.RIICHI:
            seat_state.hand.riichi_declared = True
            seat_state.score -= new.rules.riichi_bet
            new.riichi_pot += new.rules.riichi_bet
            seat_state.riichi_river_index = len(seat_state.river) - 1
        new.drawn_tile = None
        new.discard_only = False
        return _open_window(new, action.tile, seat, robbing=False)

    if kind == ActionKind.CLOSED_KONG:
        tiles = _take_tiles(seat_state.hand, kind_of(action.tile), 4)
        seat_state.hand.melds.append(Meld(MeldKind.CLOSED_KONG, tuple(tiles), None, True))
        _draw_replacement(new, seat)
        return new

    # ADD_KONG: the tile stays in hand until nobody robs it
    new.drawn_tile = None
    return _open_window(new, action.tile, seat, robbing=True)
