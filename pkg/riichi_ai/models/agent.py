"""
Agents and the decision flow.

On its own draw an agent first consults the rule-based winning model, then
the kong step, the riichi step and finally the discard step. On another
player's discard it consults the winning model, then queries the chow, pong
and kong heads for every legal call and proposes the positive call with the
highest confidence; the engine arbitrates against other seats.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ..core.game import final_ranks
from ..core.hand import shanten
from ..core.round import (
    Action, ActionKind, OutcomeKind, Phase, RoundOutcome, legal_actions, win_score,
)
from ..core.scoring import settle_round
from ..core.tiles import DRAGON_KINDS, is_terminal_or_honor, kind_of
from ..features.layout import DEFAULT_LAYOUT, LOOKAHEAD_DEPTH, NUM_COLUMNS
from ..features.lookahead import lookahead_for_seat
from ..features.observation import encode_call_candidate, encode_observation, encode_oracle
from .distribution import build_input, forward, select_action

logger = logging.getLogger(__name__)

YES = 1
NO = 0
CALL_HEADS = {ActionKind.CHOW: 'chow', ActionKind.PONG: 'pong', ActionKind.KONG: 'kong'}
OWN_KONGS = (ActionKind.CLOSED_KONG, ActionKind.ADD_KONG)


@dataclass
class DecisionView:
    """What an agent is handed at a decision point."""

    state: object
    seat: int
    is_last_round: bool = False
    round_index: int = 0


@dataclass
class DecisionRecord:
    """One head query: its input, legal mask, chosen index and behaviour probability."""

    head: str
    planes: np.ndarray
    mask: np.ndarray
    action_index: int
    behavior_prob: float
    version: int
    seat: int
    step: int

    def to_dict(self):
        return {
            'head': self.head,
            'mask': np.nonzero(self.mask)[0].tolist(),
            'action_index': self.action_index,
            'behavior_prob': self.behavior_prob,
            'version': self.version,
            'seat': self.seat,
            'step': self.step,
        }


@dataclass
class Decision:
    action: Action
    records: list = field(default_factory=list)


def winning_model(view, action):
    """
    Rule-based win declaration.

    Always declare, except in the last round of a game when the win would
    still leave the agent with the lowest accumulated score.

    Args:
        view: ``DecisionView``
        action: The legal WIN action

    Returns:
        bool: Whether to declare
    """
    if not view.is_last_round:
        return True
    state, seat = view.state, view.seat
    tsumo = state.phase == Phase.AWAIT_DISCARD
    hand = state.seats[seat].hand
    if not tsumo:
        hand = hand.with_tile(action.tile)
    result = win_score(state, seat, hand, tsumo)
    if result is None:
        return True
    if tsumo:
        outcome = RoundOutcome(OutcomeKind.TSUMO, winner=seat, points=result.points)
    else:
        outcome = RoundOutcome(OutcomeKind.RON, winner=seat, loser=state.pending.discarder,
                               points=result.points)
    scores_after = settle_round(outcome, state, state.rules).scores_after
    return final_ranks(scores_after)[seat] != 4


def _binary_mask():
    return np.ones(2, dtype=bool)


def _discard_mask(actions):
    mask = np.zeros(NUM_COLUMNS, dtype=bool)
    for action in actions:
        mask[kind_of(action.tile)] = True
    return mask


def call_planes(action, layout=DEFAULT_LAYOUT):
    """Call-candidate planes for a chow, pong or kong action."""
    kind = kind_of(action.tile)
    if action.kind == ActionKind.CHOW:
        meld = [action.chow_start, action.chow_start + 1, action.chow_start + 2]
        consumed = [k for k in meld if k != kind]
        return encode_call_candidate(kind, consumed, meld, layout)
    return encode_call_candidate(kind, [kind], [kind], layout)


class Agent:
    """Base class: ``act`` returns a ``Decision`` for a legal action."""

    name = 'agent'

    def act(self, view, rng):
        raise NotImplementedError

    def begin_round(self, state, seat, rng):
        """Hook called once per round before the first decision."""

    def end_round(self, outcome, seat):
        """Hook called once per round after settlement."""


class FlowAgent(Agent):
    """
    Decision flow shared by network and scripted agents.

    Subclasses implement ``choose`` for one head query.
    """

    record = True
    version = 0

    def __init__(self, layout=DEFAULT_LAYOUT, lookahead_depth=LOOKAHEAD_DEPTH, oracle=False, record=True,
                 oracle_transform=None):
        self.layout = layout
        self.lookahead_depth = lookahead_depth
        self.oracle = oracle
        self.record = record
        # (planes, rng) -> planes, applied to the oracle extension before stacking
        self.oracle_transform = oracle_transform

    def needs_input(self):
        return self.record

    def choose(self, head, policy_input, mask, view, candidate, rng):
        """
        Answer one head query.

        Returns:
            tuple: (index, behaviour probability, confidence of the chosen index)
        """
        raise NotImplementedError

    def _base_input(self, view, rng):
        state, seat = view.state, view.seat
        observation = encode_observation(state, seat, self.layout)
        lookahead = None
        if state.phase == Phase.AWAIT_DISCARD and self.lookahead_depth:
            lookahead = lookahead_for_seat(state, seat, search_depth=self.lookahead_depth,
                                           depth=self.layout.lookahead_depth,
                                           thresholds=self.layout.thresholds)
        oracle = None
        if self.oracle:
            oracle = encode_oracle(state, seat, self.layout)
            if self.oracle_transform is not None:
                oracle = replace(oracle, planes=self.oracle_transform(oracle.planes, rng))
        return observation, lookahead, oracle

    def _query(self, head, mask, view, candidate, rng, base, records, call=None):
        policy_input = None
        if base is not None:
            observation, lookahead, oracle = base
            policy_input = build_input(observation, lookahead, oracle, call, self.layout)
        index, prob, confidence = self.choose(head, policy_input, mask, view, candidate, rng)
        if self.record and policy_input is not None:
            records.append(DecisionRecord(
                head=head,
                planes=policy_input.planes,
                mask=mask,
                action_index=index,
                behavior_prob=prob,
                version=self.version,
                seat=view.seat,
                step=view.state.step,
            ))
        return index, confidence

    def act(self, view, rng):
        state, seat = view.state, view.seat
        legal = legal_actions(state, seat)
        records = []
        wins = [a for a in legal if a.kind == ActionKind.WIN]
        if wins and winning_model(view, wins[0]):
            return Decision(wins[0], records)
        base = self._base_input(view, rng) if self.needs_input() else None
        if state.phase == Phase.AWAIT_DISCARD:
            action = self._own_turn(view, legal, rng, base, records)
        else:
            action = self._respond(view, legal, rng, base, records)
        return Decision(action, records)

    def _own_turn(self, view, legal, rng, base, records):
        best, best_conf = None, -1.0
        for action in (a for a in legal if a.kind in OWN_KONGS):
            call = encode_call_candidate(kind_of(action.tile), [kind_of(action.tile)],
                                         [kind_of(action.tile)], self.layout)
            index, conf = self._query('kong', _binary_mask(), view, action, rng, base, records, call)
            if index == YES and conf > best_conf:
                best, best_conf = action, conf
        if best is not None:
            return best

        riichi = [a for a in legal if a.kind == ActionKind.RIICHI]
        if riichi:
            index, _ = self._query('riichi', _binary_mask(), view, None, rng, base, records)
            if index == YES:
                kind, _ = self._query('discard', _discard_mask(riichi), view, riichi, rng, base, records)
                return next(a for a in riichi if kind_of(a.tile) == kind)

        discards = [a for a in legal if a.kind == ActionKind.DISCARD]
        kind, _ = self._query('discard', _discard_mask(discards), view, discards, rng, base, records)
        return next(a for a in discards if kind_of(a.tile) == kind)

    def _respond(self, view, legal, rng, base, records):
        best, best_conf = None, -1.0
        for action in (a for a in legal if a.kind in CALL_HEADS):
            head = CALL_HEADS[action.kind]
            call = call_planes(action, self.layout)
            index, conf = self._query(head, _binary_mask(), view, action, rng, base, records, call)
            if index == YES and conf > best_conf:
                best, best_conf = action, conf
        if best is not None:
            return best
        return next(a for a in legal if a.kind == ActionKind.PASS)


class PolicyAgent(FlowAgent):
    """Network-driven agent."""

    name = 'policy'

    def __init__(self, net, mode='sample', temperature=1.0, epsilon=0.0, **kwargs):
        super().__init__(layout=net.layout, **kwargs)
        self.net = net
        self.mode = mode
        self.temperature = temperature
        self.epsilon = epsilon

    @property
    def version(self):
        return self.net.version

    def needs_input(self):
        return True

    def confidence(self, head, policy_input, mask):
        """Distribution of ``head`` at one input."""
        dist, _ = forward(self.net, policy_input, head, mask)
        return dist

    def choose(self, head, policy_input, mask, view, candidate, rng):
        dist = self.confidence(head, policy_input, mask)
        index, prob = select_action(dist, self.mode, rng, self.temperature, self.epsilon)
        return index, prob, float(dist.probs[index])


def _yakuhai_kinds(state, seat):
    return set(DRAGON_KINDS) | {state.seat_wind(seat), state.prevalent_wind}


def _river_counts(state, seat):
    counts = [0] * NUM_COLUMNS
    for other in range(4):
        if other == seat:
            continue
        for tile in state.seats[other].river:
            counts[kind_of(tile)] += 1
    return counts


class ScriptedAgent(FlowAgent):
    """
    Deterministic shanten-greedy player.

    Discards the kind that leaves the lowest shanten, breaking ties towards
    kinds already in opponents' rivers, then terminals and honours, then the
    lowest kind. Declares riichi when able, pongs value honours only and
    never chows or kongs.
    """

    name = 'scripted'

    def __init__(self, record=False, **kwargs):
        super().__init__(record=record, **kwargs)

    def choose(self, head, policy_input, mask, view, candidate, rng):
        if head == 'discard':
            return self._discard(view, mask), 1.0, 1.0
        if head == 'riichi':
            return YES, 1.0, 1.0
        if head == 'pong' and kind_of(candidate.tile) in _yakuhai_kinds(view.state, view.seat):
            return YES, 1.0, 1.0
        return NO, 1.0, 1.0

    def _discard(self, view, mask):
        state, seat = view.state, view.seat
        hand = state.seats[seat].hand
        rivers = _river_counts(state, seat)
        best_key, best_kind = None, None
        for kind in np.nonzero(mask)[0].tolist():
            rest = hand.copy()
            rest.concealed.remove(next(t for t in rest.concealed if kind_of(t) == kind))
            key = (shanten(rest), -rivers[kind], 0 if is_terminal_or_honor(kind) else 1, kind)
            if best_key is None or key < best_key:
                best_key, best_kind = key, kind
        return best_kind


class FoldAgent(FlowAgent):
    """Never calls or declares riichi; discards the safest visible kind."""

    name = 'fold'

    def __init__(self, record=False, **kwargs):
        super().__init__(record=record, **kwargs)

    def choose(self, head, policy_input, mask, view, candidate, rng):
        if head != 'discard':
            return NO, 1.0, 1.0
        rivers = _river_counts(view.state, view.seat)
        kinds = np.nonzero(mask)[0].tolist()
        best = min(kinds, key=lambda k: (-rivers[k], 0 if is_terminal_or_honor(k) else 1, k))
        return best, 1.0, 1.0


class RandomAgent(Agent):
    """Uniform over the legal set."""

    name = 'random'

    def act(self, view, rng):
        legal = legal_actions(view.state, view.seat)
        return Decision(legal[int(rng.integers(len(legal)))])
