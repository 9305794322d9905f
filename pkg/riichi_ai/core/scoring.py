"""Yaku evaluation, hand scoring and round settlement."""

import math
from dataclasses import dataclass, field

from .tiles import (
    DRAGON_KINDS, HONOR, dora_from_indicator, is_simple, kind_of, suit_of,
)
from ..utils.exceptions import NoYakuError


@dataclass(frozen=True)
class WinContext:
    """Situation in which a hand is won."""

    tsumo: bool
    is_dealer: bool
    seat_wind: int
    prevalent_wind: int
    riichi: bool = False
    dora_indicators: tuple = ()
    honba: int = 0


@dataclass(frozen=True)
class HandScore:
    """Scoring result for one decomposition."""

    yaku: tuple
    han: int
    dora: int
    points: int

    @property
    def yaku_han(self):
        return sum(han for _, han in self.yaku)


def _suits(decomposition):
    return {suit_of(kind) for kind in decomposition.tile_kinds()}


def evaluate_yaku(decomposition, context, rules):
    """
    Yaku present in a decomposition.

    Args:
        decomposition: Winning ``Decomposition``
        context: ``WinContext``
        rules: ``RuleConfig`` holding han values

    Returns:
        list: ``(yaku_id, han)`` pairs; dora is not included
    """
    values = rules.yaku
    closed = decomposition.is_closed()
    kinds = decomposition.tile_kinds()
    found = []

    if context.riichi:
        found.append(('riichi', values['riichi']))
    if context.tsumo and closed:
        found.append(('menzen_tsumo', values['menzen_tsumo']))

    for group in decomposition.groups:
        if group.shape != 'triplet':
            continue
        if group.kind in DRAGON_KINDS:
            found.append((f"yakuhai_{group.kind}", values['yakuhai']))
        if group.kind == context.seat_wind:
            found.append(('yakuhai_seat_wind', values['yakuhai']))
        if group.kind == context.prevalent_wind:
            found.append(('yakuhai_prevalent_wind', values['yakuhai']))

    if all(is_simple(kind) for kind in kinds):
        found.append(('tanyao', values['tanyao']))

    if all(group.shape == 'triplet' for group in decomposition.groups):
        found.append(('toitoi', values['toitoi']))

    suits = _suits(decomposition)
    number_suits = suits - {HONOR}
    if len(number_suits) == 1:
        if HONOR in suits:
            key = 'honitsu' if closed else 'honitsu_open'
            found.append(('honitsu', values[key]))
        else:
            key = 'chinitsu' if closed else 'chinitsu_open'
            found.append(('chinitsu', values[key]))

    return [(yaku_id, han) for yaku_id, han in found if han > 0]


def count_dora(tile_kinds, dora_indicators):
    """
    Number of dora among ``tile_kinds``.

    Args:
        tile_kinds: Kinds of every tile in the hand (with multiplicity)
        dora_indicators: Revealed indicator tile ids

    Returns:
        int: Dora count (an indicator revealed twice counts twice)
    """
    total = 0
    for indicator in dora_indicators:
        dora = dora_from_indicator(kind_of(indicator))
        total += sum(1 for kind in tile_kinds if kind == dora)
    return total


def round_half_up_100(value):
    return int(math.floor(value / 100.0 + 0.5)) * 100


def ceil_100(value):
    return int(math.ceil(value / 100.0 - 1e-9)) * 100


def points_for_han(han, rules, is_dealer=False):
    """
    Hand value from the han table.

    Args:
        han: Total han (yaku plus dora), >= 1
        rules: ``RuleConfig``
        is_dealer: Apply the dealer multiplier (rounded half-up to 100)

    Returns:
        int: Points
    """
    table = rules.points_table
    points = table[min(han, max(table))]
    if is_dealer:
        points = round_half_up_100(points * rules.dealer_multiplier)
    return points


def score_decomposition(decomposition, context, rules):
    """
    Score one decomposition.

    Raises:
        NoYakuError: If no yaku is present
    """
    yaku = evaluate_yaku(decomposition, context, rules)
    if not yaku:
        raise NoYakuError("Winning shape has no yaku")
    dora = count_dora(decomposition.tile_kinds(), context.dora_indicators)
    han = sum(h for _, h in yaku) + dora
    points = points_for_han(han, rules, context.is_dealer)
    return HandScore(tuple(yaku), han, dora, points)


def score_hand(decompositions, context, rules):
    """
    Best score over the decompositions of a winning hand.

    Args:
        decompositions: One ``Decomposition`` or a list of them
        context: ``WinContext``
        rules: ``RuleConfig``

    Returns:
        HandScore: Highest scoring reading (ties keep the first)

    Raises:
        NoYakuError: If no reading carries a yaku
    """
    if not isinstance(decompositions, (list, tuple)):
        decompositions = [decompositions]
    best = None
    for decomposition in decompositions:
        try:
            result = score_decomposition(decomposition, context, rules)
        except NoYakuError:
            continue
        if best is None or (result.points, result.han) > (best.points, best.han):
            best = result
    if best is None:
        raise NoYakuError("Winning shape has no yaku")
    return best


@dataclass(frozen=True)
class Settlement:
    """Point transfers produced by settling one round."""

    payments: tuple
    pot_after: int
    honba_next: int
    dealer_next: int
    dealer_repeats: bool
    scores_after: tuple = field(default=())


def settle_round(outcome, state, rules):
    """
    Transfers for a finished round.

    Ron: the discarder pays the hand value plus the ron honba bonus.
    Tsumo: a non-dealer winner gets half (rounded up to 100) from the dealer
    and a quarter from each other seat; a dealer winner gets a third from
    each seat; every payer adds the tsumo honba bonus. The winner collects
    the riichi pot. Exhaustive draw: the noten penalty flows from noten to
    tenpai seats and the pot carries over.

    Args:
        outcome: ``RoundOutcome`` (kind, winner, loser, score, tenpai flags)
        state: Finished ``RoundState`` (scores already net of riichi bets)
        rules: ``RuleConfig``

    Returns:
        Settlement: Payments, pot, honba and dealer for the next round
    """
    from .round import OutcomeKind

    payments = [0, 0, 0, 0]
    pot = state.riichi_pot
    dealer = state.dealer
    honba = state.honba

    if outcome.kind == OutcomeKind.RON:
        amount = outcome.points + rules.honba_ron_bonus * honba
        payments[outcome.loser] -= amount
        payments[outcome.winner] += amount + pot
        pot = 0
    elif outcome.kind == OutcomeKind.TSUMO:
        winner = outcome.winner
        for seat in range(4):
            if seat == winner:
                continue
            if winner == dealer:
                share = ceil_100(outcome.points / 3.0)
            elif seat == dealer:
                share = ceil_100(outcome.points / 2.0)
            else:
                share = ceil_100(outcome.points / 4.0)
            share += rules.honba_tsumo_bonus * honba
            payments[seat] -= share
            payments[winner] += share
        payments[winner] += pot
        pot = 0
    else:
        tenpai = [seat for seat in range(4) if outcome.tenpai_flags[seat]]
        noten = [seat for seat in range(4) if not outcome.tenpai_flags[seat]]
        if rules.noten_penalty_enabled and tenpai and noten:
            gain = rules.noten_penalty // len(tenpai)
            loss = rules.noten_penalty // len(noten)
            for seat in tenpai:
                payments[seat] += gain
            for seat in noten:
                payments[seat] -= loss

    if outcome.kind == OutcomeKind.EXHAUSTIVE_DRAW:
        repeats = rules.dealer_repeat_on_tenpai and bool(outcome.tenpai_flags[dealer])
        honba_next = honba + 1
    else:
        repeats = outcome.winner == dealer
        honba_next = honba + 1 if repeats else 0
    dealer_next = dealer if repeats else (dealer + 1) % 4

    scores_after = tuple(seat.score + payments[i] for i, seat in enumerate(state.seats))
    return Settlement(tuple(payments), pot, honba_next, dealer_next, repeats, scores_after)
