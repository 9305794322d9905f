"""
Look-ahead planes: which discards can reach a winning hand of a given value
within a bounded number of tile replacements.

The search ignores opponents. One depth-first pass enumerates decomposition
skeletons (pair plus groups) of target hands whose distance from the current
concealed tiles is at most the depth, scores each under a self-draw
assumption and keeps, per threshold and discard kind, the cheapest cost.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..core.hand import Decomposition, Group, _meld_group
from ..core.rules import RuleConfig
from ..core.scoring import WinContext, count_dora, evaluate_yaku, points_for_han
from ..core.tiles import NUM_COPIES, NUM_KINDS, EAST, can_start_run
from ..utils.exceptions import TileCountError
from .layout import LOOKAHEAD_DEPTH, LOOKAHEAD_THRESHOLDS

logger = logging.getLogger(__name__)

UNREACHABLE = LOOKAHEAD_DEPTH + 1


@dataclass
class LookaheadPlanes:
    """
    ``planes[k-1, i, d] = 1`` iff discarding kind ``d`` reaches a hand worth
    at least ``thresholds[i]`` within ``k`` replacements.
    """

    planes: np.ndarray
    min_cost: np.ndarray
    thresholds: tuple
    searched_depth: int

    def plane(self, k, threshold):
        return self.planes[k - 1, self.thresholds.index(threshold)]

    def flat(self):
        """``(depth * thresholds) x 34`` stacking in layout order."""
        depth, n, cols = self.planes.shape
        return self.planes.reshape(depth * n, cols)


class _Search:
    """Skeleton DFS state for one hand."""

    def __init__(self, counts, caps, open_groups, groups_needed, depth):
        self.counts = counts
        self.caps = caps
        self.open_groups = open_groups
        self.groups_needed = groups_needed
        self.depth = depth
        # concealed tiles held in kinds >= k
        self.held_from = [sum(counts[k:]) for k in range(NUM_KINDS + 1)]
        self.target = [0] * NUM_KINDS
        self.groups = []
        self.pair = None
        self.leaves = 0

    def run(self, on_leaf):
        self.on_leaf = on_leaf
        self._visit(0, self.groups_needed, 0, 0, 0, 0)

    def _visit(self, kind, groups_left, carry_far, carry_near, drawn, discarded):
        if drawn > self.depth or discarded > self.depth:
            return
        # tiles still to place from kind onwards; the gap to the held tiles must be drawn or discarded
        need = 3 * groups_left + (2 if self.pair is None else 0) + 2 * carry_near + carry_far
        held = self.held_from[kind]
        if drawn + max(0, need - held) > self.depth or discarded + max(0, held - need) > self.depth:
            return
        if kind == NUM_KINDS:
            if groups_left == 0 and self.pair is not None and carry_far == 0 and carry_near == 0:
                self.leaves += 1
                self.on_leaf(self.target, drawn, self._decomposition())
            return
        max_runs = groups_left if can_start_run(kind) else 0
        for runs in range(max_runs + 1):
            for triplet in (0, 1):
                if runs + triplet > groups_left:
                    break
                for pair in ((0, 1) if self.pair is None else (0,)):
                    total = carry_far + carry_near + runs + 3 * triplet + 2 * pair
                    if total > self.caps[kind]:
                        continue
                    held = self.counts[kind]
                    self.target[kind] = total
                    for _ in range(runs):
                        self.groups.append(Group('run', kind))
                    if triplet:
                        self.groups.append(Group('triplet', kind))
                    if pair:
                        self.pair = kind
                    self._visit(kind + 1, groups_left - runs - triplet, carry_near, runs,
                                drawn + max(0, total - held), discarded + max(0, held - total))
                    if pair:
                        self.pair = None
                    for _ in range(runs + triplet):
                        self.groups.pop()
                    self.target[kind] = 0

    def _decomposition(self):
        return Decomposition(pair=self.pair, groups=tuple(self.open_groups) + tuple(self.groups))


def compute_lookahead(hand, visible_counts, seat_wind=EAST, prevalent_wind=EAST,
                      dora_indicators=(), is_dealer=False, rules=None,
                      depth=LOOKAHEAD_DEPTH, thresholds=LOOKAHEAD_THRESHOLDS,
                      search_depth=None):
    """
    Look-ahead planes for a post-draw hand.

    Args:
        hand: ``Hand`` with 14 effective tiles
        visible_counts: Length-34 counts of every tile the seat can see
            (own hand, all melds, rivers, dora indicators)
        seat_wind, prevalent_wind: Wind kinds for honour yaku
        dora_indicators: Revealed indicator tile ids
        is_dealer: Score with the dealer multiplier
        rules: ``RuleConfig``
        depth: Number of ``k`` planes (k = 1..depth)
        thresholds: Score thresholds
        search_depth: Cap on the DFS depth; planes with ``k`` above it repeat
            the deepest searched plane

    Returns:
        LookaheadPlanes

    Raises:
        TileCountError: If the hand does not hold 14 effective tiles
    """
    if hand.effective_count() != 14:
        raise TileCountError(f"Look-ahead needs 14 effective tiles, got {hand.effective_count()}")
    rules = rules or RuleConfig()
    searched = depth if search_depth is None else max(1, min(search_depth, depth))
    counts = hand.concealed_counts()
    visible = list(visible_counts)
    # a kind can be drawn while fewer than four copies are visible
    caps = [min(NUM_COPIES, counts[k] + max(0, NUM_COPIES - visible[k])) for k in range(NUM_KINDS)]
    open_groups = [_meld_group(meld) for meld in hand.melds]
    context = WinContext(tsumo=True, is_dealer=is_dealer, seat_wind=seat_wind,
                         prevalent_wind=prevalent_wind, riichi=hand.riichi_declared,
                         dora_indicators=tuple(dora_indicators))

    n = len(thresholds)
    min_cost = np.full((n, NUM_KINDS), UNREACHABLE, dtype=np.int64)

    def on_leaf(target, cost, decomposition):
        if cost == 0:
            return
        discards = [k for k in range(NUM_KINDS) if counts[k] > target[k]]
        # min_cost grows with the threshold, so the last row bounds every row
        if all(min_cost[-1, kind] <= cost for kind in discards):
            return
        yaku = evaluate_yaku(decomposition, context, rules)
        if not yaku:
            return
        han = sum(h for _, h in yaku) + count_dora(decomposition.tile_kinds(), context.dora_indicators)
        points = points_for_han(han, rules, is_dealer)
        for i, threshold in enumerate(thresholds):
            if points < threshold:
                break
            for kind in discards:
                if cost < min_cost[i, kind]:
                    min_cost[i, kind] = cost

    search = _Search(counts, caps, open_groups, 4 - len(hand.melds), searched)
    search.run(on_leaf)
    logger.debug(f"Look-ahead visited {search.leaves} skeletons at depth {searched}")

    ks = np.minimum(np.arange(1, depth + 1), searched)
    planes = (min_cost[None, :, :] <= ks[:, None, None]).astype(np.uint8)
    return LookaheadPlanes(planes, min_cost, tuple(thresholds), searched)


def lookahead_for_seat(state, seat, search_depth=None, depth=LOOKAHEAD_DEPTH,
                       thresholds=LOOKAHEAD_THRESHOLDS):
    """
    Look-ahead planes for ``seat`` at its post-draw decision point.

    Returns all-zero planes when the seat does not hold 14 effective tiles.
    """
    hand = state.seats[seat].hand
    if hand.effective_count() != 14:
        return LookaheadPlanes(
            np.zeros((depth, len(thresholds), NUM_KINDS), dtype=np.uint8),
            np.full((len(thresholds), NUM_KINDS), UNREACHABLE, dtype=np.int64),
            tuple(thresholds), 0,
        )
    return compute_lookahead(
        hand, visible_counts_for(state, seat),
        seat_wind=state.seat_wind(seat), prevalent_wind=state.prevalent_wind,
        dora_indicators=state.dora_indicators, is_dealer=seat == state.dealer,
        rules=state.rules, depth=depth, thresholds=thresholds, search_depth=search_depth,
    )


def visible_counts_for(state, seat):
    """Counts of every tile ``seat`` can see."""
    tiles = list(state.seats[seat].hand.concealed)
    for other in state.seats:
        tiles.extend(other.river)
        for meld in other.hand.melds:
            tiles.extend(meld.tiles)
    tiles.extend(state.dora_indicators)
    counts = [0] * NUM_KINDS
    for tile in tiles:
        counts[tile // NUM_COPIES] += 1
    return counts
