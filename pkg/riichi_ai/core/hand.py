"""Hands, melds, winning-shape decomposition and shanten."""

from dataclasses import dataclass, field
from enum import Enum

from mahjong.shanten import Shanten

from .tiles import NUM_KINDS, NUM_COPIES, counts_34, can_start_run, kind_of
from ..utils.exceptions import TileCountError


class MeldKind(Enum):
    CHOW = 'chow'
    PONG = 'pong'
    KONG = 'kong'
    CLOSED_KONG = 'closed_kong'
    ADD_KONG = 'add_kong'


KONG_KINDS = (MeldKind.KONG, MeldKind.CLOSED_KONG, MeldKind.ADD_KONG)


@dataclass(frozen=True)
class Meld:
    """A called or declared group of 3 or 4 tiles."""

    kind: MeldKind
    tiles: tuple
    source_seat: object = None
    concealed: bool = False

    @property
    def base_kind(self):
        """Lowest tile kind in the meld."""
        return min(kind_of(t) for t in self.tiles)

    @property
    def is_kong(self):
        return self.kind in KONG_KINDS

    def kinds(self):
        return [kind_of(t) for t in self.tiles]


@dataclass
class Hand:
    """
    One player's tiles.

    ``concealed`` holds tile ids; each meld counts 3 towards the effective
    tile total whatever its size.
    """

    concealed: list = field(default_factory=list)
    melds: list = field(default_factory=list)
    riichi_declared: bool = False

    def effective_count(self):
        return len(self.concealed) + 3 * len(self.melds)

    def concealed_counts(self):
        return counts_34(self.concealed)

    def is_closed(self):
        return all(meld.concealed for meld in self.melds)

    def all_tiles(self):
        tiles = list(self.concealed)
        for meld in self.melds:
            tiles.extend(meld.tiles)
        return tiles

    def copy(self):
        return Hand(list(self.concealed), list(self.melds), self.riichi_declared)

    def with_tile(self, tile):
        """Copy of this hand holding one extra concealed tile."""
        hand = self.copy()
        hand.concealed.append(tile)
        return hand


@dataclass(frozen=True)
class Group:
    """One of the four groups of a decomposed hand."""

    shape: str  # 'run' or 'triplet'
    kind: int
    concealed: bool = True
    is_kong: bool = False

    def kinds(self):
        if self.shape == 'run':
            return [self.kind, self.kind + 1, self.kind + 2]
        return [self.kind] * (4 if self.is_kong else 3)


@dataclass(frozen=True)
class Decomposition:
    """A winning hand split into four groups and a pair."""

    pair: int
    groups: tuple

    def is_closed(self):
        return all(group.concealed for group in self.groups)

    def tile_kinds(self):
        """Every tile kind of the hand with multiplicity (kongs give 4)."""
        kinds = [self.pair, self.pair]
        for group in self.groups:
            kinds.extend(group.kinds())
        return kinds


def _split_groups(counts, needed):
    """Yield every way to split ``counts`` into exactly ``needed`` groups."""
    first = next((k for k in range(NUM_KINDS) if counts[k]), None)
    if first is None:
        if needed == 0:
            yield ()
        return
    if needed == 0:
        return

    if counts[first] >= 3:
        counts[first] -= 3
        for rest in _split_groups(counts, needed - 1):
            yield (('triplet', first),) + rest
        counts[first] += 3

    if can_start_run(first) and counts[first + 1] and counts[first + 2]:
        for k in (first, first + 1, first + 2):
            counts[k] -= 1
        for rest in _split_groups(counts, needed - 1):
            yield (('run', first),) + rest
        for k in (first, first + 1, first + 2):
            counts[k] += 1


def decompose_counts(counts, needed_groups):
    """
    All (pair, groups) splits of a concealed kind histogram.

    Args:
        counts: Length-34 kind counts of the concealed part
        needed_groups: Number of groups the concealed part must form

    Returns:
        list: ``(pair_kind, ((shape, kind), ...))`` tuples, deduplicated
    """
    counts = list(counts)
    if sum(counts) != 3 * needed_groups + 2:
        return []
    found = set()
    for pair in range(NUM_KINDS):
        if counts[pair] < 2:
            continue
        counts[pair] -= 2
        for groups in _split_groups(counts, needed_groups):
            found.add((pair, tuple(sorted(groups))))
        counts[pair] += 2
    return sorted(found)


def is_complete_counts(counts, needed_groups):
    """Whether a concealed histogram forms ``needed_groups`` groups plus a pair."""
    counts = list(counts)
    if sum(counts) != 3 * needed_groups + 2:
        return False
    for pair in range(NUM_KINDS):
        if counts[pair] < 2:
            continue
        counts[pair] -= 2
        complete = next(_split_groups(counts, needed_groups), None) is not None
        counts[pair] += 2
        if complete:
            return True
    return False


def _meld_group(meld):
    if meld.kind == MeldKind.CHOW:
        return Group('run', meld.base_kind, concealed=False)
    return Group('triplet', meld.base_kind, concealed=meld.concealed, is_kong=meld.is_kong)


def enumerate_decompositions(hand):
    """
    Every standard-form decomposition of a 14-effective-tile hand.

    Args:
        hand: Hand whose concealed tiles plus melds total 14 effective tiles

    Returns:
        list: ``Decomposition`` objects (empty when the hand is not complete)

    Raises:
        TileCountError: If the effective tile count is not 14
    """
    if hand.effective_count() != 14:
        raise TileCountError(
            f"Winning check needs 14 effective tiles, got {hand.effective_count()}"
        )
    meld_groups = tuple(_meld_group(meld) for meld in hand.melds)
    needed = 4 - len(hand.melds)
    results = []
    for pair, groups in decompose_counts(hand.concealed_counts(), needed):
        concealed_groups = tuple(Group(shape, kind) for shape, kind in groups)
        results.append(Decomposition(pair, meld_groups + concealed_groups))
    return results


def detect_win(hand):
    """
    Find a decomposition of a complete hand into four groups and a pair.

    Only the standard shape counts; seven pairs and thirteen orphans do not.

    Args:
        hand: Hand with 14 effective tiles

    Returns:
        Decomposition or None

    Raises:
        TileCountError: If the effective tile count is not 14
    """
    decompositions = enumerate_decompositions(hand)
    return decompositions[0] if decompositions else None


def shanten(hand):
    """
    Number of tile exchanges needed to reach tenpai (-1 means complete).

    Args:
        hand: Hand with 13 or 14 effective tiles

    Returns:
        int: Shanten number >= -1

    Raises:
        TileCountError: For any other effective tile count
    """
    effective = hand.effective_count()
    if effective not in (13, 14):
        raise TileCountError(f"Shanten needs 13 or 14 effective tiles, got {effective}")
    return Shanten().calculate_shanten_for_regular_hand(hand.concealed_counts())


def winning_kinds(hand):
    """
    Kinds that would complete a 13-effective-tile hand.

    Kinds whose four copies are all already in the hand are excluded.

    Args:
        hand: Hand with 13 effective tiles

    Returns:
        list: Sorted winning kinds (empty when not tenpai)
    """
    if hand.effective_count() != 13:
        raise TileCountError(f"Waits need 13 effective tiles, got {hand.effective_count()}")
    counts = hand.concealed_counts()
    held = counts_34(hand.all_tiles())
    needed = 4 - len(hand.melds)
    waits = []
    for kind in range(NUM_KINDS):
        if held[kind] >= NUM_COPIES:
            continue
        counts[kind] += 1
        if is_complete_counts(counts, needed):
            waits.append(kind)
        counts[kind] -= 1
    return waits


def is_tenpai(hand):
    """Whether a 13-effective-tile hand waits on at least one available kind."""
    return bool(winning_kinds(hand))
