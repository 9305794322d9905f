"""Tile universe: ids, kinds, suits and the meld/pair pattern catalogue."""

from collections import namedtuple

from mahjong.tile import TilesConverter

NUM_KINDS = 34
NUM_COPIES = 4
NUM_TILES = NUM_KINDS * NUM_COPIES

MAN, PIN, SOU, HONOR = 0, 1, 2, 3
SUIT_NAMES = ('m', 'p', 's', 'z')

EAST, SOUTH, WEST, NORTH = 27, 28, 29, 30
WHITE, GREEN, RED = 31, 32, 33
WIND_KINDS = (EAST, SOUTH, WEST, NORTH)
DRAGON_KINDS = (WHITE, GREEN, RED)

MeldPattern = namedtuple('MeldPattern', ['shape', 'kinds'])


def kind_of(tile):
    """Kind (0..33) of a tile id (0..135)."""
    return tile // NUM_COPIES


def copy_of(tile):
    """Copy index (0..3) of a tile id."""
    return tile % NUM_COPIES


def make_tile(kind, copy=0):
    """Tile id for a (kind, copy) pair."""
    return kind * NUM_COPIES + copy


def suit_of(kind):
    """Suit index of a kind: MAN, PIN, SOU or HONOR."""
    return kind // 9 if kind < 27 else HONOR


def number_of(kind):
    """Face value 1..9 of a suited kind, or ``None`` for honours."""
    return kind % 9 + 1 if kind < 27 else None


def is_honor(kind):
    return kind >= 27


def is_terminal(kind):
    return kind < 27 and kind % 9 in (0, 8)


def is_terminal_or_honor(kind):
    return is_honor(kind) or is_terminal(kind)


def is_simple(kind):
    return not is_terminal_or_honor(kind)


def dora_from_indicator(indicator_kind):
    """
    Kind made dora by an indicator kind.

    Suits cycle 9 -> 1, winds E -> S -> W -> N -> E and dragons
    white -> green -> red -> white.

    Args:
        indicator_kind: Kind of the revealed indicator tile

    Returns:
        int: Dora kind
    """
    if indicator_kind < 27:
        base = indicator_kind - indicator_kind % 9
        return base + (indicator_kind % 9 + 1) % 9
    if indicator_kind in WIND_KINDS:
        return EAST + (indicator_kind - EAST + 1) % 4
    return WHITE + (indicator_kind - WHITE + 1) % 3


def wind_kind_for_seat(seat, dealer):
    """Seat wind kind of ``seat`` given the current dealer."""
    return EAST + (seat - dealer) % 4


def counts_34(tiles):
    """Kind histogram (length 34) of an iterable of tile ids."""
    counts = [0] * NUM_KINDS
    for tile in tiles:
        counts[tile // NUM_COPIES] += 1
    return counts


def tiles_to_string(tiles):
    """Compact notation such as ``123m456p11z`` for tile ids."""
    return TilesConverter.to_one_line_string(sorted(tiles))


def string_to_tiles(notation):
    """
    Parse compact notation into tile ids.

    Honours use ``z`` (1z..4z winds E S W N, 5z..7z dragons white green red).

    Args:
        notation: String such as ``'123m456p789s11z'``

    Returns:
        list: Sorted tile ids (lowest copies of each kind)
    """
    return sorted(TilesConverter.one_line_string_to_136_array(notation))


def kind_to_string(kind):
    """Notation of a single kind, e.g. ``'5p'``."""
    if kind >= 27:
        return f"{kind - 26}z"
    return f"{kind % 9 + 1}{SUIT_NAMES[kind // 9]}"


def enumerate_meld_patterns():
    """
    All distinct meld kind-patterns.

    Returns:
        list: 21 chows, 34 pongs, 34 kongs (89 ``MeldPattern`` entries)
    """
    patterns = []
    for suit in (MAN, PIN, SOU):
        for start in range(7):
            kind = suit * 9 + start
            patterns.append(MeldPattern('chow', (kind, kind + 1, kind + 2)))
    for kind in range(NUM_KINDS):
        patterns.append(MeldPattern('pong', (kind,) * 3))
    for kind in range(NUM_KINDS):
        patterns.append(MeldPattern('kong', (kind,) * 4))
    return patterns


def enumerate_pair_patterns():
    """All 34 pair kind-patterns."""
    return [(kind, kind) for kind in range(NUM_KINDS)]


def can_start_run(kind):
    """Whether ``kind, kind+1, kind+2`` is a valid run."""
    return kind < 27 and kind % 9 <= 6
