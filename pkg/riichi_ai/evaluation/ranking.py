"""
Ranking points and rank progression on the Tenhou level table.

The table lives in ``data/tenhou_ranking.csv``: one row per level with the
base points a player starts the level with, the points needed to level up,
whether the level can be lost, the 4th-place penalty and the 1st/2nd-place
gains of every room. 3rd place is always worth 0.
"""

import csv
import logging
import os
from dataclasses import dataclass
from functools import lru_cache

from ..utils.exceptions import RankingTableError

logger = logging.getLogger(__name__)

TABLE_PATH = os.path.join(os.path.dirname(__file__), 'data', 'tenhou_ranking.csv')
ROOMS = ('normal', 'advanced', 'expert', 'phoenix')
PHOENIX = 'phoenix'


@dataclass(frozen=True)
class LevelRow:
    level: str
    base_points: int
    level_up: int
    demotes: bool
    fourth: int
    first: dict
    second: dict


def normalize_level(level):
    """``'7 Dan'``, ``'7dan'`` and ``'7-dan'`` all name the same level."""
    name = str(level).strip().lower().replace(' ', '').replace('-', '').replace('_', '')
    return name.replace('kyuu', 'kyu')


@lru_cache(maxsize=None)
def load_table(path=TABLE_PATH):
    """
    Read the level table.

    Returns:
        tuple: ``LevelRow`` objects from rookie upwards
    """
    rows = []
    try:
        with open(path, newline='') as f:
            for record in csv.DictReader(f):
                rows.append(LevelRow(
                    level=normalize_level(record['level']),
                    base_points=int(record['base_points']),
                    level_up=int(record['level_up']),
                    demotes=record['demotes'].strip().lower() == 'yes',
                    fourth=int(record['fourth']),
                    first={room: int(record[f'first_{room}']) for room in ROOMS},
                    second={room: int(record[f'second_{room}']) for room in ROOMS},
                ))
    except (OSError, KeyError, ValueError) as e:
        raise RankingTableError(f"Cannot read ranking table {path}: {e}")
    if not rows:
        raise RankingTableError(f"Ranking table {path} is empty")
    return tuple(rows)


def level_index(level, table=None):
    table = table or load_table()
    name = normalize_level(level)
    for i, row in enumerate(table):
        if row.level == name:
            return i
    raise RankingTableError(f"Unknown level '{level}'")


def _check_room(room):
    room = str(room).strip().lower()
    if room not in ROOMS:
        raise RankingTableError(f"Unknown room '{room}' (expected one of {', '.join(ROOMS)})")
    return room


def ranking_points(level, room, rank):
    """
    Ranking points earned by finishing a game at ``rank``.

    Args:
        level: Level name (``'rookie'``, ``'9kyu'`` .. ``'1kyu'``, ``'1dan'`` .. ``'10dan'``)
        room: One of ``ROOMS``
        rank: Final rank 1..4

    Returns:
        int: Signed points

    Raises:
        RankingTableError: For an unknown level or room
        ValueError: For a rank outside 1..4
    """
    row = load_table()[level_index(level)]
    room = _check_room(room)
    if rank == 1:
        return row.first[room]
    if rank == 2:
        return row.second[room]
    if rank == 3:
        return 0
    if rank == 4:
        return row.fourth
    raise ValueError(f"Invalid final rank {rank}")


def reward_vector(level, room):
    """Points for ranks 1..4; usable as ``RuleConfig.game_reward``."""
    return tuple(ranking_points(level, room, rank) for rank in (1, 2, 3, 4))


@dataclass
class RankProgression:
    """Per-game (level, points) after each game and the highest level reached."""

    trajectory: list
    record_rank: str

    @property
    def final_level(self):
        return self.trajectory[-1][0] if self.trajectory else None

    def to_dict(self):
        return {'trajectory': [list(t) for t in self.trajectory], 'record_rank': self.record_rank}


def simulate_rank_progression(ranks, start_level='rookie', room='expert', start_points=None):
    """
    Replay a sequence of final ranks through the level table.

    Reaching the level-up requirement promotes one level and resets to the new
    level's base points. Dropping to zero or below on a level that can be lost
    demotes one level and resets to that level's base points; other levels
    floor at zero. A 10-dan player reaching its requirement takes the
    Phoenix title, after which the record stops changing.

    Args:
        ranks: Iterable of final ranks 1..4
        start_level: Starting level
        room: Room the games are played in
        start_points: Starting points (default: the level's base points)

    Returns:
        RankProgression
    """
    table = load_table()
    room = _check_room(room)
    index = level_index(start_level, table)
    points = table[index].base_points if start_points is None else int(start_points)
    best = index
    phoenix = False
    trajectory = []

    for rank in ranks:
        if phoenix:
            trajectory.append((PHOENIX, points))
            continue
        row = table[index]
        points += ranking_points(row.level, room, rank)
        if points >= row.level_up:
            if index == len(table) - 1:
                phoenix = True
                trajectory.append((PHOENIX, points))
                logger.info(f"Phoenix title reached after {len(trajectory)} games")
                continue
            index += 1
            points = table[index].base_points
        elif points <= 0:
            if row.demotes:
                index -= 1
                points = table[index].base_points
            else:
                points = 0
        best = max(best, index)
        trajectory.append((table[index].level, points))

    record_rank = PHOENIX if phoenix else table[best].level
    return RankProgression(trajectory, record_rank)
