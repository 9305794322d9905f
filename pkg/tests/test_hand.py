"""Unit tests for tiles, hand decomposition and shanten."""

import unittest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from riichi_ai.core.hand import (
    Hand, Meld, MeldKind, detect_win, enumerate_decompositions, shanten,
    winning_kinds, is_complete_counts,
)
from riichi_ai.core.tiles import (
    dora_from_indicator, enumerate_meld_patterns, enumerate_pair_patterns,
    string_to_tiles, tiles_to_string, kind_of, counts_34, can_start_run,
)
from riichi_ai.utils.exceptions import TileCountError

SLOW = os.environ.get('RIICHI_AI_SLOW_TESTS') == '1'


def hand_of(notation, melds=()):
    return Hand(string_to_tiles(notation), list(melds))


def random_complete_counts(rng, max_copies=3, suits_only=False):
    """Random 14-tile complete histogram with at most ``max_copies`` per kind."""
    span = 27 if suits_only else 34
    while True:
        counts = [0] * 34
        pair = int(rng.integers(span))
        counts[pair] += 2
        for _ in range(4):
            if rng.random() < 0.5:
                start = int(rng.integers(27))
                while not can_start_run(start):
                    start = int(rng.integers(27))
                for k in (start, start + 1, start + 2):
                    counts[k] += 1
            else:
                counts[int(rng.integers(span))] += 3
        if max(counts) <= max_copies:
            return counts


def counts_to_hand(counts):
    tiles = []
    for kind, n in enumerate(counts):
        tiles.extend(kind * 4 + c for c in range(n))
    return Hand(tiles, [])


def tenpai_by_counts(counts):
    for kind in range(34):
        counts[kind] += 1
        complete = is_complete_counts(counts, 4)
        counts[kind] -= 1
        if complete:
            return True
    return False


def bfs_shanten(counts, max_depth):
    """Minimal single-tile swaps to tenpai, or None beyond ``max_depth``."""
    frontier = {tuple(counts)}
    seen = set(frontier)
    for depth in range(max_depth + 1):
        for node in frontier:
            if tenpai_by_counts(list(node)):
                return depth
        if depth == max_depth:
            return None
        nxt = set()
        for node in frontier:
            for out in range(34):
                if not node[out]:
                    continue
                for into in range(34):
                    if into == out or node[into] >= 4:
                        continue
                    cand = list(node)
                    cand[out] -= 1
                    cand[into] += 1
                    cand = tuple(cand)
                    if cand not in seen:
                        seen.add(cand)
                        nxt.add(cand)
        frontier = nxt
    return None


class TestTiles(unittest.TestCase):
    """Test cases for the tile universe."""

    def test_pattern_catalogue(self):
        """Test 89 meld patterns and 34 pairs are enumerated."""
        patterns = enumerate_meld_patterns()
        self.assertEqual(len(patterns), 89)
        self.assertEqual(len(set(patterns)), 89)
        self.assertEqual(sum(1 for p in patterns if p.shape == 'chow'), 21)
        self.assertEqual(len(enumerate_pair_patterns()), 34)

    def test_dora_successor(self):
        """Test indicator cycles within suits, winds and dragons."""
        self.assertEqual(dora_from_indicator(8), 0)     # 9m -> 1m
        self.assertEqual(dora_from_indicator(12), 13)   # 4p -> 5p
        self.assertEqual(dora_from_indicator(30), 27)   # N -> E
        self.assertEqual(dora_from_indicator(33), 31)   # red -> white

    def test_notation_round_trip(self):
        """Test compact notation maps to distinct tile ids."""
        tiles = string_to_tiles('123m55p7z')
        self.assertEqual([kind_of(t) for t in tiles], [0, 1, 2, 13, 13, 33])
        self.assertEqual(len(set(tiles)), 6)
        self.assertEqual(tiles_to_string(tiles), '123m55p7z')


class TestDetectWin(unittest.TestCase):
    """Test cases for winning-shape detection."""

    def test_open_pong_and_pair(self):
        """Test 1-9m run with a called pong and a pair decomposes."""
        pong = Meld(MeldKind.PONG, tuple(string_to_tiles('111p')), source_seat=2)
        hand = hand_of('123456789m55s', [pong])
        decomposition = detect_win(hand)
        self.assertIsNotNone(decomposition)
        self.assertEqual(decomposition.pair, kind_of(string_to_tiles('5s')[0]))
        self.assertEqual(len(decomposition.groups), 4)
        self.assertFalse(decomposition.is_closed())

    def test_wrong_tile_count(self):
        """Test 13 tiles raise."""
        with self.assertRaises(TileCountError):
            detect_win(hand_of('123456789m1122s'))

    def test_thirteen_orphans_not_a_win(self):
        """Test the standard form is the only winning shape."""
        self.assertIsNone(detect_win(hand_of('119m19p19s1234567z')))

    def test_seven_pairs_not_a_win(self):
        """Test seven pairs is not a standard-form win."""
        self.assertIsNone(detect_win(hand_of('1133557799m1155p')))

    def test_all_decompositions(self):
        """Test ambiguous hands expose every reading."""
        readings = enumerate_decompositions(hand_of('111222333m789p55s'))
        shapes = {tuple(sorted(g.shape for g in d.groups)) for d in readings}
        self.assertIn(('run', 'run', 'run', 'run'), shapes)
        self.assertIn(('run', 'triplet', 'triplet', 'triplet'), shapes)

    def test_detect_win_matches_shanten(self):
        """Test detect_win present iff shanten == -1 on random hands."""
        rng = np.random.default_rng(11)
        samples = 20000 if SLOW else 400
        for _ in range(samples):
            counts = random_complete_counts(rng)
            if rng.random() < 0.5:
                # swap one tile to produce mostly-incomplete hands
                out = int(rng.choice([k for k in range(34) if counts[k]]))
                into = int(rng.integers(34))
                if counts[into] < 3:
                    counts[out] -= 1
                    counts[into] += 1
            hand = counts_to_hand(counts)
            win = detect_win(hand) is not None
            self.assertEqual(win, shanten(hand) == -1, tiles_to_string(hand.concealed))


class TestShanten(unittest.TestCase):
    """Test cases for shanten."""

    def test_complete_hand(self):
        """Test winning 14 tiles give -1."""
        self.assertEqual(shanten(hand_of('123456789m123p55s')), -1)

    def test_tenpai(self):
        """Test 13 tiles one draw from a win give 0."""
        hand = hand_of('123456789m12p55s')
        self.assertEqual(shanten(hand), 0)
        self.assertEqual(winning_kinds(hand), [kind_of(string_to_tiles('3p')[0])])

    def test_wrong_count(self):
        """Test 12 tiles raise."""
        with self.assertRaises(TileCountError):
            shanten(hand_of('123456789m12p5s'))

    def test_open_hand_counts(self):
        """Test melds reduce the concealed requirement."""
        pong = Meld(MeldKind.PONG, tuple(string_to_tiles('777z')), source_seat=1)
        self.assertEqual(shanten(hand_of('123456m12p55s', [pong])), 0)

    def test_bfs_oracle(self):
        """Test shanten agrees with a bounded swap search on near-tenpai hands."""
        rng = np.random.default_rng(5)
        checked = 0
        target = 12 if SLOW else 4
        while checked < target:
            counts = random_complete_counts(rng, max_copies=2, suits_only=True)
            out = int(rng.choice([k for k in range(34) if counts[k]]))
            counts[out] -= 1
            for _ in range(int(rng.integers(0, 3))):
                out = int(rng.choice([k for k in range(34) if counts[k]]))
                into = int(rng.integers(27))
                if counts[into] < 3 and into != out:
                    counts[out] -= 1
                    counts[into] += 1
            value = shanten(counts_to_hand(counts))
            if value > 1:
                continue
            self.assertEqual(bfs_shanten(counts, 1), value)
            checked += 1

    def test_waits_exclude_exhausted_kind(self):
        """Test a wait on a kind whose four copies are held is not a wait."""
        hand = hand_of('1111m234p567s999s')
        self.assertNotIn(0, winning_kinds(hand))
        self.assertEqual(counts_34(hand.concealed)[0], 4)


if __name__ == '__main__':
    unittest.main()
