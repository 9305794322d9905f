"""Unit tests for feature planes, look-ahead and reward inputs."""

import unittest
import tempfile
import os
import sys
from dataclasses import replace

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from riichi_ai.core.hand import Hand, is_complete_counts
from riichi_ai.core.round import RoundOutcome, OutcomeKind, draw_tile, deal_round
from riichi_ai.core.scoring import settle_round
from riichi_ai.core.tiles import string_to_tiles, kind_of, can_start_run
from config import Config
from riichi_ai.features.layout import FeatureLayout, DEFAULT_LAYOUT, LOOKAHEAD_DEPTH, dump_planes, load_planes
from riichi_ai.features.lookahead import compute_lookahead, lookahead_for_seat
from riichi_ai.features.observation import (
    encode_observation, encode_oracle, encode_call_candidate, zone_counts,
)
from riichi_ai.features.round_summary import RoundSummaryVector, encode_reward_input
from riichi_ai.models.agent import ScriptedAgent
from riichi_ai.selfplay.worker import WorkerConfig
from riichi_ai.utils.exceptions import LayoutMismatchError, TileCountError
from tests.layouts import build_round, play_random_round

SLOW = os.environ.get('RIICHI_AI_SLOW_TESTS') == '1'


def near_complete_counts(rng):
    """A complete 14-tile histogram with one tile swapped out."""
    while True:
        counts = [0] * 34
        counts[int(rng.integers(34))] += 2
        for _ in range(4):
            if rng.random() < 0.6:
                start = int(rng.integers(27))
                while not can_start_run(start):
                    start = int(rng.integers(27))
                for k in (start, start + 1, start + 2):
                    counts[k] += 1
            else:
                counts[int(rng.integers(34))] += 3
        if max(counts) > 4:
            continue
        out = int(rng.choice([k for k in range(34) if counts[k]]))
        into = int(rng.integers(34))
        if into != out and counts[into] < 4:
            counts[out] -= 1
            counts[into] += 1
        return counts


def counts_to_hand(counts):
    tiles = []
    for kind, n in enumerate(counts):
        tiles.extend(kind * 4 + c for c in range(n))
    return Hand(tiles, [])


def brute_force_one_swap(counts):
    """Discard kinds after which one replacement completes the hand."""
    reachable = set()
    for d in range(34):
        if not counts[d]:
            continue
        for r in range(34):
            if r == d or counts[r] >= 4:
                continue
            cand = list(counts)
            cand[d] -= 1
            cand[r] += 1
            if is_complete_counts(cand, 4):
                reachable.add(d)
    return reachable


def row_block(obs, name, layout=DEFAULT_LAYOUT):
    start, end = layout.normal[name]
    return obs.planes[start:end]


class TestLayout(unittest.TestCase):
    """Test cases for the channel layout."""

    def test_ranges_are_contiguous(self):
        """Test the descriptor tiles the whole input without gaps."""
        ranges = sorted(DEFAULT_LAYOUT.descriptor().values())
        self.assertEqual(ranges[0][0], 0)
        for (_, end), (start, _) in zip(ranges, ranges[1:]):
            self.assertEqual(end, start)
        self.assertEqual(ranges[-1][1], DEFAULT_LAYOUT.total_channels)

    def test_default_channel_budget(self):
        """Test the default group sizes."""
        self.assertEqual(DEFAULT_LAYOUT.n_normal, 118)
        self.assertEqual(DEFAULT_LAYOUT.n_lookahead, 30)
        self.assertEqual(DEFAULT_LAYOUT.n_oracle, 20)
        self.assertEqual(DEFAULT_LAYOUT.n_call, 3)
        self.assertEqual(DEFAULT_LAYOUT.total_channels, 171)

    def test_version_tracks_layout(self):
        """Test a different grid changes layout_version."""
        self.assertEqual(FeatureLayout().layout_version, DEFAULT_LAYOUT.layout_version)
        self.assertNotEqual(FeatureLayout(lookahead_depth=4).layout_version, DEFAULT_LAYOUT.layout_version)
        self.assertNotEqual(FeatureLayout(thresholds=(1000, 8000)).layout_version,
                            DEFAULT_LAYOUT.layout_version)

    def test_plane_dump(self):
        """Test plane fixtures keep their layout header."""
        obs = encode_observation(deal_round(3), 0)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'obs.planes')
            dump_planes(path, obs.planes, obs.layout_version)
            version, planes = load_planes(path, expected_version=obs.layout_version)
            self.assertEqual(version, obs.layout_version)
            np.testing.assert_array_equal(planes, obs.planes)
            with self.assertRaises(LayoutMismatchError):
                load_planes(path, expected_version='c0-other')

    def test_save_descriptor(self):
        """Test the descriptor JSON is written."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'layout.json')
            DEFAULT_LAYOUT.save_descriptor(path)
            self.assertTrue(os.path.getsize(path) > 0)


class TestObservation(unittest.TestCase):
    """Test cases for encode_observation."""

    def test_cumulative_counts(self):
        """Test three copies set channels 1-3 and leave channel 4 clear."""
        state = build_round({0: '666m123p456s789s1z'})
        hand = row_block(encode_observation(state, 0), 'hand')
        six = kind_of(string_to_tiles('6m')[0])
        self.assertEqual(list(hand[:, six]), [1, 1, 1, 0])

    def test_empty_rivers(self):
        """Test river and recency channels are zero before any discard."""
        obs = encode_observation(deal_round(5), 2)
        for name in ('self', 'next', 'across', 'prev'):
            self.assertEqual(row_block(obs, f"river_{name}").sum(), 0)
            self.assertEqual(row_block(obs, f"recent_{name}").sum(), 0)

    def test_hidden_tiles_do_not_leak(self):
        """Test swapping an opponent tile with a wall tile leaves seat 0 unchanged."""
        state = deal_round(9)
        other = state.clone()
        hand = other.seats[2].hand.concealed
        wall_tile = next(t for t in other.live_wall if kind_of(t) != kind_of(hand[0]))
        index = other.live_wall.index(wall_tile)
        other.live_wall[index], hand[0] = hand[0], wall_tile
        np.testing.assert_array_equal(encode_observation(state, 0).planes,
                                      encode_observation(other, 0).planes)
        self.assertFalse(np.array_equal(encode_oracle(state, 0).planes, encode_oracle(other, 0).planes))

    def test_planes_are_binary_and_categorical(self):
        """Test values are 0/1 and categorical rows are uniform."""
        rng = np.random.default_rng(1)
        states = []
        play_random_round(deal_round(4), rng, on_state=states.append)
        categorical = ('riichi', 'round', 'dealer', 'honba', 'pot', 'live_wall', 'seat_wind',
                       'prevalent_wind', 'score_self', 'score_next', 'score_across', 'score_prev')
        for state in states[::7]:
            obs = encode_observation(state, 1)
            self.assertTrue(set(np.unique(obs.planes)) <= {0, 1})
            for name in categorical:
                block = row_block(obs, name)
                for row in block:
                    self.assertIn(row.sum(), (0, 34))

    def test_drawn_tile_channel(self):
        """Test only the seat to act sees its drawn tile marked."""
        state = draw_tile(deal_round(6))
        start, _ = DEFAULT_LAYOUT.normal['drawn_tile']
        mine = encode_observation(state, state.turn).planes[start]
        theirs = encode_observation(state, (state.turn + 1) % 4).planes[start]
        self.assertEqual(mine[kind_of(state.drawn_tile)], 1)
        self.assertEqual(mine.sum(), 1)
        self.assertEqual(theirs.sum(), 0)


class TestOracle(unittest.TestCase):
    """Test cases for encode_oracle."""

    def test_conservation(self):
        """Test visible plus hidden zones account for every tile."""
        rng = np.random.default_rng(2)
        states = []
        play_random_round(deal_round(8), rng, on_state=states.append)
        for state in states[::5]:
            for seat in range(4):
                totals = zone_counts(encode_observation(state, seat), encode_oracle(state, seat))
                self.assertEqual(list(totals), [4] * 34)

    def test_draw_moves_tile(self):
        """Test a draw moves one tile from the live wall to the drawer's hand."""
        state = deal_round(10)
        after = draw_tile(state)
        kind = kind_of(after.drawn_tile)
        before_planes = encode_oracle(state, 3).planes
        after_planes = encode_oracle(after, 3).planes
        live = slice(*DEFAULT_LAYOUT.oracle['wall_live'])
        hidden = slice(*DEFAULT_LAYOUT.oracle['hidden_next'])  # seat 0 seen from seat 3
        self.assertEqual(before_planes[live, kind].sum() - after_planes[live, kind].sum(), 1)
        self.assertEqual(after_planes[hidden, kind].sum() - before_planes[hidden, kind].sum(), 1)

    def test_cross_seat_consistency(self):
        """Test two seats see the same hidden zones for a common opponent."""
        state = deal_round(12)
        seat0 = encode_oracle(state, 0).planes
        seat2 = encode_oracle(state, 2).planes
        o = DEFAULT_LAYOUT.oracle
        # seat 1 is "next" for seat 0 and "prev" for seat 2
        np.testing.assert_array_equal(seat0[slice(*o['hidden_next'])], seat2[slice(*o['hidden_prev'])])
        np.testing.assert_array_equal(seat0[slice(*o['wall_live'])], seat2[slice(*o['wall_live'])])
        np.testing.assert_array_equal(seat0[slice(*o['wall_dead'])], seat2[slice(*o['wall_dead'])])

    def test_call_candidate(self):
        """Test call-candidate planes mark claimed, consumed and meld kinds."""
        planes = encode_call_candidate(4, (3, 5), (3, 4, 5))
        self.assertEqual(planes.shape, (3, 34))
        self.assertEqual(list(np.nonzero(planes[0])[0]), [4])
        self.assertEqual(list(np.nonzero(planes[1])[0]), [3, 5])
        self.assertEqual(planes[2].sum(), 3)
        self.assertEqual(encode_call_candidate().sum(), 0)


class TestLookahead(unittest.TestCase):
    """Test cases for compute_lookahead."""

    def test_one_swap_matches_brute_force(self):
        """Test plane(k=1, lowest threshold) marks discards that leave tenpai."""
        rng = np.random.default_rng(3)
        for _ in range(15 if SLOW else 4):
            counts = near_complete_counts(rng)
            result = compute_lookahead(counts_to_hand(counts), counts, search_depth=1)
            marked = set(np.nonzero(result.plane(1, 1000))[0].tolist())
            self.assertEqual(marked, brute_force_one_swap(counts))

    def test_tenpai_discards(self):
        """Test discarding the floating tile of a tenpai shape is marked."""
        hand = Hand(string_to_tiles('123456789m12p55s7z'), [])
        result = compute_lookahead(hand, hand.concealed_counts(), search_depth=1)
        red = kind_of(string_to_tiles('7z')[0])
        self.assertEqual(result.plane(1, 1000)[red], 1)

    def test_unreachable_threshold(self):
        """Test a threshold above the table maximum gives an empty plane."""
        hand = Hand(string_to_tiles('123456789m12p55s7z'), [])
        result = compute_lookahead(hand, hand.concealed_counts(), thresholds=(1000, 10 ** 6),
                                   search_depth=2)
        self.assertEqual(result.planes[:, 1].sum(), 0)
        self.assertGreater(result.planes[:, 0].sum(), 0)

    def test_monotone(self):
        """Test planes grow with k and shrink with the threshold."""
        rng = np.random.default_rng(4)
        for _ in range(200 if SLOW else 3):
            counts = near_complete_counts(rng)
            result = compute_lookahead(counts_to_hand(counts), counts, search_depth=3)
            planes = result.planes.astype(int)
            self.assertTrue(np.all(np.diff(planes, axis=0) >= 0))
            self.assertTrue(np.all(np.diff(planes, axis=1) <= 0))

    def test_depth_cap_repeats_plane(self):
        """Test planes past the searched depth repeat the deepest one."""
        hand = Hand(string_to_tiles('123456789m12p55s7z'), [])
        result = compute_lookahead(hand, hand.concealed_counts(), search_depth=2)
        self.assertEqual(result.searched_depth, 2)
        for k in range(3, 7):
            np.testing.assert_array_equal(result.planes[k - 1], result.planes[1])

    def test_default_settings_search_every_depth(self):
        """Test the configured runtime depth gives the planes of an uncapped search."""
        self.assertEqual(Config.LOOKAHEAD_SEARCH_DEPTH, LOOKAHEAD_DEPTH)
        self.assertEqual(ScriptedAgent().lookahead_depth, LOOKAHEAD_DEPTH)
        self.assertEqual(WorkerConfig().lookahead_depth, LOOKAHEAD_DEPTH)
        hand = Hand(string_to_tiles('13579m2468p1357s1z'), [])
        counts = hand.concealed_counts()
        full = compute_lookahead(hand, counts)
        runtime = compute_lookahead(hand, counts, search_depth=Config.LOOKAHEAD_SEARCH_DEPTH)
        self.assertEqual(runtime.searched_depth, LOOKAHEAD_DEPTH)
        np.testing.assert_array_equal(runtime.planes, full.planes)
        # a scattered hand needs more than two replacements
        self.assertEqual(full.planes[1].sum(), 0)
        self.assertGreater(full.planes[5].sum(), full.planes[4].sum())

    def test_shallow_search_agrees_with_full_search(self):
        """Test a capped search matches the full search on the planes it covers."""
        rng = np.random.default_rng(5)
        for _ in range(6 if SLOW else 2):
            counts = near_complete_counts(rng)
            hand = counts_to_hand(counts)
            shallow = compute_lookahead(hand, counts, search_depth=2)
            full = compute_lookahead(hand, counts)
            np.testing.assert_array_equal(shallow.planes[:2], full.planes[:2])

    def test_wrong_count(self):
        """Test 13 tiles raise."""
        hand = Hand(string_to_tiles('123456789m12p55s'), [])
        with self.assertRaises(TileCountError):
            compute_lookahead(hand, hand.concealed_counts())

    def test_exhausted_kind_not_drawn(self):
        """Test a wait on a fully visible kind is not reachable."""
        hand = Hand(string_to_tiles('123456789m12p55s7z'), [])
        visible = hand.concealed_counts()
        three_p = kind_of(string_to_tiles('3p')[0])
        visible[three_p] = 4
        result = compute_lookahead(hand, visible, search_depth=1)
        red = kind_of(string_to_tiles('7z')[0])
        self.assertEqual(result.plane(1, 1000)[red], 0)

    def test_for_seat_before_draw(self):
        """Test a seat holding 13 tiles gets empty planes."""
        result = lookahead_for_seat(deal_round(1), 0)
        self.assertEqual(result.planes.sum(), 0)


class TestRewardInput(unittest.TestCase):
    """Test cases for encode_reward_input."""

    def test_empty_history(self):
        """Test zero rounds give an empty sequence."""
        self.assertEqual(encode_reward_input([], 0).shape, (0, 11))

    def test_round_score_scaling(self):
        """Test a +8000 winner has round-score field 80."""
        state = deal_round(2)
        outcome = RoundOutcome(OutcomeKind.RON, winner=1, loser=2, points=8000)
        settlement = settle_round(outcome, state, state.rules)
        deltas = tuple(a - b for a, b in zip(settlement.scores_after, state.scores))
        outcome = replace(outcome, settlement=settlement, round_score_deltas=deltas, final_state=state)
        vectors = encode_reward_input([outcome], 1)
        self.assertEqual(vectors.shape, (1, 11))
        self.assertAlmostEqual(float(vectors[0, 0]), 80.0)
        self.assertAlmostEqual(float(vectors[0, 1]), 330.0)
        self.assertEqual(list(vectors[0, 5:9]), [0, 0, 0, 1])

    def test_accepts_summary_vectors(self):
        """Test prebuilt summaries encode the same as outcomes."""
        summary = RoundSummaryVector.from_fields(0, (1000, -1000, 0, 0), (26000, 24000, 25000, 25000),
                                                 dealer=0, honba=1, riichi_pot=1000)
        vector = encode_reward_input([summary], 0)[0]
        self.assertEqual(list(vector), [10, 260, 240, 250, 250, 1, 0, 0, 0, 1, 10])


if __name__ == '__main__':
    unittest.main()
