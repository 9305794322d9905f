"""Unit tests for world sampling and run-time policy adaptation."""

import unittest
import os
import sys
from collections import Counter

import numpy as np
import torch

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from riichi_ai.adaptation import (
    AdaptationConfig, AdaptationSession, PolicyAdapter, Rollout, VisibleInfo, adapt, adaptation_objective,
    evaluate_adaptation, rollout, sample_worlds,
)
from riichi_ai.adaptation.pmcpa import trajectory_log_ratios
from riichi_ai.core.round import deal_round
from riichi_ai.core.tiles import kind_of
from riichi_ai.features.layout import DEFAULT_LAYOUT
from riichi_ai.models.agent import DecisionRecord, FoldAgent
from riichi_ai.models.distribution import PolicyInput, forward
from riichi_ai.models.network import PolicyNetwork
from riichi_ai.selfplay.game_runner import GameRunner
from riichi_ai.utils.exceptions import PoolInconsistencyError

SLOW = os.environ.get('RIICHI_AI_SLOW_TESTS') == '1'


def tiny_net(seed=0, blocks=1, dtype=torch.float64):
    torch.manual_seed(seed)
    return PolicyNetwork(DEFAULT_LAYOUT, blocks=blocks, filters=4).to(dtype)


def small_config(**overrides):
    values = dict(worlds=4, steps=3, learning_rate=0.05, lookahead_depth=1, seed=3)
    values.update(overrides)
    return AdaptationConfig(**values)


def parameters_of(net):
    return {name: tensor.clone() for name, tensor in net.state_dict().items()}


class TestWorldSampling(unittest.TestCase):
    """Test cases for sample_worlds."""

    def setUp(self):
        """Set up test fixtures."""
        self.state = deal_round(17, dealer=1)
        self.info = VisibleInfo.from_state(self.state, 2)

    def test_conservation(self):
        """Test each world keeps the known tiles and deals the whole unseen pool."""
        pool = self.info.unseen_pool()
        self.assertEqual(len(pool), 136 - 13 - 1)
        for world in sample_worlds(self.info, 20, seed=0):
            state = world.to_state(self.info)
            self.assertEqual(tuple(world.hands[2]), self.info.hand)
            self.assertEqual(state.dora_indicators, list(self.info.indicators))
            self.assertEqual(len(world.opponent_tiles(2)), 39)
            hidden = world.opponent_tiles(2) + list(world.live_wall) + list(world.dead_wall[1:])
            self.assertEqual(sorted(hidden), pool)
            self.assertEqual(state.dealer, 1)

    def test_seeded(self):
        """Test equal seeds give equal worlds."""
        a = sample_worlds(self.info, 5, seed=9)
        b = sample_worlds(self.info, 5, seed=9)
        c = sample_worlds(self.info, 5, seed=10)
        self.assertEqual(a, b)
        self.assertNotEqual(a, c)
        self.assertEqual(sample_worlds(self.info, 3, seed=9), a[:3])

    def test_state_pair(self):
        """Test a (state, seat) pair is accepted."""
        self.assertEqual(sample_worlds((self.state, 2), 2, seed=1), sample_worlds(self.info, 2, seed=1))

    def test_uniform_kinds(self):
        """Test opponent hands follow the kind proportions of the unseen pool."""
        n = 100000 if SLOW else 2000
        tolerance = 0.002 if SLOW else 0.005
        pool_counts = Counter(kind_of(t) for t in self.info.unseen_pool())
        pool_size = sum(pool_counts.values())
        seen = Counter()
        for world in sample_worlds(self.info, n, seed=4):
            seen.update(kind_of(t) for t in world.opponent_tiles(2))
        total = 39 * n
        for kind in range(34):
            self.assertLess(abs(seen[kind] / total - pool_counts[kind] / pool_size), tolerance)

    def test_inconsistent_pool(self):
        """Test malformed visible information is rejected."""
        short = VisibleInfo(seat=0, hand=self.info.hand[:12], indicators=self.info.indicators)
        with self.assertRaises(PoolInconsistencyError):
            sample_worlds(short, 1)
        clash = VisibleInfo(seat=0, hand=self.info.hand, indicators=(self.info.hand[0],))
        with self.assertRaises(PoolInconsistencyError):
            sample_worlds(clash, 1)


class TestRollout(unittest.TestCase):
    """Test cases for rollouts."""

    @classmethod
    def setUpClass(cls):
        cls.net = tiny_net()
        cls.info = VisibleInfo.from_state(deal_round(5, dealer=0), 0)
        cls.world = sample_worlds(cls.info, 1, seed=2)[0]

    def test_deterministic(self):
        """Test a frozen policy on a fixed world repeats its trajectory."""
        a = rollout(self.net, self.world, self.info, small_config())
        b = rollout(self.net, self.world, self.info, small_config())
        self.assertEqual(a.ret, b.ret)
        self.assertEqual([s.action_index for s in a.steps], [s.action_index for s in b.steps])
        self.assertGreater(len(a.steps), 0)
        self.assertTrue(all(s.seat == 0 for s in a.steps))

    def test_return_bounds(self):
        """Test returns stay within the point total and rank bonus."""
        result = rollout(self.net, self.world, self.info, small_config(reward='game'))
        self.assertLessEqual(abs(result.ret), 100000 * 0.01 + 135)
        bonus = result.ret - result.round_score * 0.01
        self.assertLess(min(abs(bonus - b) for b in (50, 20, 0, -135)), 1e-9)

    def test_unknown_return(self):
        with self.assertRaises(ValueError):
            AdaptationConfig(reward='rank')


class TestObjective(unittest.TestCase):
    """Test cases for the adaptation objective."""

    @classmethod
    def setUpClass(cls):
        cls.net = tiny_net(1)
        info = VisibleInfo.from_state(deal_round(8, dealer=3), 1)
        cls.session = AdaptationSession.collect(cls.net, info, small_config(worlds=6))

    def test_ratio_identity(self):
        """Test the objective at the collecting parameters is the sum of returns."""
        with torch.no_grad():
            full = float(adaptation_objective(self.net, self.session.rollouts))
            cached = float(self.session.objective(self.net))
        expected = float(np.sum(self.session.returns))
        self.assertLess(abs(full - expected), 1e-9)
        self.assertLess(abs(cached - expected), 1e-9)

    def test_equal_returns_gradient(self):
        """Test equal positive returns give the plain likelihood gradient."""
        net = self.net.clone()
        returns = [2.0] * len(self.session.rollouts)
        params = [net.discard_bias, net.discard_project.weight]
        objective = adaptation_objective(net, self.session.rollouts, returns)
        grad = torch.autograd.grad(objective, params)
        log_likelihood = trajectory_log_ratios(net, self.session.rollouts).sum()
        plain = torch.autograd.grad(log_likelihood, params)
        for a, b in zip(grad, plain):
            torch.testing.assert_close(a, 2.0 * b)

    def test_finite_differences(self):
        """Test the objective gradient matches central differences."""
        rng = np.random.default_rng(0)
        for trial in range(10 if SLOW else 3):
            net = self.net.clone()
            returns = rng.normal(size=len(self.session.rollouts))
            with torch.no_grad():
                net.discard_bias.add_(torch.as_tensor(rng.normal(scale=0.1, size=34)))
            params = [net.discard_bias, net.discard_project.weight, net.binary_heads['riichi'].linear.weight]
            objective = adaptation_objective(net, self.session.rollouts, returns, self.session.features)
            grads = torch.autograd.grad(objective, params, allow_unused=True)
            for param, grad in zip(params, grads):
                grad = torch.zeros_like(param) if grad is None else grad
                flat = param.data.view(-1)
                for i in rng.choice(flat.numel(), size=min(3, flat.numel()), replace=False):
                    old = float(flat[i])
                    eps = 1e-6
                    with torch.no_grad():
                        flat[i] = old + eps
                        up = float(adaptation_objective(net, self.session.rollouts, returns, self.session.features))
                        flat[i] = old - eps
                        down = float(adaptation_objective(net, self.session.rollouts, returns, self.session.features))
                        flat[i] = old
                    numeric = (up - down) / (2 * eps)
                    analytic = float(grad.view(-1)[i])
                    self.assertLessEqual(abs(numeric - analytic), 1e-7 + 1e-4 * abs(numeric))


class TestAdapt(unittest.TestCase):
    """Test cases for adapt and PolicyAdapter."""

    def test_dominant_discard_gains_probability(self):
        """Test adaptation moves probability towards the discard that pays."""
        net = tiny_net(2, blocks=0)
        planes = np.zeros((DEFAULT_LAYOUT.total_channels, 34), dtype=np.uint8)
        mask = np.zeros(34, dtype=bool)
        mask[:14] = True
        policy_input = PolicyInput(planes, DEFAULT_LAYOUT.layout_version)
        before, _ = forward(net, policy_input, 'discard', mask)
        np.testing.assert_allclose(before.probs[:14], 1 / 14)

        rng = np.random.default_rng(1)
        rollouts = []
        for i in range(300):
            action = int(rng.integers(14))
            record = DecisionRecord('discard', planes, mask, action, float(before.probs[action]), 0, 0, 0)
            rollouts.append(Rollout(i, [record], 1.0 if action == 3 else -1.0))
        session = AdaptationSession(net, rollouts, AdaptationConfig(steps=5, learning_rate=0.5))
        adapted = adapt(session)
        after, _ = forward(adapted, policy_input, 'discard', mask)
        self.assertGreater(after.probs[3], before.probs[3])
        self.assertEqual(session.steps_taken, 5)
        self.assertGreater(session.report().root_shift, 0.0)

    def test_offline_untouched(self):
        """Test the offline parameters are bitwise unchanged by a session."""
        net = tiny_net(3)
        snapshot = parameters_of(net)
        info = VisibleInfo.from_state(deal_round(21), 0)
        session = AdaptationSession.collect(net, info, small_config(reward='game'))
        adapted = adapt(session)
        for name, tensor in net.state_dict().items():
            self.assertTrue(torch.equal(tensor, snapshot[name]), name)
        self.assertFalse(torch.equal(adapted.discard_bias, net.discard_bias))
        report = session.report()
        self.assertEqual(report.k, 4)
        self.assertEqual(report.steps + report.skipped, 3)
        self.assertIn('mean_return_after', report.to_dict())

    def test_non_finite_step_skipped(self):
        """Test a non-finite objective skips the step."""
        net = tiny_net(4, blocks=0)
        planes = np.zeros((DEFAULT_LAYOUT.total_channels, 34), dtype=np.uint8)
        mask = np.ones(34, dtype=bool)
        record = DecisionRecord('discard', planes, mask, 0, 1 / 34, 0, 0, 0)
        session = AdaptationSession(net, [Rollout(0, [record], float('inf'))], AdaptationConfig(steps=2))
        adapt(session)
        self.assertEqual(session.skipped, 2)
        self.assertTrue(torch.equal(session.adapted.discard_bias, net.discard_bias))

    def test_round_independence(self):
        """Test every round starts again from the offline parameters."""
        net = tiny_net(5)
        snapshot = parameters_of(net)
        adapter = PolicyAdapter(net, small_config(worlds=2, steps=1))
        runner = GameRunner([adapter, FoldAgent(), FoldAgent(), FoldAgent()])
        rng = np.random.default_rng(0)
        for round_index in range(2):
            runner.play_round(deal_round(round_index + 40), rng, round_index=round_index)
            self.assertIs(adapter.net, net)
        self.assertEqual(len(adapter.reports), 2)
        for name, tensor in net.state_dict().items():
            self.assertTrue(torch.equal(tensor, snapshot[name]), name)

    def test_paired_evaluation(self):
        """Test the paired evaluation accounts for every pair."""
        net = tiny_net(6)
        info = VisibleInfo.from_state(deal_round(33), 0)
        result = evaluate_adaptation(net, info, small_config(worlds=2, steps=1), pairs=4, seed=8)
        self.assertEqual(result.wins + result.ties + result.losses, 4)
        self.assertGreaterEqual(result.win_rate, 0.0)
        self.assertLessEqual(result.win_rate, 1.0)
        self.assertEqual(result.to_dict()['pairs'], 4)


if __name__ == '__main__':
    unittest.main()
