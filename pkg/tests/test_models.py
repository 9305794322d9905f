"""Unit tests for the policy network, decision flow and checkpoints."""

import unittest
import tempfile
import os
import sys

import numpy as np
import torch
from scipy import stats

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from riichi_ai.core.round import (
    ActionKind, Phase, RoundOutcome, apply_action, deal_round, draw_tile,
    legal_actions, pending_seats,
)
from riichi_ai.core.tiles import kind_of
from riichi_ai.features.layout import DEFAULT_LAYOUT, FeatureLayout
from riichi_ai.features.observation import encode_observation, encode_oracle
from riichi_ai.models.agent import (
    DecisionView, FlowAgent, FoldAgent, PolicyAgent, ScriptedAgent, YES, NO,
)
from riichi_ai.models.checkpoint import (
    load_checkpoint, policy_from_blob, policy_to_blob, save_checkpoint,
)
from riichi_ai.models.distribution import (
    ActionDistribution, PolicyInput, build_input, forward, masked_log_softmax, select_action,
)
from riichi_ai.models.network import PolicyNetwork, HEAD_SIZES, zero_parameters
from riichi_ai.models.supervised import SupervisedDataset, supervised_train
from riichi_ai.utils.exceptions import (
    CheckpointError, DatasetError, EmptyLegalSetError, LayoutMismatchError,
)
from tests.layouts import build_round, tsumogiri_until

SLOW = os.environ.get('RIICHI_AI_SLOW_TESTS') == '1'


def tiny_net(seed=0, dtype=torch.float32):
    torch.manual_seed(seed)
    return PolicyNetwork(DEFAULT_LAYOUT, blocks=1, filters=4).to(dtype)


def random_input(rng):
    planes = (rng.random((DEFAULT_LAYOUT.total_channels, 34)) < 0.2).astype(np.uint8)
    return PolicyInput(planes, DEFAULT_LAYOUT.layout_version)


class TestForward(unittest.TestCase):
    """Test cases for the masked forward pass."""

    def test_zero_parameters_uniform(self):
        """Test zero weights give a uniform distribution over the legal set."""
        net = zero_parameters(tiny_net())
        mask = np.zeros(34, dtype=bool)
        mask[[2, 5, 30]] = True
        dist, value = forward(net, random_input(np.random.default_rng(0)), 'discard', mask)
        np.testing.assert_allclose(dist.probs[mask], [1 / 3] * 3, atol=1e-6)
        self.assertEqual(dist.probs[~mask].sum(), 0.0)
        self.assertEqual(value, 0.0)

    def test_single_legal_action(self):
        """Test a one-action mask has probability 1 and entropy 0."""
        mask = np.zeros(34, dtype=bool)
        mask[7] = True
        dist, _ = forward(tiny_net(), random_input(np.random.default_rng(1)), 'discard', mask)
        self.assertAlmostEqual(dist.probs[7], 1.0)
        self.assertAlmostEqual(dist.entropy, 0.0, places=6)

    def test_head_sizes(self):
        """Test every head has its declared width."""
        net = tiny_net()
        x = torch.zeros(2, DEFAULT_LAYOUT.total_channels, 34)
        for head, size in HEAD_SIZES.items():
            logits, value = net(x, head)
            self.assertEqual(tuple(logits.shape), (2, size))
            self.assertEqual(tuple(value.shape), (2,))

    def test_pure(self):
        """Test identical inputs give identical outputs."""
        net = tiny_net(3)
        inp = random_input(np.random.default_rng(3))
        mask = np.ones(2, dtype=bool)
        a, _ = forward(net, inp, 'pong', mask)
        b, _ = forward(net, inp, 'pong', mask)
        np.testing.assert_array_equal(a.probs, b.probs)

    def test_empty_mask(self):
        """Test an empty legal set raises."""
        with self.assertRaises(EmptyLegalSetError):
            forward(tiny_net(), random_input(np.random.default_rng(4)), 'riichi', np.zeros(2, dtype=bool))

    def test_layout_mismatch(self):
        """Test planes from another layout are rejected."""
        inp = PolicyInput(np.zeros((DEFAULT_LAYOUT.total_channels, 34), dtype=np.uint8), 'c0-other')
        with self.assertRaises(LayoutMismatchError):
            forward(tiny_net(), inp, 'discard', np.ones(34, dtype=bool))

    def test_oracle_gate_invariance(self):
        """Test a closed gate makes outputs independent of oracle values."""
        net = tiny_net(5)
        net.set_oracle_enabled(False)
        self.assertFalse(net.oracle_enabled)
        state = deal_round(5)
        obs = encode_observation(state, 0)
        with_oracle = build_input(obs, oracle=encode_oracle(state, 0))
        without = build_input(obs)
        mask = np.ones(34, dtype=bool)
        a, va = forward(net, with_oracle, 'discard', mask)
        b, vb = forward(net, without, 'discard', mask)
        np.testing.assert_array_equal(a.logits, b.logits)
        self.assertEqual(va, vb)

    def test_finite_differences(self):
        """Test autograd matches central differences on small double nets."""
        for seed in range(10 if SLOW else 3):
            rng = np.random.default_rng(seed)
            net = tiny_net(seed, torch.float64)
            x = torch.as_tensor(random_input(rng).planes, dtype=torch.float64).unsqueeze(0)
            mask = torch.ones(1, 34, dtype=torch.bool)
            action = int(rng.integers(34))

            def loss_fn():
                logits, value = net(x, 'discard')
                return -masked_log_softmax(logits, mask)[0, action] + 0.5 * value[0] ** 2

            net.zero_grad()
            loss_fn().backward()
            for param in (net.discard_bias, net.conv_input.weight, net.value_head.linear.weight):
                flat = param.data.view(-1)
                grad = param.grad.view(-1)
                for i in rng.choice(flat.numel(), size=3, replace=False):
                    old = float(flat[i])
                    eps = 1e-6
                    with torch.no_grad():
                        flat[i] = old + eps
                        up = float(loss_fn())
                        flat[i] = old - eps
                        down = float(loss_fn())
                        flat[i] = old
                    numeric = (up - down) / (2 * eps)
                    analytic = float(grad[i])
                    self.assertLessEqual(abs(numeric - analytic), 1e-6 + 1e-4 * abs(analytic))


class TestSelectAction(unittest.TestCase):
    """Test cases for select_action."""

    def make(self, probs):
        probs = np.asarray(probs, dtype=np.float64)
        mask = probs > 0
        return ActionDistribution(probs, np.log(np.where(mask, probs, 1.0)), mask, 0.0)

    def test_greedy(self):
        """Test greedy picks the argmax."""
        self.assertEqual(select_action(self.make([0.2, 0.5, 0.3]))[0], 1)

    def test_greedy_tie(self):
        """Test equal maxima pick the lower index."""
        self.assertEqual(select_action(self.make([0.4, 0.2, 0.4]))[0], 0)

    def test_infinite_temperature_uniform(self):
        """Test sampling at infinite temperature is uniform over the legal set."""
        dist = self.make([0.7, 0.0, 0.2, 0.1])
        rng = np.random.default_rng(0)
        draws = 100000 if SLOW else 20000
        counts = np.zeros(4)
        for _ in range(draws):
            counts[select_action(dist, 'sample', rng, temperature=np.inf)[0]] += 1
        self.assertEqual(counts[1], 0)
        _, p_value = stats.chisquare(counts[[0, 2, 3]])
        self.assertGreater(p_value, 0.001)

    def test_epsilon_probability(self):
        """Test epsilon mode reports the mixture probability."""
        dist = self.make([0.6, 0.4])
        index, prob = select_action(dist, 'epsilon', np.random.default_rng(1), epsilon=0.2)
        expected = 0.1 + (0.8 if index == 0 else 0.0)
        self.assertAlmostEqual(prob, expected)


class FixedConfidenceAgent(FlowAgent):
    """Says yes to every call with a fixed per-head confidence."""

    def __init__(self, confidences):
        super().__init__(record=False)
        self.confidences = confidences

    def choose(self, head, policy_input, mask, view, candidate, rng):
        if head == 'discard':
            kind = int(np.nonzero(mask)[0][0])
            return kind, 1.0, 1.0
        if head in self.confidences:
            return YES, self.confidences[head], self.confidences[head]
        return NO, 1.0, 1.0


class TestDecisionFlow(unittest.TestCase):
    """Test cases for the decision flow."""

    def tenpai_round(self, scores=None):
        state = build_round({0: '123456789m12p55s'}, live_prefix=['3p'], dealer=0, scores=scores)
        return tsumogiri_until(state, 0)

    def test_win_declared(self):
        """Test a completing draw is declared outside the last round."""
        state = self.tenpai_round()
        decision = ScriptedAgent().act(DecisionView(state, 0), np.random.default_rng(0))
        self.assertEqual(decision.action.kind, ActionKind.WIN)

    def test_last_round_lowest_does_not_declare(self):
        """Test a win that still leaves the lowest score is not declared in the last round."""
        state = self.tenpai_round(scores=[1000, 40000, 30000, 29000])
        view = DecisionView(state, 0, is_last_round=True)
        decision = ScriptedAgent().act(view, np.random.default_rng(0))
        self.assertNotEqual(decision.action.kind, ActionKind.WIN)
        self.assertIn(decision.action, legal_actions(state, 0))

    def test_last_round_leader_declares(self):
        """Test the last-round rule only blocks a win that stays in last place."""
        state = self.tenpai_round(scores=[25000, 25000, 25000, 25000])
        view = DecisionView(state, 0, is_last_round=True)
        self.assertEqual(ScriptedAgent().act(view, np.random.default_rng(0)).action.kind, ActionKind.WIN)

    def test_pong_beats_chow(self):
        """Test the most confident positive call is proposed."""
        state = build_round({0: '5m123p789p111s22z3z', 1: '4556m12p456s789s1z'},
                            live_prefix=['9m'], dealer=0)
        state = draw_tile(state)
        five = next(a for a in legal_actions(state, 0)
                    if a.kind == ActionKind.DISCARD and kind_of(a.tile) == 4)
        state = apply_action(state, five)
        self.assertEqual(state.phase, Phase.AWAIT_CALLS)
        kinds = {a.kind for a in legal_actions(state, 1)}
        self.assertTrue({ActionKind.PONG, ActionKind.CHOW} <= kinds)
        agent = FixedConfidenceAgent({'pong': 0.9, 'chow': 0.6})
        self.assertEqual(agent.act(DecisionView(state, 1), np.random.default_rng(0)).action.kind,
                         ActionKind.PONG)
        agent = FixedConfidenceAgent({'pong': 0.5, 'chow': 0.6})
        self.assertEqual(agent.act(DecisionView(state, 1), np.random.default_rng(0)).action.kind,
                         ActionKind.CHOW)

    def test_policy_agent_stays_legal(self):
        """Test a sampling network agent only returns legal actions."""
        net = tiny_net(7)
        agents = [PolicyAgent(net, mode='sample', lookahead_depth=1) for _ in range(4)]
        rng = np.random.default_rng(7)
        decisions = 0
        for seed in range(3 if SLOW else 1):
            state = deal_round(seed)
            while True:
                if state.phase == Phase.AWAIT_DRAW:
                    state = draw_tile(state)
                    continue
                seat = pending_seats(state)[0]
                decision = agents[seat].act(DecisionView(state, seat), rng)
                self.assertIn(decision.action, legal_actions(state, seat))
                for record in decision.records:
                    self.assertTrue(record.mask[record.action_index])
                    self.assertGreater(record.behavior_prob, 0.0)
                decisions += 1
                state = apply_action(state, decision.action)
                if isinstance(state, RoundOutcome):
                    break
        self.assertGreater(decisions, 0)

    def test_scripted_is_deterministic(self):
        """Test the scripted agent repeats its choices."""
        state = tsumogiri_until(deal_round(11), 0)
        a = ScriptedAgent().act(DecisionView(state, 0), np.random.default_rng(0))
        b = ScriptedAgent().act(DecisionView(state, 0), np.random.default_rng(99))
        self.assertEqual(a.action, b.action)

    def test_fold_agent_never_calls(self):
        """Test the fold agent passes on every call."""
        state = build_round({0: '5m123p789p111s22z3z', 1: '4556m12p456s789s1z'},
                            live_prefix=['9m'], dealer=0)
        state = draw_tile(state)
        five = next(a for a in legal_actions(state, 0)
                    if a.kind == ActionKind.DISCARD and kind_of(a.tile) == 4)
        state = apply_action(state, five)
        action = FoldAgent().act(DecisionView(state, 1), np.random.default_rng(0)).action
        self.assertEqual(action.kind, ActionKind.PASS)


class TestCheckpoint(unittest.TestCase):
    """Test cases for checkpoint blobs."""

    def test_round_trip_bytes(self):
        """Test save -> load -> save gives identical bytes."""
        net = tiny_net(2)
        net.version = 4
        blob = policy_to_blob(net, 'abc')
        again = policy_to_blob(policy_from_blob(blob), 'abc')
        self.assertEqual(blob, again)

    def test_layout_mismatch(self):
        """Test loading against another layout raises."""
        blob = policy_to_blob(tiny_net())
        other = FeatureLayout(lookahead_depth=3).layout_version
        with self.assertRaises(LayoutMismatchError):
            policy_from_blob(blob, expected_layout_version=other)

    def test_corrupt_blob(self):
        """Test a flipped byte fails the checksum."""
        blob = bytearray(policy_to_blob(tiny_net()))
        blob[50] ^= 0xFF
        with self.assertRaises(CheckpointError):
            policy_from_blob(bytes(blob))

    def test_rules_hash_guard(self):
        """Test a checkpoint trained under other rules is rejected."""
        blob = policy_to_blob(tiny_net(), 'hash-a')
        with self.assertRaises(CheckpointError):
            policy_from_blob(blob, expected_rules_hash='hash-b')

    def test_files(self):
        """Test files load back and are never overwritten."""
        net = tiny_net(6)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'policy.ckpt')
            save_checkpoint(net, path)
            loaded = load_checkpoint(path)
            for a, b in zip(net.state_dict().values(), loaded.state_dict().values()):
                self.assertTrue(torch.equal(a, b))
            with self.assertRaises(CheckpointError):
                save_checkpoint(net, path)
            with self.assertRaises(CheckpointError):
                load_checkpoint(os.path.join(tmp, 'missing.ckpt'))


class TestSupervised(unittest.TestCase):
    """Test cases for supervised_train."""

    def test_memorize_single_sample(self):
        """Test one repeated sample is learned exactly."""
        rng = np.random.default_rng(0)
        planes = np.repeat(random_input(rng).planes[None], 16, axis=0)
        masks = np.zeros((16, 34), dtype=bool)
        masks[:, [3, 9, 20]] = True
        labels = np.full(16, 9)
        dataset = SupervisedDataset('discard', planes, masks, labels)
        _, report = supervised_train(tiny_net(), dataset, epochs=30, batch_size=8,
                                     learning_rate=1e-2, holdout_fraction=0.0)
        self.assertEqual(report.train_accuracy, 1.0)
        self.assertEqual(report.holdout_accuracy, 1.0)

    def test_empty_dataset(self):
        """Test an empty dataset is rejected."""
        dataset = SupervisedDataset('pong', np.zeros((0, DEFAULT_LAYOUT.total_channels, 34)),
                                    np.zeros((0, 2), dtype=bool), np.zeros(0, dtype=np.int64))
        with self.assertRaises(DatasetError):
            supervised_train(tiny_net(), dataset)

    def test_label_outside_mask(self):
        """Test an illegal label is rejected."""
        masks = np.zeros((1, 34), dtype=bool)
        masks[0, 1] = True
        dataset = SupervisedDataset('discard', np.zeros((1, DEFAULT_LAYOUT.total_channels, 34)),
                                    masks, np.array([2]))
        with self.assertRaises(DatasetError):
            supervised_train(tiny_net(), dataset)

    def test_save_load(self):
        """Test datasets survive an npz round trip."""
        masks = np.ones((2, 2), dtype=bool)
        dataset = SupervisedDataset('riichi', np.ones((2, 5, 34), dtype=np.uint8), masks,
                                    np.array([0, 1]), 'c5-x')
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'riichi.npz')
            dataset.save(path)
            loaded = SupervisedDataset.load(path)
        self.assertEqual(loaded.head, 'riichi')
        self.assertEqual(loaded.layout_version, 'c5-x')
        np.testing.assert_array_equal(loaded.labels, dataset.labels)


if __name__ == '__main__':
    unittest.main()
