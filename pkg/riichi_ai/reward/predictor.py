"""
Global reward predictor.

A two-layer GRU reads the summaries of the completed rounds of a game and
predicts the final game reward. The reward of round ``k`` is the change of
that prediction, ``phi(x^1..x^k) - phi(x^1..x^(k-1))``; the empty prefix is
scored from the learned initial hidden state.
"""

import logging
import os
from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn as nn

from ..features.round_summary import SUMMARY_DIM, RoundSummaryVector, encode_reward_input
from ..models.checkpoint import decode_blob, encode_blob
from ..utils.exceptions import CheckpointError, DatasetError

logger = logging.getLogger(__name__)

REWARD_TAG = 'reward'
DEFAULT_GAME_REWARD = (50, 20, 0, -135)
DEFAULT_REWARD_SCALE = 0.01

# Per-feature input scaling of RoundSummaryVector.to_array()
FEATURE_SCALE = (0.02, 0.004, 0.004, 0.004, 0.004, 1.0, 1.0, 1.0, 1.0, 0.2, 0.1)


def game_reward(final_rank, reward_vector=DEFAULT_GAME_REWARD, scale=DEFAULT_REWARD_SCALE):
    """Scaled ranking-point reward for a 1-based final rank."""
    return float(reward_vector[final_rank - 1]) * scale


class RewardPredictor(nn.Module):
    """GRU over round summaries followed by two fully connected layers."""

    def __init__(self, hidden=64, input_dim=SUMMARY_DIM, layers=2):
        super().__init__()
        self.config = {'hidden': hidden, 'input_dim': input_dim, 'layers': layers}
        self.gru = nn.GRU(input_dim, hidden, num_layers=layers, batch_first=True)
        self.h0 = nn.Parameter(torch.zeros(layers, 1, hidden))
        self.fc1 = nn.Linear(hidden, hidden)
        self.fc2 = nn.Linear(hidden, 1)
        scale = FEATURE_SCALE if input_dim == len(FEATURE_SCALE) else (1.0,) * input_dim
        self.register_buffer('feature_scale', torch.tensor(scale))

    def head(self, hidden):
        return self.fc2(torch.relu(self.fc1(hidden))).squeeze(-1)

    def prefix_values(self, x):
        """
        Predictions for every prefix of a batch of games.

        Args:
            x: ``B x K x D`` tensor

        Returns:
            torch.Tensor: ``B x (K + 1)``; column 0 is the empty prefix
        """
        batch = x.shape[0]
        h0 = self.h0.expand(-1, batch, -1).contiguous()
        prior = self.head(h0[-1]).unsqueeze(1)
        if x.shape[1] == 0:
            return prior
        outputs, _ = self.gru(x * self.feature_scale.to(x.dtype), h0)
        return torch.cat([prior, self.head(outputs)], dim=1)

    def forward(self, x):
        return self.prefix_values(x)


@dataclass
class TrainingGame:
    """Round summaries of one game from one seat and the final game reward."""

    rounds: np.ndarray
    reward: float

    def __post_init__(self):
        self.rounds = np.asarray(self.rounds, dtype=np.float32).reshape(-1, SUMMARY_DIM)

    @property
    def num_rounds(self):
        return int(self.rounds.shape[0])

    @classmethod
    def from_rounds(cls, rounds, seat, final_rank, reward_vector=DEFAULT_GAME_REWARD,
                    scale=DEFAULT_REWARD_SCALE):
        """Build from settled outcomes or summary vectors of one game."""
        return cls(encode_reward_input(rounds, seat), game_reward(final_rank, reward_vector, scale))


@dataclass
class PredictorTrainingReport:
    losses: list = field(default_factory=list)
    n_games: int = 0

    @property
    def final_loss(self):
        return self.losses[-1] if self.losses else None


def _pad(games):
    longest = max(g.num_rounds for g in games)
    x = np.zeros((len(games), longest, SUMMARY_DIM), dtype=np.float32)
    valid = np.zeros((len(games), longest), dtype=bool)
    for i, game in enumerate(games):
        x[i, :game.num_rounds] = game.rounds
        valid[i, :game.num_rounds] = True
    rewards = np.array([g.reward for g in games], dtype=np.float64)
    return x, valid, rewards


def prefix_mse(net, x, valid, rewards):
    """
    Mean over games of the mean over non-empty prefixes of the squared error.

    Args:
        net: ``RewardPredictor``
        x: ``B x K x D`` padded inputs
        valid: ``B x K`` bool tensor of real rounds
        rewards: ``B`` tensor of game rewards
    """
    predictions = net.prefix_values(x)[:, 1:]
    errors = (predictions - rewards.unsqueeze(1)) ** 2
    weights = valid.to(predictions.dtype)
    per_game = (errors * weights).sum(dim=1) / weights.sum(dim=1)
    return per_game.mean()


def train_predictor(games, hidden=64, epochs=200, learning_rate=1e-2, batch_size=None, seed=0,
                    net=None):
    """
    Fit the predictor by minimizing the double-average prefix MSE.

    Args:
        games: ``TrainingGame`` list
        hidden: GRU width when ``net`` is not given
        epochs: Passes over the dataset
        learning_rate: Adam step size
        batch_size: Games per step (None for full batch)
        seed: Initialization and shuffle seed
        net: Optional predictor to continue training

    Returns:
        tuple: (RewardPredictor, PredictorTrainingReport)

    Raises:
        DatasetError: If there are no games or a game has no rounds
    """
    if not games:
        raise DatasetError("Reward predictor dataset is empty")
    if any(g.num_rounds == 0 for g in games):
        raise DatasetError("Every training game needs at least one round")

    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    if net is None:
        net = RewardPredictor(hidden=hidden)
    dtype = next(net.parameters()).dtype
    optimizer = torch.optim.Adam(net.parameters(), lr=learning_rate)
    batch_size = batch_size or len(games)

    report = PredictorTrainingReport(n_games=len(games))
    for epoch in range(epochs):
        order = rng.permutation(len(games))
        total, weight = 0.0, 0
        for start in range(0, len(games), batch_size):
            batch = [games[i] for i in order[start:start + batch_size]]
            x, valid, rewards = _pad(batch)
            loss = prefix_mse(net, torch.as_tensor(x, dtype=dtype), torch.as_tensor(valid),
                              torch.as_tensor(rewards, dtype=dtype))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss) * len(batch)
            weight += len(batch)
        report.losses.append(total / weight)
        if (epoch + 1) % 50 == 0:
            logger.debug(f"Reward predictor epoch {epoch + 1}/{epochs} loss {report.losses[-1]:.6f}")

    logger.info(f"Reward predictor trained on {len(games)} games, final loss {report.final_loss:.6f}")
    return net, report


def _as_rows(prefix):
    if len(prefix) and isinstance(prefix[0], RoundSummaryVector):
        return np.stack([v.to_array() for v in prefix])
    rows = np.asarray(prefix, dtype=np.float32)
    if rows.size == 0:
        return np.zeros((0, SUMMARY_DIM), dtype=np.float32)
    return rows


def predict_all_prefixes(net, prefix):
    """Predictions for the empty prefix and every longer prefix of ``prefix``."""
    rows = _as_rows(prefix)
    if rows.ndim != 2 or rows.shape[1] != net.config['input_dim']:
        raise ValueError(f"Round summaries must have {net.config['input_dim']} fields, got shape {rows.shape}")
    dtype = next(net.parameters()).dtype
    with torch.no_grad():
        values = net.prefix_values(torch.as_tensor(rows, dtype=dtype).unsqueeze(0))[0]
    return values.cpu().numpy().astype(np.float64)


def predict_prefix(net, prefix):
    """
    Predicted final game reward after a prefix of rounds.

    Args:
        net: ``RewardPredictor``
        prefix: ``RoundSummaryVector`` list or ``K x D`` array (K may be 0)

    Returns:
        float

    Raises:
        ValueError: If the summaries have the wrong width
    """
    return float(predict_all_prefixes(net, prefix)[-1])


def attribute_round_rewards(net, game):
    """
    Per-round rewards as successive prediction differences.

    Args:
        net: ``RewardPredictor``
        game: ``TrainingGame`` or round summaries of one game

    Returns:
        np.ndarray: ``K`` rewards summing to ``phi(all rounds) - phi(empty)``
    """
    rounds = game.rounds if isinstance(game, TrainingGame) else game
    values = predict_all_prefixes(net, rounds)
    return np.diff(values)


def synthetic_linear_dataset(n_games, max_rounds=6, seed=0, coefficient=1e-4, start_score=25000):
    """
    Games whose reward is a linear function of the seat's summed round scores.

    Each round moves a random amount from one random seat to another (or
    nothing, on a draw), so per-round deltas have mean zero.

    Returns:
        tuple: (TrainingGame list, list of per-round true contributions)
    """
    rng = np.random.default_rng(seed)
    amounts = np.array([0, 1000, 2000, 3900, 8000])
    games, contributions = [], []
    for _ in range(n_games):
        scores = [start_score] * 4
        dealer = int(rng.integers(4))
        summaries, parts = [], []
        for _ in range(int(rng.integers(1, max_rounds + 1))):
            deltas = [0, 0, 0, 0]
            amount = int(rng.choice(amounts))
            if amount:
                winner, loser = rng.choice(4, size=2, replace=False)
                deltas[winner] += amount
                deltas[loser] -= amount
            scores = [s + d for s, d in zip(scores, deltas)]
            summaries.append(RoundSummaryVector.from_fields(0, deltas, scores, dealer, 0, 0))
            parts.append(coefficient * deltas[0])
            dealer = (dealer + 1) % 4
        rounds = np.stack([s.to_array() for s in summaries])
        games.append(TrainingGame(rounds, coefficient * (scores[0] - start_score)))
        contributions.append(parts)
    return games, contributions


def predictor_to_blob(net, rules_hash=''):
    return encode_blob(REWARD_TAG, net.state_dict(), {'config': net.config, 'rules_hash': rules_hash})


def predictor_from_blob(blob):
    header, tensors = decode_blob(blob, REWARD_TAG)
    net = RewardPredictor(**header['config'])
    net.load_state_dict(tensors)
    return net


def save_predictor(net, path, rules_hash=''):
    """
    Write a predictor checkpoint to a new file.

    Raises:
        CheckpointError: If ``path`` already exists
    """
    if os.path.exists(path):
        raise CheckpointError(f"Refusing to overwrite checkpoint {path}")
    out_dir = os.path.dirname(path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(predictor_to_blob(net, rules_hash))
    return path


def load_predictor(path):
    if not os.path.exists(path):
        raise CheckpointError(f"Checkpoint not found: {path}")
    with open(path, 'rb') as f:
        return predictor_from_blob(f.read())
