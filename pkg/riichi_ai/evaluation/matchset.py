"""
Matchsets: many seeded games of one agent against three opponents.

Seats rotate so the agent under test sits in every seat equally often. In
duplicate mode each deal is replayed four times, once per seat assignment,
which removes most of the luck of the deal from the comparison.
"""

import json
import logging
import os
from dataclasses import dataclass, field

from joblib import Parallel, delayed

from .. import FORMAT_VERSION
from ..core.round import OutcomeKind
from ..core.rules import RuleConfig
from ..features.layout import DEFAULT_LAYOUT, LOOKAHEAD_DEPTH
from ..models.agent import Agent
from ..selfplay.game_runner import GameRunner
from ..selfplay.opponents import make_agent, parse_opponents
from ..selfplay.worker import game_rng
from ..training.progress_tracker import ProgressTracker
from ..utils.exceptions import ConfigurationError
from .bootstrap import bootstrap_stable_rank
from .stable_rank import RankTally, is_undefined, stable_rank

logger = logging.getLogger(__name__)

ROLES = ('agent', 'opponent1', 'opponent2', 'opponent3')


@dataclass
class MatchConfig:
    """
    What to play.

    ``agent`` and each opponent is an opponent spec string (``'scripted'``,
    ``'policy:<path>'``, ...), a zero-argument factory returning an agent,
    or an agent instance. Instances are shared between games and force
    sequential play.
    """

    agent: object = 'scripted'
    opponents: tuple = ('scripted', 'scripted', 'scripted')
    games: int = 100
    base_seed: int = 0
    rotation: str = 'balanced'  # 'balanced' or 'fixed'
    duplicate: bool = False
    rules: RuleConfig = None
    lookahead_depth: int = LOOKAHEAD_DEPTH
    n_jobs: int = 1
    layout: object = DEFAULT_LAYOUT

    def __post_init__(self):
        if self.rotation not in ('balanced', 'fixed'):
            raise ConfigurationError(f"Unknown seat rotation '{self.rotation}'")
        if self.games < 1:
            raise ConfigurationError("A matchset needs at least one game")
        if self.duplicate and self.games % 4:
            raise ConfigurationError("Duplicate mode needs a multiple of 4 games")
        self.opponents = tuple(parse_opponents(self.opponents))
        self.rules = self.rules or RuleConfig()

    def seating(self, index):
        """
        Deal index and seat of every role for game ``index``.

        Returns:
            tuple: ``(deal_index, seats)`` with ``seats[role] = seat``
        """
        if self.duplicate:
            deal_index, shift = divmod(index, 4)
        else:
            deal_index = index
            shift = index % 4 if self.rotation == 'balanced' else 0
        return deal_index, tuple((role + shift) % 4 for role in range(4))

    def describe(self):
        def name(spec):
            return spec if isinstance(spec, str) else getattr(spec, 'name', type(spec).__name__)
        return {
            'agent': name(self.agent),
            'opponents': [name(o) for o in self.opponents],
            'games': self.games,
            'base_seed': self.base_seed,
            'rotation': self.rotation,
            'duplicate': self.duplicate,
            'lookahead_depth': self.lookahead_depth,
        }


@dataclass
class MatchGame:
    """One finished game seen from the agent under test."""

    index: int
    seed: int
    seats: tuple
    agent_seat: int
    ranks: tuple
    final_scores: tuple
    rounds: list = field(default_factory=list)

    @property
    def rank(self):
        return self.ranks[self.agent_seat]

    def role_rank(self, role):
        return self.ranks[self.seats[role]]

    def to_dict(self):
        return {
            'index': self.index,
            'seed': self.seed,
            'seats': list(self.seats),
            'agent_seat': self.agent_seat,
            'ranks': list(self.ranks),
            'final_scores': list(self.final_scores),
            'rounds': self.rounds,
        }


@dataclass
class MatchResult:
    config: MatchConfig
    games: list

    def tally(self, role='agent'):
        return RankTally.from_ranks(g.role_rank(ROLES.index(role)) for g in self.games)

    def stable_rank(self, role='agent'):
        return stable_rank(self.tally(role))

    def _round_counts(self, role):
        index = ROLES.index(role)
        rounds = wins = deal_ins = 0
        for game in self.games:
            seat = game.seats[index]
            for outcome in game.rounds:
                rounds += 1
                if outcome['winner'] == seat:
                    wins += 1
                if outcome['kind'] == OutcomeKind.RON.value and outcome['loser'] == seat:
                    deal_ins += 1
        return rounds, wins, deal_ins

    def win_rate(self, role='agent'):
        """Rounds won over rounds played."""
        rounds, wins, _ = self._round_counts(role)
        return wins / rounds if rounds else 0.0

    def deal_in_rate(self, role='agent'):
        """Rounds lost by discarding into a ron over rounds played."""
        rounds, _, deal_ins = self._round_counts(role)
        return deal_ins / rounds if rounds else 0.0

    @property
    def ranks(self):
        return [g.rank for g in self.games]

    def summary(self, bootstrap_k=None, bootstrap_n=None, seed=0):
        value = self.stable_rank()
        summary = {
            'format_version': FORMAT_VERSION,
            'config_hash': self.config.rules.config_hash,
            'config': self.config.describe(),
            'games': len(self.games),
            'tally': self.tally().to_dict(),
            'rank_rates': list(self.tally().rates()),
            'stable_rank': None if is_undefined(value) else value,
            'stable_rank_undefined': is_undefined(value),
            'win_rate': self.win_rate(),
            'deal_in_rate': self.deal_in_rate(),
            'opponents': {
                role: {'win_rate': self.win_rate(role), 'deal_in_rate': self.deal_in_rate(role)}
                for role in ROLES[1:]
            },
        }
        if bootstrap_n:
            k = min(bootstrap_k or len(self.games), len(self.games))
            summary['bootstrap'] = bootstrap_stable_rank(self.ranks, k, bootstrap_n, seed).to_dict()
        return summary


def _resolve(spec, config, cache):
    if isinstance(spec, Agent):
        return spec
    if isinstance(spec, str):
        return make_agent(spec, config.layout, config.lookahead_depth, cache)
    if callable(spec):
        return spec()
    raise ConfigurationError(f"Cannot build an agent from {spec!r}")


def _round_entry(record):
    outcome = record.outcome
    return {
        'kind': outcome.kind.value,
        'winner': outcome.winner,
        'loser': outcome.loser,
        'han': outcome.han,
        'deltas': list(outcome.round_score_deltas),
    }


def play_match_game(config, index, cache=None):
    """Play game ``index`` of a matchset."""
    deal_index, seats = config.seating(index)
    rng, game_seed = game_rng(config.base_seed, 0, deal_index)
    table = [None] * 4
    for role, spec in enumerate((config.agent,) + config.opponents):
        table[seats[role]] = _resolve(spec, config, cache)
    runner = GameRunner(table, config.rules, record_events=False)
    record = runner.play_game(game_seed, rng, game_id=f"m{index}")
    return MatchGame(
        index=index,
        seed=game_seed,
        seats=seats,
        agent_seat=seats[0],
        ranks=tuple(record.outcome.ranks),
        final_scores=tuple(record.outcome.final_scores),
        rounds=[_round_entry(r) for r in record.rounds],
    )


def run_matchset(config):
    """
    Play every game of ``config``.

    Returns:
        MatchResult: Games in index order, independent of ``n_jobs``

    Raises:
        CheckpointError: If an agent checkpoint cannot be loaded
        LayoutMismatchError: If a checkpoint was trained on another layout
    """
    cache = {}
    shared = any(isinstance(s, Agent) for s in (config.agent,) + config.opponents)
    n_jobs = 1 if shared else config.n_jobs
    # load every checkpoint once before fanning out
    for spec in (config.agent,) + config.opponents:
        if isinstance(spec, str) and ':' in spec:
            _resolve(spec, config, cache)

    logger.info(f"Matchset: {config.games} games, rotation={config.rotation}, duplicate={config.duplicate}")
    if n_jobs == 1:
        tracker = ProgressTracker(config.games, 'matchset', log_every=max(1, config.games // 10), unit='games')
        games = []
        for index in range(config.games):
            games.append(play_match_game(config, index, cache))
            tracker.update()
    else:
        games = Parallel(n_jobs=n_jobs, prefer='threads')(
            delayed(play_match_game)(config, index, cache) for index in range(config.games)
        )
    result = MatchResult(config, list(games))
    value = result.stable_rank()
    logger.info(f"Matchset done: tally {result.tally().counts}, stable rank {value!r}")
    return result


def write_results(result, path, overwrite=False):
    """Write one JSON line per game after a header line."""
    if os.path.exists(path) and not overwrite:
        raise FileExistsError(f"Refusing to overwrite {path}")
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    header = {
        'type': 'header',
        'format_version': FORMAT_VERSION,
        'config_hash': result.config.rules.config_hash,
        'config': result.config.describe(),
    }
    with open(path, 'w') as f:
        f.write(json.dumps(header, sort_keys=True) + '\n')
        for game in result.games:
            f.write(json.dumps(dict(type='game', **game.to_dict()), sort_keys=True) + '\n')
    logger.info(f"Wrote {len(result.games)} game records to {path}")


def read_results(path):
    """
    Load a results file.

    Returns:
        tuple: ``(header, games)`` with ``MatchGame`` objects
    """
    with open(path) as f:
        lines = [json.loads(line) for line in f if line.strip()]
    if not lines or lines[0].get('type') != 'header':
        raise ValueError(f"{path} is not a matchset results file")
    header = lines[0]
    if header.get('format_version') != FORMAT_VERSION:
        raise ValueError(f"Unsupported results format {header.get('format_version')}")
    games = []
    for entry in lines[1:]:
        entry.pop('type', None)
        games.append(MatchGame(
            index=entry['index'], seed=entry['seed'], seats=tuple(entry['seats']),
            agent_seat=entry['agent_seat'], ranks=tuple(entry['ranks']),
            final_scores=tuple(entry['final_scores']), rounds=entry['rounds'],
        ))
    return header, games


def write_summary(summary, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(summary, f, indent=2, sort_keys=True)
