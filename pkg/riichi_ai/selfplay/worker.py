"""
Self-play workers.

A worker plays full games with the learner in one seat and three configured
opponents, refreshes the learner's parameters from the store every few
games, and pushes each finished round of the learner into the replay
buffer. ``SelfPlayRuntime`` runs several workers on threads.
"""

import logging
import threading
import time
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from ..core.rules import RuleConfig
from ..features.layout import DEFAULT_LAYOUT, LOOKAHEAD_DEPTH
from ..training.oracle import apply_oracle_dropout
from ..training.progress_tracker import ProgressTracker
from ..utils.exceptions import RiichiAIException, StoreUnavailableError
from ..utils.metrics import MetricsCollector
from .game_runner import GameRunner, round_trajectory
from .inference import InferenceAgent, LocalInferenceEngine
from .opponents import make_agent, parse_opponents

logger = logging.getLogger(__name__)


@dataclass
class WorkerConfig:
    worker_id: int = 0
    base_seed: int = 0
    games: int = None
    refresh_every: int = 1
    opponents: tuple = ('scripted', 'scripted', 'scripted')
    rotate_seats: bool = True
    mode: str = 'sample'
    temperature: float = 1.0
    lookahead_depth: int = LOOKAHEAD_DEPTH
    oracle: bool = False
    fetch_retries: int = 5
    fetch_backoff: float = 0.05
    rules: RuleConfig = None
    layout: object = DEFAULT_LAYOUT


@dataclass
class WorkerReport:
    worker_id: int
    games: int = 0
    rounds: int = 0
    pushed: int = 0
    aborted: int = 0
    versions: set = field(default_factory=set)


def game_rng(base_seed, worker_id, game_index):
    """Per-game generator and deal seed; independent of thread scheduling."""
    sequence = np.random.SeedSequence([int(base_seed), int(worker_id), int(game_index)])
    game_seed = int(sequence.generate_state(1, dtype=np.uint64)[0])
    return np.random.default_rng(sequence), game_seed


def fetch_with_retry(store, retries=5, backoff=0.05, stop_event=None):
    """
    Fetch the latest snapshot, retrying with exponential backoff.

    Raises:
        StoreUnavailableError: If every attempt fails
    """
    delay = backoff
    for attempt in range(retries + 1):
        try:
            return store.fetch()
        except StoreUnavailableError:
            if attempt == retries or (stop_event is not None and stop_event.is_set()):
                raise
            logger.debug(f"Store unavailable, retrying in {delay:.2f}s")
            time.sleep(delay)
            delay *= 2


def learner_seat(config, game_index):
    return game_index % 4 if config.rotate_seats else 0


def run_selfplay_worker(config, store, buffer, stop_event=None, metrics=None, predictor=None):
    """
    Play games and push the learner's round trajectories.

    Args:
        config: ``WorkerConfig``
        store: ``ParameterStore`` with at least one published version
        buffer: ``ReplayBuffer``
        stop_event: Optional ``threading.Event``; the worker stops between games
        metrics: Optional ``MetricsCollector`` for health counters
        predictor: Optional ``RewardPredictor`` for attributed rewards

    Returns:
        WorkerReport

    Raises:
        StoreUnavailableError: If the store never answers
    """
    rules = config.rules or RuleConfig()
    report = WorkerReport(config.worker_id)
    engine = LocalInferenceEngine(layout=config.layout)
    opponent_cache = {}
    opponent_specs = parse_opponents(config.opponents)
    opponents = [make_agent(spec, config.layout, config.lookahead_depth, opponent_cache)
                 for spec in opponent_specs]

    game_index = 0
    learner = None
    while config.games is None or game_index < config.games:
        if stop_event is not None and stop_event.is_set():
            break
        if learner is None or game_index % max(1, config.refresh_every) == 0:
            snapshot = fetch_with_retry(store, config.fetch_retries, config.fetch_backoff, stop_event)
            engine.load_snapshot(snapshot)
            learner = InferenceAgent(engine, mode=config.mode, temperature=config.temperature,
                                     lookahead_depth=config.lookahead_depth,
                                     oracle=config.oracle and engine.meta.get('oracle', False))
            if learner.oracle:
                learner.oracle_transform = partial(apply_oracle_dropout, gamma=engine.meta.get('gamma', 0.0))

        rng, seed = game_rng(config.base_seed, config.worker_id, game_index)
        seat = learner_seat(config, game_index)
        table = list(opponents)
        table.insert(seat, learner)
        runner = GameRunner(table, rules, record_events=False)
        game_id = f"w{config.worker_id}-g{game_index}"
        pending = []

        def collect(record, earlier, seat=seat, game_id=game_id):
            pending.append(round_trajectory(game_id, record, seat, earlier, predictor))

        started = time.time()
        try:
            runner.play_game(seed, rng, game_id=game_id, on_round=collect)
        except RiichiAIException as e:
            report.aborted += 1
            logger.error(f"Game {game_id} aborted: {e}")
            if metrics is not None:
                metrics.increment_counter('games_aborted')
            game_index += 1
            continue

        for trajectory in pending:
            if trajectory.steps:
                buffer.push(trajectory)
                report.pushed += 1
                report.versions.update(trajectory.versions)
        report.games += 1
        report.rounds += len(pending)
        if metrics is not None:
            metrics.increment_counter('games_played')
            metrics.increment_counter('rounds_pushed', len(pending))
            metrics.record_time('game_seconds', time.time() - started)
        game_index += 1

    logger.info(f"Worker {config.worker_id} finished: {report.games} games, {report.pushed} trajectories, "
                f"{report.aborted} aborted")
    return report


class SelfPlayRuntime:
    """Thread pool of self-play workers sharing one store and one buffer."""

    def __init__(self, store, buffer, worker_config, num_workers=2, predictor=None):
        self.store = store
        self.buffer = buffer
        self.worker_config = worker_config
        self.num_workers = num_workers
        self.predictor = predictor
        self.metrics = MetricsCollector()
        self.stop_event = threading.Event()
        self.reports = []
        self._threads = []
        self._started_at = None
        self._lock = threading.Lock()

    def _run(self, worker_id):
        config = WorkerConfig(**dict(self.worker_config.__dict__, worker_id=worker_id))
        try:
            report = run_selfplay_worker(config, self.store, self.buffer, self.stop_event,
                                         self.metrics, self.predictor)
        except Exception as e:
            logger.exception(f"Worker {worker_id} failed: {e}")
            self.metrics.increment_counter('workers_failed')
            return
        with self._lock:
            self.reports.append(report)

    def start(self):
        self.stop_event.clear()
        self._started_at = time.time()
        for worker_id in range(self.num_workers):
            thread = threading.Thread(target=self._run, args=(worker_id,), name=f'selfplay-{worker_id}',
                                      daemon=True)
            thread.start()
            self._threads.append(thread)
        logger.info(f"Started {self.num_workers} self-play workers")

    def stop(self, timeout=None):
        self.stop_event.set()
        self.join(timeout)

    def join(self, timeout=None):
        for thread in self._threads:
            thread.join(timeout)
        self._threads = [t for t in self._threads if t.is_alive()]

    @property
    def running(self):
        return any(t.is_alive() for t in self._threads)

    def stats(self):
        """Health snapshot: games per minute, buffer fill and store version."""
        elapsed = time.time() - self._started_at if self._started_at else 0.0
        games = self.metrics.get_counter('games_played')
        self.metrics.set_gauge('games_per_minute', 60.0 * games / elapsed if elapsed > 0 else 0.0)
        self.metrics.set_gauge('buffer_fill', self.buffer.fill)
        self.metrics.set_gauge('buffer_size', len(self.buffer))
        self.metrics.set_gauge('store_version', self.store.latest_version() or 0)
        self.metrics.set_gauge('workers_alive', sum(t.is_alive() for t in self._threads))
        return {
            'games_played': games,
            'games_per_minute': self.metrics.get_gauge('games_per_minute'),
            'rounds_pushed': self.metrics.get_counter('rounds_pushed'),
            'games_aborted': self.metrics.get_counter('games_aborted'),
            'buffer': self.buffer.get_stats(),
            'buffer_fill': self.buffer.fill,
            'store_version': self.store.latest_version(),
            'workers': self.num_workers,
            'workers_alive': self.metrics.get_gauge('workers_alive'),
        }


def play_games(agents, games, seed=0, rules=None, rotate=True, progress_label=None):
    """
    Play ``games`` seeded games between fixed agents.

    With ``rotate`` the agent list is rotated by one seat each game.

    Returns:
        list: ``(GameRecord, seat_of_agent)`` pairs; ``seat_of_agent[i]`` is
        the seat agent ``i`` occupied
    """
    tracker = ProgressTracker(games, progress_label or 'games', log_every=max(1, games // 10), unit='games')
    results = []
    for index in range(games):
        rng, game_seed = game_rng(seed, 0, index)
        shift = index % 4 if rotate else 0
        seats = [(i + shift) % 4 for i in range(4)]
        table = [None] * 4
        for i, agent in enumerate(agents):
            table[seats[i]] = agent
        record = GameRunner(table, rules, record_events=False).play_game(game_seed, rng, game_id=f"g{index}")
        results.append((record, seats))
        tracker.update()
    return results
