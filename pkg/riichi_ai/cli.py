"""
Command-line entry points.

Every subcommand resolves its settings (flags > ``RIICHI_AI_*`` environment
> ``--config`` file > profile defaults), writes ``effective_config.json``
into its output directory and never overwrites an existing artifact.

Exit status: 0 on success, 1 on usage errors, 2 on runtime failures.
"""

import argparse
import glob
import json
import logging
import os
import sys
import threading

from . import FORMAT_VERSION, __version__
from .core.rules import load_rules
from .features.layout import FeatureLayout
from .utils.exceptions import ConfigurationError, RiichiAIException
from .utils.logger import setup_logger
from .utils.settings import resolve_settings, write_effective_config

logger = logging.getLogger(__name__)

DEFAULT_RUNS_DIR = os.path.join('.', 'data', 'runs')


class UsageError(Exception):
    """Raised instead of exiting on malformed command lines."""
    pass


class CLIArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# dest -> Config key; flags listed here take part in settings precedence
FLAG_KEYS = {
    'seed': 'SEED',
    'out': 'OUTPUT_DIR',
    'rules': 'RULES_PATH',
    'log_level': 'LOG_LEVEL',
    'store': 'STORE_TYPE',
    'db_path': 'SQLITE_DATABASE_PATH',
    'lookahead_depth': 'LOOKAHEAD_SEARCH_DEPTH',
    'workers': 'NUM_WORKERS',
    'opponents': 'OPPONENTS',
    'selfplay_games': 'SELFPLAY_GAMES',
    'sl_games': 'SL_GAMES',
    'teacher': 'SL_TEACHER',
    'sl_epochs': 'SL_EPOCHS',
    'sl_batch_size': 'SL_BATCH_SIZE',
    'sl_lr': 'SL_LEARNING_RATE',
    'reward_games': 'REWARD_GAMES',
    'reward_epochs': 'REWARD_EPOCHS',
    'reward_hidden': 'REWARD_HIDDEN',
    'reward_lr': 'REWARD_LEARNING_RATE',
    'preset': 'AGENT_PRESET',
    'updates': 'RL_UPDATES',
    'rl_batch_size': 'RL_BATCH_SIZE',
    'rl_lr': 'RL_LEARNING_RATE',
    'timeout': 'RL_TIMEOUT_SECONDS',
    'worlds': 'ADAPT_WORLDS',
    'steps': 'ADAPT_STEPS',
    'adapt_return': 'ADAPT_RETURN',
    'adapt_jobs': 'ADAPT_JOBS',
    'pairs': 'ADAPT_PAIRS',
    'agent': 'EVAL_AGENT',
    'eval_opponents': 'EVAL_OPPONENTS',
    'eval_games': 'EVAL_GAMES',
    'duplicate': 'EVAL_DUPLICATE',
    'eval_jobs': 'EVAL_JOBS',
    'bootstrap_sample': 'BOOTSTRAP_SAMPLE',
    'bootstrap_resamples': 'BOOTSTRAP_RESAMPLES',
    'level': 'RANKING_LEVEL',
    'room': 'RANKING_ROOM',
}


class RunContext:
    """Resolved settings, rules, layout and output directory of one command."""

    def __init__(self, args, environ=None):
        from config import get_config
        overrides = {FLAG_KEYS[dest]: value for dest, value in vars(args).items()
                     if dest in FLAG_KEYS and value is not None}
        self.command = args.command
        self.settings, self.sources = resolve_settings(
            get_config(args.profile), args.config, overrides, environ)
        s = self.settings
        setup_logger(log_level=s.LOG_LEVEL, log_file=s.LOG_FILE)
        self.rules = load_rules(s.RULES_PATH)
        self.layout = FeatureLayout(s.LOOKAHEAD_DEPTH, s.LOOKAHEAD_THRESHOLDS)
        self.out = s.OUTPUT_DIR or os.path.join(DEFAULT_RUNS_DIR, self.command)
        os.makedirs(self.out, exist_ok=True)
        write_effective_config(
            s, self.sources, self.path('effective_config.json'),
            command=self.command, format_version=FORMAT_VERSION, version=__version__,
            config_hash=self.rules.config_hash, layout_version=self.layout.layout_version,
        )
        logger.info(f"{self.command}: output in {self.out} (rules {self.rules.config_hash[:12]})")

    def path(self, name):
        return os.path.join(self.out, name)

    def new_path(self, name):
        """Output path that must not exist yet."""
        path = self.path(name)
        if os.path.exists(path):
            raise ConfigurationError(f"Refusing to overwrite {path}; choose another --out")
        return path

    def write_json(self, name, record):
        path = self.new_path(name)
        record = dict(record, format_version=FORMAT_VERSION, config_hash=self.rules.config_hash)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(record, f, indent=2, sort_keys=True)
        logger.info(f"Wrote {path}")
        return path

    def new_network(self):
        from .models.network import PolicyNetwork
        s = self.settings
        return PolicyNetwork(self.layout, s.TRUNK_BLOCKS, s.TRUNK_FILTERS, s.KERNEL_SIZE)

    def load_network(self, path):
        from .models.checkpoint import load_checkpoint
        net = load_checkpoint(path, expected_layout_version=self.layout.layout_version)
        logger.info(f"Loaded {path} (v{net.version})")
        return net

    def store(self):
        from .storage import create_parameter_store
        s = self.settings
        return create_parameter_store(s.STORE_TYPE, db_path=s.SQLITE_DATABASE_PATH, history=s.STORE_HISTORY)

    def worker_config(self, games=None, oracle=False):
        from .selfplay import WorkerConfig
        s = self.settings
        return WorkerConfig(
            base_seed=s.SEED, games=games, refresh_every=s.REFRESH_EVERY_GAMES, opponents=tuple(s.OPPONENTS),
            lookahead_depth=s.LOOKAHEAD_SEARCH_DEPTH, oracle=oracle, fetch_retries=s.FETCH_RETRIES,
            fetch_backoff=s.FETCH_BACKOFF_SECONDS, rules=self.rules, layout=self.layout,
        )


def _publish_initial(store, net, rules_hash):
    from .models.checkpoint import policy_to_blob
    latest = store.latest_version()
    if latest is not None and latest >= net.version:
        logger.info(f"Store already serves v{latest}; not publishing v{net.version}")
        return latest
    return store.publish(net.version, policy_to_blob(net, rules_hash), {'gamma': 0.0, 'oracle': False})


def _serve(runtime, port, profile):
    from .api import create_app
    app = create_app(runtime, config_name=profile)
    thread = threading.Thread(target=app.run, name='api',
                              kwargs={'host': '127.0.0.1', 'port': port, 'threaded': True, 'use_reloader': False},
                              daemon=True)
    thread.start()
    logger.info(f"Monitoring API on http://127.0.0.1:{port}/api/v1/stats")
    return thread


def cmd_selfplay(args, ctx):
    from .selfplay import SelfPlayRuntime
    from .storage import ReplayBuffer
    s = ctx.settings
    net = ctx.load_network(args.checkpoint) if args.checkpoint else ctx.new_network()
    store = ctx.store()
    _publish_initial(store, net, ctx.rules.config_hash)
    buffer = ReplayBuffer(capacity=s.BUFFER_CAPACITY, seed=s.SEED)
    runtime = SelfPlayRuntime(store, buffer, ctx.worker_config(games=s.SELFPLAY_GAMES), num_workers=s.NUM_WORKERS)
    if args.serve:
        _serve(runtime, args.serve, args.profile)
    runtime.start()
    try:
        runtime.join()
    except KeyboardInterrupt:
        logger.info("Stopping self-play")
        runtime.stop()
    stats = runtime.stats()
    ctx.write_json('selfplay_stats.json', stats)
    if runtime.metrics.get_counter('workers_failed'):
        raise RiichiAIException(f"{runtime.metrics.get_counter('workers_failed')} self-play workers failed")
    return 0


def cmd_gen_data(args, ctx):
    from .selfplay import generate_sl_dataset
    s = ctx.settings
    datasets, counts = generate_sl_dataset(s.SL_TEACHER, s.SL_GAMES, s.SEED, ctx.layout,
                                           s.LOOKAHEAD_SEARCH_DEPTH, ctx.rules)
    written = {}
    for head, dataset in datasets.items():
        if len(dataset):
            path = ctx.new_path(f'sl_{head}.npz')
            dataset.save(path, ctx.rules.config_hash)
            written[head] = path
    ctx.write_json('sl_counts.json', {'counts': dict(counts), 'games': s.SL_GAMES, 'seed': s.SEED,
                                      'teacher': s.SL_TEACHER, 'layout_version': ctx.layout.layout_version,
                                      'files': written})
    return 0


def cmd_train_sl(args, ctx):
    from .models.checkpoint import save_checkpoint
    from .models.supervised import SupervisedDataset, supervised_train
    from .utils.exceptions import DatasetError, LayoutMismatchError
    s = ctx.settings
    paths = sorted(glob.glob(os.path.join(args.data, 'sl_*.npz')))
    if not paths:
        raise DatasetError(f"No sl_*.npz datasets in {args.data}")
    heads = [h.strip() for h in args.heads.split(',')] if args.heads else None
    net = ctx.load_network(args.checkpoint) if args.checkpoint else ctx.new_network()
    reports = []
    for path in paths:
        dataset = SupervisedDataset.load(path)
        if heads and dataset.head not in heads:
            continue
        if dataset.layout_version != ctx.layout.layout_version:
            raise LayoutMismatchError(f"{path} was encoded with layout {dataset.layout_version}")
        net, report = supervised_train(net, dataset, s.SL_EPOCHS, s.SL_BATCH_SIZE, s.SL_LEARNING_RATE,
                                       s.SL_HOLDOUT_FRACTION, s.SEED)
        reports.append(report.to_dict())
    save_checkpoint(net, ctx.new_path('policy-sl.ckpt'), ctx.rules.config_hash)
    ctx.write_json('sl_report.json', {'heads': reports})
    return 0


def _training_games_from_replays(directory, rules, scale):
    from .features.round_summary import RoundSummaryVector
    from .reward import TrainingGame
    from .storage.replay_log import read_replay, round_summaries
    games = []
    for path in sorted(glob.glob(os.path.join(directory, '*.jsonl'))):
        log = read_replay(path, expected_rules_hash=rules.config_hash)
        for seat in range(4):
            rows, rank = round_summaries(log, seat)
            if rank is None or not rows:
                continue
            vectors = [RoundSummaryVector.from_fields(seat, deltas, after, dealer, honba, pot)
                       for dealer, honba, deltas, after, pot in rows]
            games.append(TrainingGame.from_rounds(vectors, seat, rank, rules.game_reward, scale))
    return games


def _training_games_from_play(ctx):
    from .models.agent import ScriptedAgent
    from .reward import TrainingGame
    from .selfplay import play_games
    s = ctx.settings
    agents = [ScriptedAgent() for _ in range(4)]
    games = []
    for record, _ in play_games(agents, s.REWARD_GAMES, s.SEED, ctx.rules, rotate=False,
                                progress_label='reward-data'):
        outcomes = [r.outcome for r in record.rounds]
        for seat in range(4):
            games.append(TrainingGame.from_rounds(outcomes, seat, record.ranks[seat], ctx.rules.game_reward,
                                                  s.REWARD_SCALE))
    return games


def cmd_train_reward(args, ctx):
    from .reward import save_predictor, train_predictor
    s = ctx.settings
    if args.replays:
        games = _training_games_from_replays(args.replays, ctx.rules, s.REWARD_SCALE)
    else:
        games = _training_games_from_play(ctx)
    net, report = train_predictor(games, hidden=s.REWARD_HIDDEN, epochs=s.REWARD_EPOCHS,
                                  learning_rate=s.REWARD_LEARNING_RATE, seed=s.SEED)
    save_predictor(net, ctx.new_path('reward.ckpt'), ctx.rules.config_hash)
    ctx.write_json('reward_report.json', {'games': report.n_games, 'final_loss': report.final_loss,
                                          'losses': report.losses})
    return 0


def cmd_train_rl(args, ctx):
    from .reward import load_predictor
    from .selfplay import SelfPlayRuntime
    from .storage import ReplayBuffer
    from .training import RLTrainer, TrainerConfig, get_preset, train_loop
    from .utils.metrics import MetricsWriter
    s = ctx.settings
    preset = get_preset(s.AGENT_PRESET)
    predictor = None
    if preset.reward == 'global':
        if not args.reward_model:
            raise ConfigurationError(f"Preset {preset.name} needs --reward-model")
        predictor = load_predictor(args.reward_model)
    net = ctx.load_network(args.checkpoint) if args.checkpoint else ctx.new_network()
    config = TrainerConfig.from_config(s, checkpoint_dir=ctx.out, metrics_path=ctx.path('metrics.jsonl'),
                                       rules_hash=ctx.rules.config_hash)
    store = ctx.store()
    trainer = RLTrainer(net, config, store, MetricsWriter(config.metrics_path))
    trainer.publish()
    buffer = ReplayBuffer(capacity=s.BUFFER_CAPACITY, seed=s.SEED)
    runtime = SelfPlayRuntime(store, buffer, ctx.worker_config(oracle=preset.oracle), num_workers=s.NUM_WORKERS,
                              predictor=predictor)
    runtime.start()
    try:
        paths = train_loop(trainer, buffer, s.RL_UPDATES, timeout=s.RL_TIMEOUT_SECONDS)
        final = trainer.save_checkpoint()
    finally:
        runtime.stop(timeout=s.RL_TIMEOUT_SECONDS)
    ctx.write_json('train_rl.json', {'preset': preset.name, 'updates': trainer.updates,
                                     'version': trainer.net.version, 'checkpoints': paths, 'final': final,
                                     'selfplay': runtime.stats()})
    return 0


def cmd_adapt(args, ctx):
    from .adaptation import AdaptationConfig, AdaptationSession, VisibleInfo, adapt, evaluate_adaptation
    from .core.round import deal_round
    from .models.checkpoint import save_checkpoint
    s = ctx.settings
    net = ctx.load_network(args.checkpoint)
    net.eval()
    state = deal_round(args.deal_seed, dealer=args.dealer, rules=ctx.rules)
    info = VisibleInfo.from_state(state, args.seat)
    config = AdaptationConfig.from_config(s, seed=s.SEED)
    if s.ADAPT_PAIRS:
        result = evaluate_adaptation(net, info, config, pairs=s.ADAPT_PAIRS, seed=s.SEED + 1)
        ctx.write_json('adaptation.json', {'deal_seed': args.deal_seed, 'seat': args.seat, **result.to_dict()})
        print(f"adapted win rate over {result.pairs} pairs: {result.win_rate:.3f}")
        return 0
    session = AdaptationSession.collect(net, info, config)
    adapted = adapt(session)
    save_checkpoint(adapted, ctx.new_path('adapted.ckpt'), ctx.rules.config_hash)
    ctx.write_json('adaptation.json', {'deal_seed': args.deal_seed, 'seat': args.seat,
                                       'report': session.report().to_dict()})
    return 0


def cmd_eval(args, ctx):
    from .evaluation import MatchConfig, run_matchset, simulate_rank_progression, write_results, write_summary
    from .evaluation.ranking import ranking_points
    s = ctx.settings
    config = MatchConfig(agent=s.EVAL_AGENT, opponents=tuple(s.EVAL_OPPONENTS), games=s.EVAL_GAMES,
                         base_seed=s.SEED, duplicate=s.EVAL_DUPLICATE, rules=ctx.rules,
                         lookahead_depth=s.LOOKAHEAD_SEARCH_DEPTH, n_jobs=s.EVAL_JOBS, layout=ctx.layout)
    result = run_matchset(config)
    write_results(result, ctx.new_path('results.jsonl'))
    summary = result.summary(bootstrap_k=min(s.BOOTSTRAP_SAMPLE, len(result.games)),
                             bootstrap_n=s.BOOTSTRAP_RESAMPLES, seed=s.SEED)
    progression = simulate_rank_progression(result.ranks, s.RANKING_LEVEL, s.RANKING_ROOM)
    points = [ranking_points(s.RANKING_LEVEL, s.RANKING_ROOM, rank) for rank in result.ranks]
    summary['ranking'] = {
        'level': s.RANKING_LEVEL,
        'room': s.RANKING_ROOM,
        'mean_points': sum(points) / len(points),
        'record_rank': progression.record_rank,
        'final_level': progression.final_level,
    }
    write_summary(summary, ctx.new_path('summary.json'))
    value = summary['stable_rank']
    print(f"stable rank: {'undefined' if value is None else f'{value:.3f}'} over {len(result.games)} games")
    return 0


def cmd_replay(args, ctx):
    from .selfplay.game_runner import GameRunner
    from .selfplay.opponents import make_agent, parse_opponents
    from .selfplay.worker import game_rng
    from .storage.replay_log import read_replay, round_summaries, verify_replay, write_replay
    s = ctx.settings
    if args.action == 'record':
        cache = {}
        specs = [s.EVAL_AGENT] + parse_opponents(s.EVAL_OPPONENTS)
        agents = [make_agent(spec, ctx.layout, s.LOOKAHEAD_SEARCH_DEPTH, cache) for spec in specs]
        rng, game_seed = game_rng(s.SEED, 0, 0)
        record = GameRunner(agents, ctx.rules).play_game(game_seed, rng, game_id=f"replay-{s.SEED}")
        path = write_replay(ctx.new_path(args.path or f'game-{s.SEED}.jsonl'),
                            record.to_replay(ctx.rules, ctx.layout.layout_version))
        print(path)
        return 0
    if not args.path:
        raise UsageError(f"replay {args.action} needs a log path")
    log = read_replay(args.path, expected_rules_hash=ctx.rules.config_hash)
    if args.action == 'verify':
        report = verify_replay(log, ctx.rules)
        for mismatch in report.mismatches:
            logger.error(mismatch)
        print(f"{args.path}: {report.rounds} rounds, {report.actions} actions, "
              f"{'ok' if report.ok else f'{len(report.mismatches)} mismatches'}")
        return 0 if report.ok else 2
    rows, rank = round_summaries(log, args.seat)
    print(json.dumps({'header': log.header, 'seat': args.seat, 'final_rank': rank,
                      'rounds': [list(r) for r in rows]}, indent=2, sort_keys=True))
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None, help='key = value settings file')
    common.add_argument('--profile', type=str, default='default', choices=['default', 'development', 'production'],
                        help='Configuration profile (default: default)')
    common.add_argument('--out', type=str, default=None, help='Output directory')
    common.add_argument('--seed', type=int, default=None, help='Base seed')
    common.add_argument('--rules', type=str, default=None, help='Rule file')
    common.add_argument('--log-level', type=str, default=None, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    common.add_argument('--lookahead-depth', type=int, default=None, help='Cap on the lookahead search; k planes above it repeat the deepest searched plane')

    parser = CLIArgumentParser(prog='riichi', description='Self-play learning pipeline for Riichi Mahjong')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', metavar='command')

    p = sub.add_parser('selfplay', parents=[common], help='Run self-play workers')
    p.add_argument('--checkpoint', type=str, default=None, help='Policy checkpoint (default: fresh network)')
    p.add_argument('--games', dest='selfplay_games', type=int, default=None, help='Games per worker')
    p.add_argument('--workers', type=int, default=None)
    p.add_argument('--opponents', type=str, default=None, help='Comma-separated opponent specs')
    p.add_argument('--store', type=str, default=None, choices=['memory', 'sqlite'])
    p.add_argument('--db-path', type=str, default=None)
    p.add_argument('--serve', type=int, default=None, metavar='PORT', help='Expose the monitoring API')
    p.set_defaults(handler=cmd_selfplay)

    p = sub.add_parser('gen-data', parents=[common], help='Generate supervised datasets from teacher play')
    p.add_argument('--games', dest='sl_games', type=int, default=None)
    p.add_argument('--teacher', type=str, default=None, help="'scripted' or a checkpoint path")
    p.set_defaults(handler=cmd_gen_data)

    p = sub.add_parser('train-sl', parents=[common], help='Supervised training of the policy heads')
    p.add_argument('--data', type=str, required=True, help='Directory of sl_<head>.npz files')
    p.add_argument('--heads', type=str, default=None, help='Comma-separated heads (default: all found)')
    p.add_argument('--checkpoint', type=str, default=None, help='Initial policy checkpoint')
    p.add_argument('--epochs', dest='sl_epochs', type=int, default=None)
    p.add_argument('--batch-size', dest='sl_batch_size', type=int, default=None)
    p.add_argument('--lr', dest='sl_lr', type=float, default=None)
    p.set_defaults(handler=cmd_train_sl)

    p = sub.add_parser('train-reward', parents=[common], help='Train the global reward predictor')
    p.add_argument('--replays', type=str, default=None, help='Directory of replay logs (default: play new games)')
    p.add_argument('--games', dest='reward_games', type=int, default=None)
    p.add_argument('--epochs', dest='reward_epochs', type=int, default=None)
    p.add_argument('--hidden', dest='reward_hidden', type=int, default=None)
    p.add_argument('--lr', dest='reward_lr', type=float, default=None)
    p.set_defaults(handler=cmd_train_reward)

    p = sub.add_parser('train-rl', parents=[common], help='Self-play policy-gradient training')
    p.add_argument('--checkpoint', type=str, default=None, help='Initial (usually supervised) checkpoint')
    p.add_argument('--preset', type=str, default=None, choices=['rl-basic', 'rl-1', 'rl-2'])
    p.add_argument('--reward-model', type=str, default=None, help='Reward predictor checkpoint (rl-1, rl-2)')
    p.add_argument('--updates', type=int, default=None)
    p.add_argument('--batch-size', dest='rl_batch_size', type=int, default=None)
    p.add_argument('--lr', dest='rl_lr', type=float, default=None)
    p.add_argument('--workers', type=int, default=None)
    p.add_argument('--opponents', type=str, default=None)
    p.add_argument('--store', type=str, default=None, choices=['memory', 'sqlite'])
    p.add_argument('--db-path', type=str, default=None)
    p.add_argument('--timeout', type=float, default=None, help='Seconds to wait for a batch')
    p.set_defaults(handler=cmd_train_rl)

    p = sub.add_parser('adapt', parents=[common], help='Run-time adaptation on one dealt hand')
    p.add_argument('--checkpoint', type=str, required=True)
    p.add_argument('--deal-seed', type=int, default=0)
    p.add_argument('--dealer', type=int, default=0, choices=range(4))
    p.add_argument('--seat', type=int, default=0, choices=range(4))
    p.add_argument('--worlds', type=int, default=None)
    p.add_argument('--steps', type=int, default=None)
    p.add_argument('--return', dest='adapt_return', type=str, default=None, choices=['round', 'game'])
    p.add_argument('--jobs', dest='adapt_jobs', type=int, default=None)
    p.add_argument('--pairs', type=int, default=None, help='Paired evaluation worlds (0: adapt once and save)')
    p.set_defaults(handler=cmd_adapt)

    p = sub.add_parser('eval', parents=[common], help='Matchset with stable rank and bootstrap statistics')
    p.add_argument('--agent', type=str, default=None, help="Agent spec, e.g. 'policy:run/policy.ckpt'")
    p.add_argument('--opponents', dest='eval_opponents', type=str, default=None)
    p.add_argument('--games', dest='eval_games', type=int, default=None)
    p.add_argument('--duplicate', action='store_const', const=True, default=None)
    p.add_argument('--jobs', dest='eval_jobs', type=int, default=None)
    p.add_argument('--bootstrap-sample', type=int, default=None)
    p.add_argument('--bootstrap-resamples', type=int, default=None)
    p.add_argument('--level', type=str, default=None)
    p.add_argument('--room', type=str, default=None)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser('replay', parents=[common], help='Record, verify or inspect replay logs')
    p.add_argument('action', choices=['record', 'verify', 'inspect'])
    p.add_argument('path', nargs='?', default=None)
    p.add_argument('--seat', type=int, default=0, choices=range(4))
    p.add_argument('--agent', type=str, default=None)
    p.add_argument('--opponents', dest='eval_opponents', type=str, default=None)
    p.set_defaults(handler=cmd_replay)

    return parser


def cli_dispatch(argv=None, environ=None):
    """
    Parse ``argv`` and run the chosen subcommand.

    Args:
        argv: Arguments without the program name (default: ``sys.argv[1:]``)
        environ: Environment mapping (default: ``os.environ`` after loading ``.env``)

    Returns:
        int: Exit status
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"riichi: error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1

    try:
        ctx = RunContext(args, environ)
        return args.handler(args, ctx) or 0
    except UsageError as e:
        print(f"riichi: error: {e}", file=sys.stderr)
        return 1
    except (RiichiAIException, OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"riichi: {args.command} failed: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_dispatch())


if __name__ == '__main__':
    main()
