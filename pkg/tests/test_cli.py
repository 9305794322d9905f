"""Unit tests for the command-line surface and layered settings."""

import unittest
import tempfile
import json
import io
import os
import sys
from contextlib import redirect_stderr, redirect_stdout

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import Config, DevelopmentConfig
from riichi_ai.cli import cli_dispatch
from riichi_ai.storage.replay_log import read_replay, write_replay
from riichi_ai.utils.exceptions import ConfigurationError
from riichi_ai.utils.settings import coerce, resolve_settings


def run_cli(*argv, environ=None):
    """Run the CLI, returning (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli_dispatch(list(argv), environ=environ if environ is not None else {})
    return code, out.getvalue(), err.getvalue()


class TestSettings(unittest.TestCase):
    """Test cases for settings resolution."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()
        self.settings_file = os.path.join(self.temp_dir, 'run.conf')
        with open(self.settings_file, 'w') as f:
            f.write("# run settings\nseed = 3\neval_games = 12\nopponents = fold, random\n")

    def test_defaults(self):
        """Test defaults come from the config class."""
        settings, sources = resolve_settings(Config, environ={})
        self.assertEqual(settings.SEED, 0)
        self.assertEqual(settings.OPPONENTS, ('scripted', 'scripted', 'scripted'))
        self.assertTrue(all(source == 'default' for source in sources.values()))

    def test_profile_defaults(self):
        """Test a profile overrides the base defaults."""
        settings, _ = resolve_settings(DevelopmentConfig, environ={})
        self.assertEqual(settings.ADAPT_PAIRS, 20)

    def test_layer_precedence(self):
        """Test flags beat environment beats file beats defaults."""
        environ = {'RIICHI_AI_SEED': '5', 'RIICHI_AI_EVAL_GAMES': '16', 'RIICHI_AI_LOG_LEVEL': 'WARNING'}
        settings, sources = resolve_settings(Config, self.settings_file, {'SEED': 7}, environ)

        self.assertEqual(settings.SEED, 7)
        self.assertEqual(sources['SEED'], 'flag')
        self.assertEqual(settings.EVAL_GAMES, 16)
        self.assertEqual(sources['EVAL_GAMES'], 'env')
        self.assertEqual(settings.OPPONENTS, ('fold', 'random'))
        self.assertEqual(sources['OPPONENTS'], 'file')
        self.assertEqual(settings.LOG_LEVEL, 'WARNING')
        self.assertEqual(sources['BUFFER_CAPACITY'], 'default')

    def test_none_flags_ignored(self):
        """Test unset flags do not mask lower layers."""
        settings, sources = resolve_settings(Config, self.settings_file, {'SEED': None}, {})
        self.assertEqual(settings.SEED, 3)
        self.assertEqual(sources['SEED'], 'file')

    def test_unknown_keys(self):
        """Test unknown file keys are rejected and unknown env keys skipped."""
        with open(self.settings_file, 'a') as f:
            f.write("no_such_setting = 1\n")
        with self.assertRaises(ConfigurationError):
            resolve_settings(Config, self.settings_file, environ={})

        settings, _ = resolve_settings(Config, environ={'RIICHI_AI_SLOW_TESTS': '1'})
        self.assertFalse(hasattr(settings, 'SLOW_TESTS'))

    def test_missing_file(self):
        """Test a missing settings file."""
        with self.assertRaises(ConfigurationError):
            resolve_settings(Config, os.path.join(self.temp_dir, 'absent.conf'), environ={})

    def test_coerce(self):
        """Test string values take the type of their default."""
        self.assertIs(coerce('yes', False, 'X'), True)
        self.assertIs(coerce('off', True, 'X'), False)
        self.assertEqual(coerce('12', 1, 'X'), 12)
        self.assertEqual(coerce('0.5', 1.0, 'X'), 0.5)
        self.assertEqual(coerce('1, 2,3', (0,), 'X'), (1, 2, 3))
        self.assertIsNone(coerce('none', None, 'X'))
        self.assertEqual(coerce('run.log', None, 'X'), 'run.log')
        with self.assertRaises(ConfigurationError):
            coerce('many', 1, 'X')
        with self.assertRaises(ConfigurationError):
            coerce('maybe', True, 'X')


class TestCLI(unittest.TestCase):
    """Test cases for the riichi command line."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()

    def out(self, name):
        return os.path.join(self.temp_dir, name)

    def test_usage_errors(self):
        """Test usage errors exit with status 1."""
        code, _, err = run_cli('shuffle')
        self.assertEqual(code, 1)
        self.assertIn('shuffle', err)

        code, _, _ = run_cli()
        self.assertEqual(code, 1)

        code, _, _ = run_cli('eval', '--games', 'many')
        self.assertEqual(code, 1)

    def test_help(self):
        """Test --help exits cleanly."""
        code, out, _ = run_cli('--help')
        self.assertEqual(code, 0)
        self.assertIn('train-rl', out)

    def test_missing_checkpoint(self):
        """Test a missing checkpoint exits with status 2 naming the path."""
        missing = self.out('absent.ckpt')
        code, _, err = run_cli('adapt', '--checkpoint', missing, '--out', self.out('adapt'))
        self.assertEqual(code, 2)
        self.assertIn(missing, err)

    def test_global_preset_needs_reward_model(self):
        """Test global-reward presets refuse to start without a predictor."""
        code, _, err = run_cli('train-rl', '--preset', 'rl-1', '--out', self.out('rl'))
        self.assertEqual(code, 2)
        self.assertIn('--reward-model', err)

    def test_unknown_setting_in_file(self):
        """Test an unknown settings-file key is a runtime failure."""
        path = self.out('bad.conf')
        with open(path, 'w') as f:
            f.write("colour = red\n")
        code, _, err = run_cli('eval', '--config', path, '--out', self.out('eval'))
        self.assertEqual(code, 2)
        self.assertIn('COLOUR', err)

    def test_effective_config(self):
        """Test the effective configuration records flag precedence."""
        path = self.out('run.conf')
        with open(path, 'w') as f:
            f.write("seed = 3\nsl_games = 1\nlookahead_search_depth = 1\n")
        environ = {'RIICHI_AI_SEED': '5', 'RIICHI_AI_LOG_LEVEL': 'WARNING'}
        out_dir = self.out('gen')

        code, _, _ = run_cli('gen-data', '--config', path, '--seed', '7', '--out', out_dir, environ=environ)
        self.assertEqual(code, 0)

        with open(os.path.join(out_dir, 'effective_config.json')) as f:
            effective = json.load(f)
        self.assertEqual(effective['command'], 'gen-data')
        self.assertEqual(effective['format_version'], 1)
        self.assertIn('config_hash', effective)
        self.assertEqual(effective['settings']['SEED'], 7)
        self.assertEqual(effective['sources']['SEED'], 'flag')
        self.assertEqual(effective['settings']['SL_GAMES'], 1)
        self.assertEqual(effective['sources']['SL_GAMES'], 'file')
        self.assertEqual(effective['sources']['LOG_LEVEL'], 'env')

        with open(os.path.join(out_dir, 'sl_counts.json')) as f:
            counts = json.load(f)
        self.assertEqual(counts['seed'], 7)
        self.assertGreater(counts['counts']['discard'], 0)
        self.assertTrue(os.path.exists(os.path.join(out_dir, 'sl_discard.npz')))

    def test_refuses_overwrite(self):
        """Test a second run into the same directory fails without touching results."""
        args = ('gen-data', '--games', '1', '--lookahead-depth', '1', '--out', self.out('gen'))
        self.assertEqual(run_cli(*args)[0], 0)
        before = os.path.getmtime(self.out(os.path.join('gen', 'sl_discard.npz')))

        code, _, err = run_cli(*args)
        self.assertEqual(code, 2)
        self.assertIn('overwrite', err)
        self.assertEqual(os.path.getmtime(self.out(os.path.join('gen', 'sl_discard.npz'))), before)

    def test_eval_deterministic(self):
        """Test two identical eval runs write identical summaries."""
        summaries = []
        for name in ('a', 'b'):
            code, out, _ = run_cli('eval', '--games', '4', '--seed', '11', '--bootstrap-sample', '3',
                                   '--bootstrap-resamples', '20', '--out', self.out(name))
            self.assertEqual(code, 0)
            self.assertIn('stable rank', out)
            with open(self.out(os.path.join(name, 'summary.json'))) as f:
                summaries.append(f.read())

        self.assertEqual(summaries[0], summaries[1])
        summary = json.loads(summaries[0])
        self.assertEqual(summary['games'], 4)
        self.assertEqual(sum(summary['tally'].values()), 4)
        self.assertEqual(summary['bootstrap']['n'], 20)
        self.assertEqual(summary['ranking']['level'], '7dan')
        self.assertEqual(summary['ranking']['room'], 'expert')

        with open(self.out(os.path.join('a', 'results.jsonl'))) as f:
            lines = [json.loads(line) for line in f]
        self.assertEqual(lines[0]['type'], 'header')
        self.assertEqual(len(lines), 5)

    def test_replay_record_verify_inspect(self):
        """Test a recorded game verifies and can be inspected."""
        out_dir = self.out('replay')
        code, out, _ = run_cli('replay', 'record', 'game.jsonl', '--seed', '2', '--out', out_dir)
        self.assertEqual(code, 0)
        path = out.strip()
        self.assertTrue(os.path.exists(path))

        code, out, _ = run_cli('replay', 'verify', path, '--out', out_dir)
        self.assertEqual(code, 0)
        self.assertIn('ok', out)

        code, out, _ = run_cli('replay', 'inspect', path, '--seat', '1', '--out', out_dir)
        self.assertEqual(code, 0)
        record = json.loads(out)
        self.assertEqual(record['seat'], 1)
        self.assertIn(record['final_rank'], (1, 2, 3, 4))
        self.assertGreater(len(record['rounds']), 0)

    def test_replay_verify_detects_tampering(self):
        """Test a log whose recorded deltas were edited fails verification."""
        out_dir = self.out('replay')
        code, out, _ = run_cli('replay', 'record', 'game.jsonl', '--out', out_dir)
        self.assertEqual(code, 0)
        path = out.strip()

        log = read_replay(path)
        end = next(e for e in log.events if e['type'] == 'round_end')
        end['deltas'] = [end['deltas'][0] + 1000, end['deltas'][1] - 1000] + end['deltas'][2:]
        tampered = write_replay(self.out('tampered.jsonl'), log)

        code, out, err = run_cli('replay', 'verify', tampered, '--out', out_dir)
        self.assertEqual(code, 2)
        self.assertIn('mismatches', out)


if __name__ == '__main__':
    unittest.main()
