"""Unit tests for API endpoints."""

import unittest
import sys
import os

import torch

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from riichi_ai.api import create_app
from riichi_ai.features.layout import DEFAULT_LAYOUT
from riichi_ai.models.checkpoint import policy_to_blob
from riichi_ai.models.network import PolicyNetwork
from riichi_ai.selfplay import SelfPlayRuntime, WorkerConfig
from riichi_ai.storage import MemoryParameterStore, ReplayBuffer


class TestAPI(unittest.TestCase):
    """Test cases for Flask API over an idle runtime."""

    def setUp(self):
        """Set up test fixtures."""
        self.app = create_app(config_name='default')
        self.app.config['TESTING'] = True
        self.client = self.app.test_client()

    def test_health_check(self):
        """Test health check endpoint."""
        response = self.client.get('/api/v1/health')

        self.assertEqual(response.status_code, 200)

        data = response.get_json()
        self.assertEqual(data['status'], 'healthy')
        self.assertFalse(data['running'])
        self.assertIsNone(data['store_version'])

    def test_get_stats(self):
        """Test stats endpoint."""
        response = self.client.get('/api/v1/stats')

        self.assertEqual(response.status_code, 200)

        data = response.get_json()
        self.assertEqual(data['games_played'], 0)
        self.assertEqual(data['games_per_minute'], 0.0)
        self.assertEqual(data['buffer_fill'], 0.0)
        self.assertIn('store_version', data)

    def test_metrics(self):
        """Test metrics endpoint returns sorted name/value lines."""
        response = self.client.get('/api/v1/metrics')

        self.assertEqual(response.status_code, 200)
        self.assertTrue(response.mimetype.startswith('text/plain'))
        lines = response.get_data(as_text=True).strip().split('\n')
        names = [line.split(' ')[0] for line in lines]
        self.assertEqual(names, sorted(names))
        self.assertIn('buffer_fill', names)
        self.assertIn('store_version 0', lines)

    def test_read_only(self):
        """Test write methods are refused."""
        response = self.client.post('/api/v1/stats')
        self.assertEqual(response.status_code, 405)

    def test_not_found(self):
        """Test unknown routes."""
        response = self.client.get('/api/v1/play')
        self.assertEqual(response.status_code, 404)
        self.assertIn('error', response.get_json())


class TestAPIRuntime(unittest.TestCase):
    """Test cases for Flask API over a runtime that has played."""

    def test_stats_after_games(self):
        """Test stats reflect games played and the published version."""
        torch.manual_seed(0)
        net = PolicyNetwork(DEFAULT_LAYOUT, blocks=1, filters=4)
        net.version = 3
        store = MemoryParameterStore()
        store.publish(3, policy_to_blob(net), {'gamma': 0.0, 'oracle': False})
        buffer = ReplayBuffer(capacity=100)
        config = WorkerConfig(games=1, opponents=('fold',), lookahead_depth=1, fetch_retries=0)
        runtime = SelfPlayRuntime(store, buffer, config, num_workers=1)
        runtime.start()
        runtime.join(timeout=600)

        app = create_app(runtime, config_name='default')
        client = app.test_client()
        data = client.get('/api/v1/stats').get_json()
        self.assertEqual(data['games_played'], 1)
        self.assertEqual(data['store_version'], 3)
        self.assertGreater(data['buffer_fill'], 0.0)
        metrics = client.get('/api/v1/metrics').get_data(as_text=True)
        self.assertIn('games_played 1\n', metrics)
        self.assertIn('store_version 3\n', metrics)


if __name__ == '__main__':
    unittest.main()
