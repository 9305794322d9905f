"""Performance metrics collection."""

import json
import math
import os
import threading
import time
from collections import defaultdict


class MetricsCollector:
    """Collect and track runtime metrics (thread-safe)."""

    def __init__(self):
        """Initialize metrics collector."""
        self.metrics = defaultdict(list)
        self.counters = defaultdict(int)
        self.gauges = {}
        self._lock = threading.Lock()

    def record_time(self, metric_name, duration):
        """
        Record a timing metric.

        Args:
            metric_name: Name of the metric
            duration: Duration in seconds
        """
        with self._lock:
            self.metrics[metric_name].append(duration)

    def increment_counter(self, counter_name, value=1):
        """
        Increment a counter.

        Args:
            counter_name: Name of the counter
            value: Increment value (default: 1)
        """
        with self._lock:
            self.counters[counter_name] += value

    def set_gauge(self, gauge_name, value):
        """
        Set a point-in-time value such as buffer fill or store version.

        Args:
            gauge_name: Name of the gauge
            value: Numeric value
        """
        with self._lock:
            self.gauges[gauge_name] = value

    def get_stats(self, metric_name):
        """
        Get statistics for a timing metric.

        Args:
            metric_name: Name of the metric

        Returns:
            dict: Statistics (mean, min, max, count)
        """
        with self._lock:
            values = list(self.metrics.get(metric_name, []))

        if not values:
            return {'count': 0, 'mean': 0, 'min': 0, 'max': 0, 'total': 0}

        return {
            'count': len(values),
            'mean': sum(values) / len(values),
            'min': min(values),
            'max': max(values),
            'total': sum(values)
        }

    def get_counter(self, counter_name):
        """Get counter value."""
        with self._lock:
            return self.counters.get(counter_name, 0)

    def get_gauge(self, gauge_name, default=None):
        """Get gauge value."""
        with self._lock:
            return self.gauges.get(gauge_name, default)

    def get_all_metrics(self):
        """
        Get all metrics, counters and gauges.

        Returns:
            dict: All metrics data
        """
        with self._lock:
            names = list(self.metrics)
            result = {
                'timings': {},
                'counters': dict(self.counters),
                'gauges': dict(self.gauges),
            }

        for metric_name in names:
            result['timings'][metric_name] = self.get_stats(metric_name)

        return result

    def to_line_protocol(self):
        """
        Render counters and gauges as ``name value`` lines, sorted by name.

        Returns:
            str: Line protocol text (newline terminated)
        """
        with self._lock:
            items = dict(self.counters)
            items.update(self.gauges)
        lines = [f"{name} {_format_value(items[name])}" for name in sorted(items)]
        return '\n'.join(lines) + ('\n' if lines else '')

    def clear(self):
        """Clear all metrics."""
        with self._lock:
            self.metrics.clear()
            self.counters.clear()
            self.gauges.clear()


def _format_value(value):
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else 'nan'
    return str(value)


class MetricsWriter:
    """Append-only writer of line-delimited JSON metric records."""

    def __init__(self, path):
        """
        Initialize writer.

        Args:
            path: Output ``.jsonl`` path (parent directories are created)
        """
        self.path = path
        out_dir = os.path.dirname(path)
        if out_dir and not os.path.exists(out_dir):
            os.makedirs(out_dir, exist_ok=True)
        self._lock = threading.Lock()

    def write(self, record):
        """
        Append one record.

        Args:
            record: JSON-serializable dict
        """
        line = json.dumps(record, sort_keys=True, separators=(',', ':'))
        with self._lock:
            with open(self.path, 'a', encoding='utf-8') as f:
                f.write(line + '\n')


def read_metric_records(path):
    """Read back a ``.jsonl`` metrics file as a list of dicts."""
    with open(path, 'r', encoding='utf-8') as f:
        return [json.loads(line) for line in f if line.strip()]


class Timer:
    """Context manager for timing code blocks."""

    def __init__(self, metrics_collector=None, metric_name=None):
        """
        Initialize timer.

        Args:
            metrics_collector: Optional MetricsCollector instance
            metric_name: Optional metric name
        """
        self.metrics_collector = metrics_collector
        self.metric_name = metric_name
        self.start_time = None
        self.duration = None

    def __enter__(self):
        """Start timer."""
        self.start_time = time.time()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Stop timer and record duration."""
        self.duration = time.time() - self.start_time

        if self.metrics_collector and self.metric_name:
            self.metrics_collector.record_time(self.metric_name, self.duration)

        return False
