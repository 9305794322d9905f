"""Progress logging for long loops: self-play games, RL updates, matchsets, rollouts."""

import logging
import time

logger = logging.getLogger(__name__)


class ProgressTracker:
    """Count finished items and log throttled progress lines with rate and ETA."""

    def __init__(self, total, label='progress', log_every=0, unit=None, min_interval=0.0):
        """
        Args:
            total: Expected number of items
            label: Prefix of log lines, usually the command or stage name
            log_every: Log every N items; 0 only logs the final line
            unit: Item name used in rates ('games', 'updates', ...); defaults to ``label``
            min_interval: Minimum seconds between two intermediate lines
        """
        self.total = total
        self.label = label
        self.log_every = log_every
        self.unit = unit or label
        self.min_interval = min_interval
        self.current = 0
        self.start_time = time.time()
        self._last_log = 0.0

    def update(self, count=1, item_name=None):
        self.current += count
        now = time.time()
        done = self.current >= self.total
        due = self.log_every and self.current % self.log_every == 0
        if done or (due and now - self._last_log >= self.min_interval):
            self._last_log = now
            logger.info(self.format_progress(item_name))

    def get_progress(self):
        """
        Snapshot of the loop.

        Returns:
            dict: current, total, percent, elapsed_sec, eta_sec and per_minute
        """
        elapsed = time.time() - self.start_time
        remaining = max(0, self.total - self.current)
        eta = elapsed / self.current * remaining if self.current else None
        return {
            'current': self.current,
            'total': self.total,
            'percent': 100.0 * self.current / self.total if self.total else 100.0,
            'elapsed_sec': elapsed,
            'eta_sec': eta,
            'per_minute': 60.0 * self.current / elapsed if elapsed > 0 else 0.0,
        }

    def format_progress(self, item_name=None):
        p = self.get_progress()
        eta = '?' if p['eta_sec'] is None else f"{p['eta_sec']:.0f}s"
        message = (f"{self.label}: {self.current}/{self.total} ({p['percent']:.0f}%), "
                   f"{p['per_minute']:.1f} {self.unit}/min, eta {eta}")
        if item_name:
            message += f" [{item_name}]"
        return message

    def finish(self):
        """Log and return the final snapshot, even when fewer items than expected ran."""
        p = self.get_progress()
        logger.info(f"{self.label}: finished {self.current} {self.unit} in {p['elapsed_sec']:.1f}s")
        return p
