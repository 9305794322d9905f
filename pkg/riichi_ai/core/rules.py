"""Rule configuration: yaku values, points table, penalties and schedule."""

import hashlib
import logging
import os
from dataclasses import dataclass, field, fields

from ..utils.exceptions import RuleConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

DEFAULT_RULES_PATH = os.path.abspath(
    os.path.join(os.path.dirname(__file__), '..', '..', 'config', 'rules', 'standard.rules')
)


def parse_key_value_text(text, source='<string>'):
    """
    Parse ``key = value`` lines; ``#`` starts a comment.

    Args:
        text: File contents
        source: Name used in error messages

    Returns:
        dict: Raw string values by key (insertion ordered)

    Raises:
        RuleConfigError: On a line without ``=`` or a duplicated key
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise RuleConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        if not key:
            raise RuleConfigError(f"{source}:{lineno}: empty key")
        if key in values:
            raise RuleConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def _parse_bool(value, key):
    lowered = value.lower()
    if lowered in ('true', 'yes', '1', 'on'):
        return True
    if lowered in ('false', 'no', '0', 'off'):
        return False
    raise RuleConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_int(value, key):
    try:
        return int(value)
    except ValueError:
        raise RuleConfigError(f"{key}: expected an integer, got {value!r}")


def _parse_float(value, key):
    try:
        return float(value)
    except ValueError:
        raise RuleConfigError(f"{key}: expected a number, got {value!r}")


def _parse_points_table(value, key):
    table = {}
    for item in value.split(','):
        if ':' not in item:
            raise RuleConfigError(f"{key}: expected han:points pairs, got {item.strip()!r}")
        han, points = item.split(':', 1)
        table[_parse_int(han.strip(), key)] = _parse_int(points.strip(), key)
    if not table or min(table) != 1:
        raise RuleConfigError(f"{key}: table must start at 1 han")
    expected = list(range(1, max(table) + 1))
    if sorted(table) != expected:
        raise RuleConfigError(f"{key}: han values must be contiguous")
    return table


@dataclass(frozen=True)
class RuleConfig:
    """Immutable rule set used by the engine, scorer and game loop."""

    starting_score: int = 25000
    riichi_bet: int = 1000
    honba_ron_bonus: int = 300
    honba_tsumo_bonus: int = 100
    min_riichi_wall: int = 4
    points_table: dict = field(default_factory=lambda: {
        1: 1000, 2: 2000, 3: 3900, 4: 7700, 5: 8000, 6: 12000, 7: 12000,
        8: 16000, 9: 16000, 10: 16000, 11: 24000, 12: 24000, 13: 32000,
    })
    dealer_multiplier: float = 1.5
    yaku: dict = field(default_factory=lambda: {
        'riichi': 1, 'menzen_tsumo': 1, 'yakuhai': 1, 'tanyao': 1, 'toitoi': 2,
        'honitsu': 3, 'honitsu_open': 2, 'chinitsu': 6, 'chinitsu_open': 5,
    })
    noten_penalty_enabled: bool = True
    noten_penalty: int = 3000
    dealer_repeat_on_tenpai: bool = True
    max_kongs: int = 4
    round_schedule: int = 8
    round_cap: int = 12
    game_reward: tuple = (50, 20, 0, -135)
    schema_version: int = SCHEMA_VERSION

    def __hash__(self):
        return hash(self.config_hash)

    @property
    def max_points(self):
        """Largest non-dealer hand value the table can produce."""
        return self.points_table[max(self.points_table)]

    def canonical_text(self):
        """Deterministic ``key = value`` rendering used for hashing."""
        lines = []
        for item in sorted(self.to_dict().items()):
            lines.append(f"{item[0]} = {item[1]}")
        return '\n'.join(lines) + '\n'

    def to_dict(self):
        """Flat string-valued mapping in rule-file vocabulary."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == 'points_table':
                out[f.name] = ', '.join(f"{h}:{p}" for h, p in sorted(value.items()))
            elif f.name == 'yaku':
                for yaku_id, han in sorted(value.items()):
                    out[f"yaku.{yaku_id}"] = str(han)
            elif f.name == 'game_reward':
                out[f.name] = ', '.join(str(v) for v in value)
            elif isinstance(value, bool):
                out[f.name] = 'true' if value else 'false'
            else:
                out[f.name] = str(value)
        return out

    @property
    def config_hash(self):
        """SHA-256 hex digest of the canonical text."""
        return hashlib.sha256(self.canonical_text().encode('utf-8')).hexdigest()

    @classmethod
    def from_text(cls, text, source='<string>'):
        """
        Build a rule set from rule-file text.

        Args:
            text: Rule file contents
            source: Name used in error messages

        Returns:
            RuleConfig: Parsed rules (missing keys keep their defaults)

        Raises:
            RuleConfigError: On unknown keys, bad values or a wrong schema
        """
        raw = parse_key_value_text(text, source)
        if 'schema_version' not in raw:
            raise RuleConfigError(f"{source}: missing schema_version")
        schema = _parse_int(raw.pop('schema_version'), 'schema_version')
        if schema != SCHEMA_VERSION:
            raise RuleConfigError(
                f"{source}: unsupported schema_version {schema} (expected {SCHEMA_VERSION})"
            )

        defaults = cls()
        kwargs = {}
        yaku = dict(defaults.yaku)
        known = {f.name: f for f in fields(cls)}
        for key, value in raw.items():
            if key.startswith('yaku.'):
                yaku_id = key[len('yaku.'):]
                if yaku_id not in defaults.yaku:
                    raise RuleConfigError(f"{source}: unknown yaku {yaku_id!r}")
                yaku[yaku_id] = _parse_int(value, key)
                continue
            if key not in known:
                raise RuleConfigError(f"{source}: unknown key {key!r}")
            default = getattr(defaults, key)
            if key == 'points_table':
                kwargs[key] = _parse_points_table(value, key)
            elif key == 'game_reward':
                reward = tuple(_parse_int(v.strip(), key) for v in value.split(','))
                if len(reward) != 4:
                    raise RuleConfigError(f"{key}: expected 4 values, got {len(reward)}")
                kwargs[key] = reward
            elif isinstance(default, bool):
                kwargs[key] = _parse_bool(value, key)
            elif isinstance(default, int):
                kwargs[key] = _parse_int(value, key)
            elif isinstance(default, float):
                kwargs[key] = _parse_float(value, key)
        kwargs['yaku'] = yaku

        rules = cls(**kwargs)
        if rules.round_cap < rules.round_schedule:
            raise RuleConfigError(f"{source}: round_cap must be >= round_schedule")
        return rules


def load_rules(path=None):
    """
    Load a rule file.

    Args:
        path: Rule file path (defaults to ``config/rules/standard.rules``)

    Returns:
        RuleConfig: Parsed rules

    Raises:
        RuleConfigError: If the file is missing or malformed
    """
    path = path or DEFAULT_RULES_PATH
    if not os.path.exists(path):
        raise RuleConfigError(f"Rule file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    rules = RuleConfig.from_text(text, source=path)
    logger.debug(f"Loaded rules from {path} (hash {rules.config_hash[:12]})")
    return rules
