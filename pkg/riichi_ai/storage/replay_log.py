"""
Replay logs.

One file per game, line-delimited JSON. The first line is the header
(format version, rule-config hash, layout version, seeds, agents), the
event lines follow in play order and the last line is a trailer holding
the SHA-256 of every byte before it. Each round starts with the full deal
so hidden-information features can be recomputed offline.
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field

from .. import FORMAT_VERSION
from ..core.round import (
    Action, ActionKind, RoundOutcome, RoundState, apply_action, draw_tile,
)
from ..core.scoring import settle_round
from ..utils.exceptions import ReplayLogError

logger = logging.getLogger(__name__)

CALL_KINDS = (ActionKind.CHOW, ActionKind.PONG, ActionKind.KONG, ActionKind.CLOSED_KONG,
              ActionKind.ADD_KONG)


def _dumps(record):
    return json.dumps(record, sort_keys=True, separators=(',', ':'))


def round_start_event(state):
    return {
        'type': 'round_start',
        'round_id': state.round_id,
        'dealer': state.dealer,
        'honba': state.honba,
        'riichi_pot': state.riichi_pot,
        'scores': list(state.scores),
        'prevalent_wind': state.prevalent_wind,
        'rng_seed': state.rng_seed,
        'hands': [sorted(seat.hand.concealed) for seat in state.seats],
        'live_wall': list(state.live_wall),
        'dead_wall': list(state.dead_wall),
    }


def draw_event(state):
    return {'type': 'draw', 'seat': state.turn, 'tile': state.drawn_tile}


def action_event(action):
    """Event line for an action applied through the engine."""
    if action.kind in (ActionKind.DISCARD, ActionKind.RIICHI):
        return {'type': 'discard', 'seat': action.actor, 'tile': action.tile,
                'riichi': action.kind == ActionKind.RIICHI}
    if action.kind in CALL_KINDS:
        event = {'type': 'call', 'seat': action.actor, 'kind': action.kind.value, 'tile': action.tile}
        if action.chow_start is not None:
            event['chow_start'] = action.chow_start
        return event
    if action.kind == ActionKind.WIN:
        return {'type': 'declare_win', 'seat': action.actor, 'tile': action.tile}
    return {'type': 'pass', 'seat': action.actor}


def action_from_event(event):
    kind = event['type']
    if kind == 'discard':
        return Action(ActionKind.RIICHI if event['riichi'] else ActionKind.DISCARD, event['seat'], event['tile'])
    if kind == 'call':
        return Action(ActionKind(event['kind']), event['seat'], event['tile'], event.get('chow_start'))
    if kind == 'declare_win':
        return Action(ActionKind.WIN, event['seat'], event['tile'])
    if kind == 'pass':
        return Action(ActionKind.PASS, event['seat'])
    raise ReplayLogError(f"Event type {kind} is not an action")


def dora_event(state):
    return {'type': 'dora_reveal', 'indicator': state.dead_wall[state.dora_revealed - 1],
            'count': state.dora_revealed}


def outcome_events(outcome):
    """Result lines of a finished round: the win or draw, then the round end."""
    if outcome.winner is not None:
        first = {
            'type': 'win',
            'winner': outcome.winner,
            'loser': outcome.loser,
            'tile': outcome.win_tile,
            'yaku': [list(y) if isinstance(y, (tuple, list)) else y for y in outcome.yaku],
            'han': outcome.han,
            'dora': outcome.dora,
            'points': outcome.points,
        }
    else:
        first = {'type': 'exhaustive_draw', 'tenpai': [bool(f) for f in outcome.tenpai_flags]}
    settlement = outcome.settlement
    end = {
        'type': 'round_end',
        'deltas': list(outcome.round_score_deltas),
        'scores_after': list(settlement.scores_after),
        'pot_after': settlement.pot_after,
        'dealer_next': settlement.dealer_next,
        'honba_next': settlement.honba_next,
    }
    return [first, end]


def game_end_event(game_outcome):
    return {
        'type': 'game_end',
        'final_scores': list(game_outcome.final_scores),
        'ranks': list(game_outcome.ranks),
        'leftover_pot': game_outcome.leftover_pot,
    }


@dataclass
class ReplayLog:
    header: dict
    events: list = field(default_factory=list)

    def lines(self):
        return [_dumps(dict(self.header, type='header'))] + [_dumps(e) for e in self.events]

    def to_bytes(self):
        body = ''.join(line + '\n' for line in self.lines()).encode('utf-8')
        trailer = _dumps({'type': 'trailer', 'sha256': hashlib.sha256(body).hexdigest()})
        return body + (trailer + '\n').encode('utf-8')

    def rounds(self):
        """Events split per round, each list starting at its ``round_start``."""
        rounds, current = [], None
        for event in self.events:
            if event['type'] == 'round_start':
                current = [event]
                rounds.append(current)
            elif current is not None and event['type'] != 'game_end':
                current.append(event)
        return rounds

    @property
    def game_end(self):
        return next((e for e in self.events if e['type'] == 'game_end'), None)


def make_header(rules_hash, layout_version, game_seed, agents=(), **extra):
    header = {
        'format_version': FORMAT_VERSION,
        'rules_hash': rules_hash,
        'layout_version': layout_version,
        'game_seed': int(game_seed),
        'agents': list(agents),
    }
    header.update(extra)
    return header


class ReplayWriter:
    """Single-writer, append-only replay file; the trailer is written on close."""

    def __init__(self, path, header):
        if os.path.exists(path):
            raise ReplayLogError(f"Refusing to overwrite replay log {path}")
        out_dir = os.path.dirname(path)
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
        self.path = path
        self._digest = hashlib.sha256()
        self._file = open(path, 'wb')
        self._write_line(_dumps(dict(header, type='header')))

    def _write_line(self, line):
        data = (line + '\n').encode('utf-8')
        self._digest.update(data)
        self._file.write(data)

    def write_event(self, event):
        self._write_line(_dumps(event))

    def close(self):
        if self._file is None:
            return
        trailer = _dumps({'type': 'trailer', 'sha256': self._digest.hexdigest()})
        self._file.write((trailer + '\n').encode('utf-8'))
        self._file.close()
        self._file = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()
        return False


def write_replay(path, log):
    """Write a whole ``ReplayLog`` to a new file."""
    if os.path.exists(path):
        raise ReplayLogError(f"Refusing to overwrite replay log {path}")
    out_dir = os.path.dirname(path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(log.to_bytes())
    return path


def parse_replay(data, expected_rules_hash=None, expected_layout_version=None):
    """
    Parse replay bytes.

    Raises:
        ReplayLogError: If truncated, the checksum or format version does not
            match, or the rule-config hash differs from the expected one
    """
    if not data.endswith(b'\n'):
        raise ReplayLogError("Replay log is truncated")
    lines = data[:-1].split(b'\n')
    if len(lines) < 2:
        raise ReplayLogError("Replay log is truncated")
    try:
        trailer = json.loads(lines[-1])
    except ValueError:
        raise ReplayLogError("Replay log is truncated")
    if trailer.get('type') != 'trailer':
        raise ReplayLogError("Replay log is truncated (no trailer)")
    body = b''.join(line + b'\n' for line in lines[:-1])
    if hashlib.sha256(body).hexdigest() != trailer.get('sha256'):
        raise ReplayLogError("Replay log checksum mismatch")

    records = [json.loads(line) for line in lines[:-1]]
    header = records[0]
    if header.get('type') != 'header':
        raise ReplayLogError("Replay log has no header")
    if header.get('format_version') != FORMAT_VERSION:
        raise ReplayLogError(f"Unsupported replay format {header.get('format_version')}")
    if expected_rules_hash is not None and header.get('rules_hash') != expected_rules_hash:
        raise ReplayLogError("Replay log was recorded under different rules")
    if expected_layout_version is not None and header.get('layout_version') != expected_layout_version:
        raise ReplayLogError("Replay log was recorded with a different feature layout")
    header = {k: v for k, v in header.items() if k != 'type'}
    return ReplayLog(header, records[1:])


def read_replay(path, expected_rules_hash=None, expected_layout_version=None):
    if not os.path.exists(path):
        raise ReplayLogError(f"Replay log not found: {path}")
    with open(path, 'rb') as f:
        return parse_replay(f.read(), expected_rules_hash, expected_layout_version)


@dataclass
class VerificationReport:
    rounds: int = 0
    actions: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.mismatches


def _state_from_start(event, rules):
    return RoundState.from_layout(
        event['hands'], event['live_wall'], event['dead_wall'], dealer=event['dealer'],
        round_id=event['round_id'], scores=event['scores'], honba=event['honba'],
        riichi_pot=event['riichi_pot'], prevalent_wind=event['prevalent_wind'],
        rng_seed=event['rng_seed'], rules=rules,
    )


def verify_replay(log, rules):
    """
    Re-run every round of a log through the engine.

    Every draw must produce the logged tile, every logged action must be
    legal, and each round's deltas must equal both the engine's outcome and
    a fresh settlement of the final state.

    Args:
        log: ``ReplayLog``
        rules: ``RuleConfig`` the log was recorded under

    Returns:
        VerificationReport
    """
    report = VerificationReport()
    if log.header.get('rules_hash') != rules.config_hash:
        report.mismatches.append("rules hash differs from the supplied rules")
        return report

    for events in log.rounds():
        report.rounds += 1
        start = events[0]
        state = _state_from_start(start, rules)
        outcome = None
        label = f"round {start['round_id']}"
        try:
            for event in events[1:]:
                kind = event['type']
                if kind == 'draw':
                    state = draw_tile(state)
                    if state.drawn_tile != event['tile'] or state.turn != event['seat']:
                        report.mismatches.append(f"{label}: draw differs at step {state.step}")
                        break
                elif kind in ('discard', 'call', 'pass', 'declare_win'):
                    report.actions += 1
                    result = apply_action(state, action_from_event(event))
                    if isinstance(result, RoundOutcome):
                        outcome = result
                    else:
                        state = result
                elif kind == 'dora_reveal':
                    if state.dora_revealed != event['count']:
                        report.mismatches.append(f"{label}: dora count {state.dora_revealed} != {event['count']}")
                elif kind == 'round_end':
                    if outcome is None:
                        report.mismatches.append(f"{label}: round_end before the round finished")
                        break
                    settled = settle_round(outcome, outcome.final_state, rules)
                    if list(outcome.round_score_deltas) != event['deltas']:
                        report.mismatches.append(f"{label}: deltas {list(outcome.round_score_deltas)} != {event['deltas']}")
                    if list(settled.scores_after) != event['scores_after']:
                        report.mismatches.append(f"{label}: re-settled scores differ")
        except Exception as e:
            report.mismatches.append(f"{label}: {e}")

    logger.debug(f"Verified {report.rounds} rounds, {report.actions} actions, "
                 f"{len(report.mismatches)} mismatches")
    return report


def round_summaries(log, seat):
    """
    ``(dealer, honba, deltas, scores_after, pot_after)`` per round of a log.

    Returns:
        tuple: (list of round tuples, final rank of ``seat`` or None)
    """
    rows = []
    for events in log.rounds():
        start = events[0]
        end = next((e for e in events if e['type'] == 'round_end'), None)
        if end is None:
            continue
        rows.append((start['dealer'], start['honba'], end['deltas'], end['scores_after'], end['pot_after']))
    game_end = log.game_end
    return rows, (game_end['ranks'][seat] if game_end else None)
