"""Feature planes and vectors."""

from .layout import FeatureLayout, DEFAULT_LAYOUT, dump_planes, load_planes
from .observation import Observation, OracleExtension, encode_observation, encode_oracle, encode_call_candidate
from .lookahead import LookaheadPlanes, compute_lookahead, lookahead_for_seat
from .round_summary import RoundSummaryVector, encode_reward_input, summarize_outcome

__all__ = [
    'FeatureLayout', 'DEFAULT_LAYOUT', 'dump_planes', 'load_planes',
    'Observation', 'OracleExtension', 'encode_observation', 'encode_oracle', 'encode_call_candidate',
    'LookaheadPlanes', 'compute_lookahead', 'lookahead_for_seat',
    'RoundSummaryVector', 'encode_reward_input', 'summarize_outcome',
]
