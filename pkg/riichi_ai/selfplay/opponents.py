"""
Opponent specifications.

An opponent spec is a short string:

* ``scripted``: the deterministic shanten-greedy player
* ``fold``: discards the safest kind and never calls
* ``random``: uniform over legal actions
* ``policy:<path>``: a frozen checkpoint played greedily
* ``sample:<path>``: a frozen checkpoint played by sampling
"""

import logging

from ..features.layout import DEFAULT_LAYOUT, LOOKAHEAD_DEPTH
from ..models.agent import FoldAgent, PolicyAgent, RandomAgent, ScriptedAgent
from ..models.checkpoint import load_checkpoint
from ..utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

SIMPLE_AGENTS = {
    'scripted': ScriptedAgent,
    'fold': FoldAgent,
    'random': RandomAgent,
}
CHECKPOINT_MODES = {'policy': 'greedy', 'sample': 'sample'}


def parse_opponents(value):
    """Split a comma-separated spec list into three specs (the last one repeats)."""
    if isinstance(value, str):
        specs = [s.strip() for s in value.split(',') if s.strip()]
    else:
        specs = list(value)
    if not specs:
        raise ConfigurationError("At least one opponent spec is required")
    while len(specs) < 3:
        specs.append(specs[-1])
    return specs[:3]


def make_agent(spec, layout=DEFAULT_LAYOUT, lookahead_depth=LOOKAHEAD_DEPTH, cache=None):
    """
    Build an agent from a spec string.

    Args:
        spec: Opponent spec
        layout: ``FeatureLayout`` checkpoints must match
        lookahead_depth: Runtime lookahead search depth for network agents
        cache: Optional dict reusing loaded checkpoints across calls

    Raises:
        ConfigurationError: For an unknown spec
        CheckpointError: If a checkpoint cannot be loaded
    """
    if spec in SIMPLE_AGENTS:
        return SIMPLE_AGENTS[spec]()
    prefix, _, path = spec.partition(':')
    if prefix not in CHECKPOINT_MODES or not path:
        raise ConfigurationError(f"Unknown opponent spec '{spec}'")
    if cache is not None and path in cache:
        net = cache[path]
    else:
        net = load_checkpoint(path, expected_layout_version=layout.layout_version)
        net.eval()
        if cache is not None:
            cache[path] = net
        logger.info(f"Loaded opponent checkpoint {path} (v{net.version})")
    agent = PolicyAgent(net, mode=CHECKPOINT_MODES[prefix], lookahead_depth=lookahead_depth, record=False)
    agent.name = spec
    return agent
