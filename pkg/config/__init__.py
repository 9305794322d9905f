"""Configuration package for the riichi_ai pipeline."""

from .default import Config
from .development import DevelopmentConfig
from .production import ProductionConfig

CONFIGS = {
    'default': Config,
    'development': DevelopmentConfig,
    'production': ProductionConfig,
}


def get_config(name='default'):
    """
    Look up a configuration class by name.

    Args:
        name: 'default', 'development' or 'production'

    Returns:
        type: Configuration class
    """
    try:
        return CONFIGS[name]
    except KeyError:
        from riichi_ai.utils.exceptions import ConfigurationError
        raise ConfigurationError(f"Unknown configuration: {name}")
