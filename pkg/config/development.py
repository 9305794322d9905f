"""Development environment configuration."""

from .default import Config


class DevelopmentConfig(Config):
    """Desk-scale sizes for quick local runs."""

    DEBUG = True
    TESTING = False

    # Policy network
    TRUNK_BLOCKS = 2
    TRUNK_FILTERS = 16

    # Self-play runtime
    NUM_WORKERS = 1
    BUFFER_CAPACITY = 2000
    SELFPLAY_GAMES = 2
    SL_GAMES = 10
    REWARD_GAMES = 20
    STORE_TYPE = 'memory'
    SQLITE_DATABASE_PATH = './data/database/params_dev.db'

    # Adaptation
    ADAPT_WORLDS = 32
    ADAPT_PAIRS = 20

    # Evaluation
    EVAL_GAMES = 100
    BOOTSTRAP_SAMPLE = 80
    BOOTSTRAP_RESAMPLES = 100

    # Logging
    LOG_LEVEL = 'DEBUG'
    LOG_FILE = './data/logs/development.log'
