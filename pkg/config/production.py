"""Production environment configuration."""

from .default import Config


class ProductionConfig(Config):
    """Longer runs with a durable parameter store."""

    DEBUG = False
    TESTING = False

    # Self-play runtime
    NUM_WORKERS = 8
    BUFFER_CAPACITY = 200000
    STORE_TYPE = 'sqlite'
    SQLITE_DATABASE_PATH = './data/database/params.db'

    # RL trainer
    RL_BATCH_SIZE = 256
    RL_UPDATES = 50000
    CHECKPOINT_EVERY = 1000

    # Adaptation
    ADAPT_JOBS = 4

    # Logging
    LOG_LEVEL = 'INFO'
    LOG_FILE = './data/logs/production.log'

    # API
    CORS_ORIGINS = []  # Specify allowed origins
