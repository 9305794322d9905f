"""Default configuration settings."""

import os

_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))


class Config:
    """Base configuration class."""

    # Runs
    SEED = 0
    OUTPUT_DIR = None  # default: ./data/runs/<command>

    # Rules
    RULES_PATH = os.path.join(_ROOT, 'config', 'rules', 'standard.rules')

    # Features
    LOOKAHEAD_DEPTH = 6
    LOOKAHEAD_THRESHOLDS = (1000, 2000, 3900, 7700, 12000)
    LOOKAHEAD_SEARCH_DEPTH = 6  # below LOOKAHEAD_DEPTH, deeper k planes repeat the deepest searched one

    # Policy network
    TRUNK_BLOCKS = 6
    TRUNK_FILTERS = 64
    KERNEL_SIZE = 3

    # Supervised learning
    SL_EPOCHS = 10
    SL_BATCH_SIZE = 256
    SL_LEARNING_RATE = 1e-3
    SL_HOLDOUT_FRACTION = 0.1
    SL_GAMES = 50
    SL_TEACHER = 'scripted'

    # Reward predictor
    REWARD_HIDDEN = 64
    REWARD_EPOCHS = 200
    REWARD_LEARNING_RATE = 1e-2
    REWARD_SCALE = 0.01
    REWARD_GAMES = 200

    # RL trainer
    AGENT_PRESET = 'rl-basic'
    RL_BATCH_SIZE = 64
    RL_LEARNING_RATE = 1e-3
    ENTROPY_ALPHA = 0.01
    ENTROPY_BETA = 0.001
    ENTROPY_TARGET = 1.0
    ENTROPY_WINDOW = 10
    ORACLE_DECAY_UPDATES = 2000
    IS_WEIGHT_MAX = 10.0
    LR_DECAY_AFTER_ORACLE = 0.1
    RL_TRAINABLE_HEADS = ('discard',)
    RL_UPDATES = 1000
    CHECKPOINT_EVERY = 100
    RL_TIMEOUT_SECONDS = 600.0

    # Self-play runtime
    NUM_WORKERS = 2
    BUFFER_CAPACITY = 20000
    REFRESH_EVERY_GAMES = 1
    OPPONENTS = ('scripted', 'scripted', 'scripted')
    STORE_TYPE = 'memory'  # 'memory' or 'sqlite'
    SQLITE_DATABASE_PATH = './data/database/params.db'
    STORE_HISTORY = 8
    FETCH_RETRIES = 5
    FETCH_BACKOFF_SECONDS = 0.05
    SELFPLAY_GAMES = 10

    # Adaptation
    ADAPT_WORLDS = 1000
    ADAPT_STEPS = 5
    ADAPT_LR_FACTOR = 0.1
    ADAPT_RETURN = 'round'  # 'round' or 'game'
    ADAPT_JOBS = 1
    ADAPT_PAIRS = 100

    # Evaluation
    EVAL_GAMES = 10000
    EVAL_AGENT = 'scripted'
    EVAL_OPPONENTS = ('scripted', 'scripted', 'scripted')
    EVAL_DUPLICATE = False
    EVAL_JOBS = 1
    BOOTSTRAP_SAMPLE = 8000
    BOOTSTRAP_RESAMPLES = 1000
    RANKING_LEVEL = '7dan'
    RANKING_ROOM = 'expert'

    # API
    CORS_ORIGINS = '*'

    # Logging
    LOG_LEVEL = 'INFO'
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    LOG_FILE = None
