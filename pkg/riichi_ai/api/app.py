"""Flask application factory."""

from flask import Flask
from flask_cors import CORS

from ..features.layout import LOOKAHEAD_DEPTH
from ..selfplay.worker import SelfPlayRuntime, WorkerConfig
from ..storage import ReplayBuffer, create_parameter_store
from ..utils.logger import setup_logger


def build_runtime(config):
    """Idle runtime wired from a config object (workers are not started)."""
    store = create_parameter_store(
        config.get('STORE_TYPE', 'memory'),
        db_path=config.get('SQLITE_DATABASE_PATH'),
        history=config.get('STORE_HISTORY', 8),
    )
    buffer = ReplayBuffer(capacity=config.get('BUFFER_CAPACITY', 20000))
    worker_config = WorkerConfig(
        opponents=tuple(config.get('OPPONENTS', ('scripted',) * 3)),
        refresh_every=config.get('REFRESH_EVERY_GAMES', 1),
        lookahead_depth=config.get('LOOKAHEAD_SEARCH_DEPTH', LOOKAHEAD_DEPTH),
        fetch_retries=config.get('FETCH_RETRIES', 5),
        fetch_backoff=config.get('FETCH_BACKOFF_SECONDS', 0.05),
    )
    return SelfPlayRuntime(store, buffer, worker_config, num_workers=config.get('NUM_WORKERS', 2))


def create_app(runtime=None, config_name='development'):
    """
    Create and configure Flask application.

    Args:
        runtime: ``SelfPlayRuntime`` to observe (default: an idle one built from the config)
        config_name: Configuration name ('default', 'development', 'production')

    Returns:
        Flask app instance
    """
    app = Flask(__name__)

    # Load configuration
    config_map = {
        'development': 'config.development.DevelopmentConfig',
        'production': 'config.production.ProductionConfig',
    }

    config_class = config_map.get(config_name, 'config.default.Config')
    app.config.from_object(config_class)

    # Setup CORS
    cors_origins = app.config.get('CORS_ORIGINS', '*')
    CORS(app, origins=cors_origins)

    # Setup logging
    logger = setup_logger(
        log_level=app.config.get('LOG_LEVEL', 'INFO'),
        log_file=app.config.get('LOG_FILE')
    )
    app.logger = logger

    app.runtime = runtime if runtime is not None else build_runtime(app.config)

    # Register blueprints
    from .routes import api_bp
    app.register_blueprint(api_bp, url_prefix='/api/v1')

    # Error handlers
    @app.errorhandler(404)
    def not_found(error):
        return {'error': 'Not found'}, 404

    @app.errorhandler(405)
    def method_not_allowed(error):
        return {'error': 'Method not allowed'}, 405

    @app.errorhandler(500)
    def internal_error(error):
        return {'error': 'Internal server error'}, 500

    logger.info(f"Flask app created with config: {config_name}")

    return app
