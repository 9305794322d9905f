"""API endpoint definitions."""

import time

from flask import Blueprint, current_app, jsonify

from .. import __version__
from .responses import format_error_response, format_metrics_response, format_stats_response


api_bp = Blueprint('api', __name__)


@api_bp.route('/health', methods=['GET'])
def health_check():
    """Health check endpoint."""
    runtime = current_app.runtime
    return jsonify({
        'status': 'healthy',
        'version': __version__,
        'running': runtime.running,
        'store_version': runtime.store.latest_version(),
        'timestamp': time.time()
    })


@api_bp.route('/stats', methods=['GET'])
def get_stats():
    """Games per minute, buffer fill and store version of the runtime."""
    try:
        return format_stats_response(current_app.runtime.stats())
    except Exception as e:
        current_app.logger.error(f"Stats error: {str(e)}")
        return format_error_response(str(e), 500)


@api_bp.route('/metrics', methods=['GET'])
def get_metrics():
    """Counters and gauges as ``name value`` lines."""
    try:
        runtime = current_app.runtime
        runtime.stats()
        return format_metrics_response(runtime.metrics.to_line_protocol())
    except Exception as e:
        current_app.logger.error(f"Metrics error: {str(e)}")
        return format_error_response(str(e), 500)
