"""Response formatting utilities."""

from flask import Response, jsonify


def format_stats_response(stats):
    """
    Format a runtime stats snapshot.

    Args:
        stats: Dict from ``SelfPlayRuntime.stats``

    Returns:
        Flask JSON response
    """
    response = dict(stats)
    if response.get('games_per_minute') is not None:
        response['games_per_minute'] = round(response['games_per_minute'], 3)
    response['buffer_fill'] = round(response.get('buffer_fill', 0.0), 4)
    return jsonify(response)


def format_metrics_response(text):
    """Plain-text line protocol."""
    return Response(text, mimetype='text/plain')


def format_error_response(error_message, status_code=400):
    """
    Format error response.

    Args:
        error_message: Error message string
        status_code: HTTP status code

    Returns:
        Flask JSON response with status code
    """
    return jsonify({
        'error': error_message,
        'status': status_code
    }), status_code
