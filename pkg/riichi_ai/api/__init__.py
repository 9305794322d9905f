"""Read-only Flask API over a running self-play runtime."""

from .app import create_app

__all__ = ['create_app']
