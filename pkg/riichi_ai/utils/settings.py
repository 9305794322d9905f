"""
Layered runtime settings.

Values are resolved per key from, highest first: explicit overrides
(command-line flags), ``RIICHI_AI_<KEY>`` environment variables (a ``.env``
file is loaded first without replacing variables already set), a
``key = value`` settings file, and the ``Config`` class defaults.
"""

import json
import logging
import os
from types import SimpleNamespace

from dotenv import load_dotenv

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

ENV_PREFIX = 'RIICHI_AI_'


def config_defaults(config_class):
    """Upper-case attributes of a ``Config`` class."""
    return {name: getattr(config_class, name) for name in dir(config_class) if name.isupper()}


def coerce(value, default, key):
    """Convert a string to the type of ``default``."""
    if not isinstance(value, str):
        return value
    try:
        if isinstance(default, bool):
            lowered = value.strip().lower()
            if lowered in ('true', 'yes', '1', 'on'):
                return True
            if lowered in ('false', 'no', '0', 'off'):
                return False
            raise ValueError(value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
        if isinstance(default, (tuple, list)):
            parts = [p.strip() for p in value.split(',') if p.strip()]
            if default and isinstance(default[0], (int, float)) and not isinstance(default[0], bool):
                parts = [type(default[0])(p) for p in parts]
            return tuple(parts)
    except ValueError:
        raise ConfigurationError(f"{key}: cannot read {value!r} as {type(default).__name__}")
    if default is None and value.strip().lower() in ('none', ''):
        return None
    return value


def read_settings_file(path):
    """Raw values of a ``key = value`` settings file, keys upper-cased."""
    from ..core.rules import parse_key_value_text
    if not os.path.exists(path):
        raise ConfigurationError(f"Settings file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        raw = parse_key_value_text(f.read(), source=path)
    return {key.upper(): value for key, value in raw.items()}


def resolve_settings(config_class, settings_file=None, overrides=None, environ=None, dotenv_path=None):
    """
    Merge every settings layer.

    Args:
        config_class: ``Config`` class supplying defaults and value types
        settings_file: Optional ``key = value`` file
        overrides: Dict of explicit values (``None`` entries are ignored)
        environ: Environment mapping (default: ``os.environ`` after loading ``.env``)
        dotenv_path: ``.env`` path (default: searched from the working directory)

    Returns:
        tuple: (``SimpleNamespace`` of settings, dict key -> source layer)

    Raises:
        ConfigurationError: For unknown keys or values of the wrong type
    """
    if environ is None:
        load_dotenv(dotenv_path, override=False)
        environ = os.environ
    defaults = config_defaults(config_class)
    values = dict(defaults)
    sources = {key: 'default' for key in defaults}

    layers = []
    if settings_file:
        layers.append(('file', read_settings_file(settings_file)))
    layers.append(('env', {key[len(ENV_PREFIX):]: value for key, value in environ.items()
                           if key.startswith(ENV_PREFIX)}))
    layers.append(('flag', {key: value for key, value in (overrides or {}).items() if value is not None}))

    for source, layer in layers:
        for key, value in layer.items():
            if key not in defaults:
                if source == 'env':
                    continue
                raise ConfigurationError(f"Unknown setting {key} (from {source})")
            values[key] = coerce(value, defaults[key], key)
            sources[key] = source
    return SimpleNamespace(**values), sources


def settings_dict(settings):
    def plain(value):
        return list(value) if isinstance(value, tuple) else value
    return {key: plain(value) for key, value in sorted(vars(settings).items())}


def write_effective_config(settings, sources, path, **extra):
    """
    Dump the resolved settings with their source layers.

    Returns:
        str: ``path``
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    record = dict(extra)
    record['settings'] = settings_dict(settings)
    record['sources'] = {key: sources[key] for key in sorted(sources) if sources[key] != 'default'}
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(record, f, indent=2, sort_keys=True, default=str)
    logger.info(f"Effective configuration written to {path}")
    return path
