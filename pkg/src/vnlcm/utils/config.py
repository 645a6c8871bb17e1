"""
Configuration Utilities

This module provides utilities for loading, validating, and managing the
optimizer configuration.
"""

import argparse
import copy
import importlib.util
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, TypeVar, Union, cast

import yaml

# Type for configuration dictionaries
ConfigDict = Dict[str, Any]
T = TypeVar('T')

# Default configuration
DEFAULT_CONFIG = {
    # General settings
    'general': {
        'log_level': 'info',
        'log_format': 'text',
        'log_dir': None,
        'result_dir': './results',
    },

    # Named pass sequences
    'pipelines': {
        'base': ['mem2reg', 'loop-rotate', 'reassociate', 'mem2reg', 'simplifycfg'],
        'lcm-pre': ['mem2reg', 'loop-rotate', 'reassociate', 'lcm', 'mem2reg', 'simplifycfg'],
    },

    # Optimizer settings
    'optimizer': {
        'jobs': 1,  # worker threads, one function per task
        'validate_after_each_pass': True,
        'check_dataflow': False,
    },

    # Interpreter settings
    'interpreter': {
        'fuel': 10_000_000,  # instructions per run
    },

    # Differential testing
    'diff': {
        'before': 'base',
        'after': 'lcm-pre',
    },
}


def load_config_file(config_path: Union[str, Path]) -> ConfigDict:
    """Load configuration from a file.

    Supports JSON, YAML, and Python files.

    Args:
        config_path: Path to configuration file

    Returns:
        Configuration dictionary

    Raises:
        FileNotFoundError: If the configuration file does not exist
        ValueError: If the configuration file has an unsupported format
    """
    config_path = Path(config_path)

    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    suffix = config_path.suffix.lower()

    if suffix == '.json':
        with open(config_path, 'r') as f:
            return json.load(f)
    elif suffix in ('.yaml', '.yml'):
        with open(config_path, 'r') as f:
            return yaml.safe_load(f) or {}
    elif suffix == '.py':
        spec = importlib.util.spec_from_file_location("config_module", config_path)
        if spec is None or spec.loader is None:
            raise ValueError(f"Could not load Python configuration file: {config_path}")
        config_module = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(config_module)

        # Public plain-data names become sections
        config = {}
        for key in dir(config_module):
            if not key.startswith('_'):
                value = getattr(config_module, key)
                if isinstance(value, (dict, list, str, int, float, bool, type(None))):
                    config[key] = value
        return config
    else:
        raise ValueError(f"Unsupported configuration file format: {suffix}")


def merge_configs(base_config: ConfigDict, override_config: ConfigDict) -> ConfigDict:
    """Merge two configuration dictionaries.

    The override_config values take precedence over base_config values.
    Nested dictionaries are merged recursively; everything else is replaced.

    Args:
        base_config: Base configuration dictionary
        override_config: Override configuration dictionary

    Returns:
        Merged configuration dictionary
    """
    result = copy.deepcopy(base_config)

    for key, value in override_config.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = merge_configs(result[key], value)
        else:
            result[key] = copy.deepcopy(value)

    return result


def get_default_config() -> ConfigDict:
    """Get a fresh copy of the default configuration."""
    return copy.deepcopy(DEFAULT_CONFIG)


def validate_config(config: ConfigDict, schema: Optional[Dict[str, Any]] = None) -> List[str]:
    """Validate a configuration dictionary against a schema.

    Args:
        config: Configuration dictionary to validate
        schema: Schema dictionary (defaults to ``get_config_schema()``)

    Returns:
        List of validation error messages (empty if validation passed)
    """
    if schema is None:
        schema = get_config_schema()

    try:
        import jsonschema
    except ImportError:
        return _basic_validate_config(config, schema)

    validator = jsonschema.Draft7Validator(schema)
    return [
        f"{'.'.join(str(p) for p in error.absolute_path) or '<root>'}: {error.message}"
        for error in sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    ]


def _type_matches(value: Any, type_name: str) -> bool:
    if type_name == 'object':
        return isinstance(value, dict)
    if type_name == 'array':
        return isinstance(value, list)
    if type_name == 'string':
        return isinstance(value, str)
    if type_name == 'integer':
        return isinstance(value, int) and not isinstance(value, bool)
    if type_name == 'number':
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if type_name == 'boolean':
        return isinstance(value, bool)
    if type_name == 'null':
        return value is None
    return True


def _basic_validate_config(config: Dict[str, Any], schema: Dict[str, Any], path: str = '') -> List[str]:
    """Structural validation used when jsonschema is not installed.

    Checks required keys, types, enums, minimums and array items.
    """
    errors = []
    prefix = f"{path}." if path else ''

    for key in schema.get('required', []):
        if key not in config:
            errors.append(f"{prefix}{key}: required property is missing")

    for key, prop_schema in schema.get('properties', {}).items():
        if key not in config:
            continue
        value = config[key]
        where = f"{prefix}{key}"

        types = prop_schema.get('type')
        if types is not None:
            if isinstance(types, str):
                types = [types]
            if not any(_type_matches(value, t) for t in types):
                errors.append(f"{where}: should be {' or '.join(types)}")
                continue

        if 'enum' in prop_schema and value not in prop_schema['enum']:
            errors.append(f"{where}: {value!r} is not one of {prop_schema['enum']}")

        if 'minimum' in prop_schema and isinstance(value, (int, float)) and value < prop_schema['minimum']:
            errors.append(f"{where}: {value} is less than the minimum of {prop_schema['minimum']}")

        if isinstance(value, dict) and 'properties' in prop_schema:
            errors.extend(_basic_validate_config(value, prop_schema, where))

        if isinstance(value, dict) and 'additionalProperties' in prop_schema:
            item_schema = prop_schema['additionalProperties']
            for name, item in value.items():
                errors.extend(_basic_validate_config({name: item}, {'properties': {name: item_schema}}, where))

        if isinstance(value, list) and 'items' in prop_schema:
            item_schema = prop_schema['items']
            for i, item in enumerate(value):
                errors.extend(_basic_validate_config({str(i): item}, {'properties': {str(i): item_schema}}, where))

    return errors


def save_config(config: ConfigDict, file_path: Union[str, Path], format: str = 'json') -> None:
    """Save a configuration dictionary to a file.

    Args:
        config: Configuration dictionary
        file_path: Path to save the configuration file
        format: File format ('json' or 'yaml')

    Raises:
        ValueError: If the format is not supported
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)

    format = format.lower()

    if format == 'json':
        with open(file_path, 'w') as f:
            json.dump(config, f, indent=2)
    elif format in ('yaml', 'yml'):
        with open(file_path, 'w') as f:
            yaml.safe_dump(config, f, default_flow_style=False, sort_keys=False)
    else:
        raise ValueError(f"Unsupported configuration format: {format}")


def get_config_value(
    config: ConfigDict,
    path: str,
    default: Optional[T] = None
) -> Optional[T]:
    """Get a value from a configuration dictionary using a dot-notation path.

    Args:
        config: Configuration dictionary
        path: Dot-notation path (e.g., 'optimizer.jobs')
        default: Default value to return if the path is not found

    Returns:
        Configuration value or default if not found
    """
    current = config
    for part in path.split('.'):
        if isinstance(current, dict) and part in current:
            current = current[part]
        else:
            return default
    return cast(T, current)


def set_config_value(config: ConfigDict, path: str, value: Any) -> None:
    """Set a value in a configuration dictionary using a dot-notation path.

    Creates intermediate dictionaries if they don't exist.
    """
    parts = path.split('.')
    current = config
    for part in parts[:-1]:
        if part not in current or not isinstance(current[part], dict):
            current[part] = {}
        current = current[part]
    current[parts[-1]] = value


def load_config_from_args(args: argparse.Namespace) -> ConfigDict:
    """Load configuration from command-line arguments.

    The defaults are overlaid with the ``--config`` file, then with the
    individual command-line flags.

    Args:
        args: Command-line arguments

    Returns:
        Configuration dictionary
    """
    config = get_default_config()

    if getattr(args, 'config', None):
        config = merge_configs(config, load_config_file(args.config))

    cli_config: ConfigDict = {}

    if getattr(args, 'verbose', False):
        set_config_value(cli_config, 'general.log_level', 'debug')

    if getattr(args, 'log_format', None):
        set_config_value(cli_config, 'general.log_format', args.log_format)

    if getattr(args, 'log_dir', None):
        set_config_value(cli_config, 'general.log_dir', args.log_dir)

    if getattr(args, 'jobs', None):
        set_config_value(cli_config, 'optimizer.jobs', args.jobs)

    if getattr(args, 'fuel', None):
        set_config_value(cli_config, 'interpreter.fuel', args.fuel)

    if getattr(args, 'check', False):
        set_config_value(cli_config, 'optimizer.check_dataflow', True)

    return merge_configs(config, cli_config)


def get_config_schema() -> Dict[str, Any]:
    """Get the JSON schema for configuration validation."""
    pass_list = {"type": "array", "items": {"type": "string"}}
    return {
        "type": "object",
        "required": ["general", "pipelines", "optimizer", "interpreter", "diff"],
        "properties": {
            "general": {
                "type": "object",
                "properties": {
                    "log_level": {"type": "string", "enum": ["debug", "info", "warning", "error", "critical"]},
                    "log_format": {"type": "string", "enum": ["text", "json"]},
                    "log_dir": {"type": ["string", "null"]},
                    "result_dir": {"type": "string"},
                }
            },
            "pipelines": {
                "type": "object",
                "additionalProperties": pass_list,
            },
            "optimizer": {
                "type": "object",
                "properties": {
                    "jobs": {"type": "integer", "minimum": 1},
                    "validate_after_each_pass": {"type": "boolean"},
                    "check_dataflow": {"type": "boolean"},
                }
            },
            "interpreter": {
                "type": "object",
                "properties": {
                    "fuel": {"type": "integer", "minimum": 1},
                }
            },
            "diff": {
                "type": "object",
                "properties": {
                    "before": {"type": "string"},
                    "after": {"type": "string"},
                }
            },
        }
    }
