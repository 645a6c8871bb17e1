"""
Logging Utilities

This module provides standardized logging configuration for the optimizer
and a structured logger for pipeline runs.
"""

import json
import logging
import logging.handlers
import os
import sys
import time
from datetime import datetime
from typing import Any, Dict, List, Optional, Union


# Default log format
DEFAULT_LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
DEFAULT_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# Log levels dictionary for easier configuration
LOG_LEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
    'critical': logging.CRITICAL
}


def _resolve_level(log_level: Union[str, int]) -> int:
    if isinstance(log_level, str):
        return LOG_LEVELS.get(log_level.lower(), logging.INFO)
    return log_level


def _attach_handlers(
    logger: logging.Logger,
    formatter: logging.Formatter,
    level: int,
    log_file: Optional[str],
    console: bool,
    file_size_limit: int,
    backup_count: int
) -> None:
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=file_size_limit,
            backupCount=backup_count
        )
        file_handler.setFormatter(formatter)
        file_handler.setLevel(level)
        logger.addHandler(file_handler)

    # Diagnostics go to stderr; stdout carries IR and reports
    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        console_handler.setLevel(level)
        logger.addHandler(console_handler)


def setup_logger(
    name: str,
    log_level: Union[str, int] = 'info',
    log_file: Optional[str] = None,
    console: bool = True,
    log_format: str = DEFAULT_LOG_FORMAT,
    date_format: str = DEFAULT_DATE_FORMAT,
    file_size_limit: int = 10 * 1024 * 1024,  # 10 MB
    backup_count: int = 5
) -> logging.Logger:
    """Set up a logger with file and/or console handlers.

    Args:
        name: Logger name
        log_level: Logging level ('debug', 'info', 'warning', 'error', 'critical')
        log_file: Path to log file (if None, file logging is disabled)
        console: Whether to enable console logging
        log_format: Log format string
        date_format: Date format string
        file_size_limit: Maximum log file size in bytes before rotation
        backup_count: Number of backup log files to keep

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    level = _resolve_level(log_level)
    logger.setLevel(level)
    _attach_handlers(logger, logging.Formatter(log_format, date_format), level,
                     log_file, console, file_size_limit, backup_count)
    return logger


class JsonFormatter(logging.Formatter):
    """JSON formatter for structured logging."""

    def __init__(
        self,
        include_timestamp: bool = True,
        include_logger_name: bool = True,
        include_level: bool = True,
        include_location: bool = False,
        additional_fields: Optional[Dict[str, Any]] = None
    ):
        """Initialize the JSON formatter.

        Args:
            include_timestamp: Whether to include timestamp in JSON log
            include_logger_name: Whether to include logger name in JSON log
            include_level: Whether to include log level in JSON log
            include_location: Whether to include path, function and line
            additional_fields: Additional fields to include in JSON log
        """
        super().__init__()
        self.include_timestamp = include_timestamp
        self.include_logger_name = include_logger_name
        self.include_level = include_level
        self.include_location = include_location
        self.additional_fields = additional_fields or {}

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {'message': record.getMessage()}

        if self.include_timestamp:
            log_data['timestamp'] = int(record.created * 1000)  # milliseconds
            log_data['time'] = datetime.fromtimestamp(record.created).strftime('%Y-%m-%d %H:%M:%S.%f')[:-3]

        if self.include_level:
            log_data['level'] = record.levelname

        if self.include_logger_name:
            log_data['logger'] = record.name

        if self.include_location:
            log_data['path'] = record.pathname
            log_data['function'] = record.funcName
            log_data['line'] = record.lineno

        # Structured payload passed through ``extra={'event': {...}}``
        event = getattr(record, 'event', None)
        if isinstance(event, dict):
            log_data.update(event)

        for key, value in self.additional_fields.items():
            log_data[key] = value

        if record.exc_info:
            log_data['exception'] = {
                'type': record.exc_info[0].__name__,
                'message': str(record.exc_info[1]),
                'traceback': self.formatException(record.exc_info)
            }

        return json.dumps(log_data, default=str)


def setup_json_logger(
    name: str,
    log_level: Union[str, int] = 'info',
    log_file: Optional[str] = None,
    console: bool = True,
    additional_fields: Optional[Dict[str, Any]] = None,
    include_location: bool = False,
    file_size_limit: int = 10 * 1024 * 1024,  # 10 MB
    backup_count: int = 5
) -> logging.Logger:
    """Set up a logger with JSON formatting.

    Takes the same arguments as ``setup_logger`` apart from the format
    strings, plus the JsonFormatter options.
    """
    logger = logging.getLogger(name)
    level = _resolve_level(log_level)
    logger.setLevel(level)
    formatter = JsonFormatter(include_location=include_location, additional_fields=additional_fields)
    _attach_handlers(logger, formatter, level, log_file, console, file_size_limit, backup_count)
    return logger


def configure_logging(config: Dict[str, Any]) -> logging.Logger:
    """Configure the ``vnlcm`` logger hierarchy from the ``general`` section."""
    general = config.get('general', {})
    log_dir = general.get('log_dir')
    log_file = os.path.join(log_dir, 'vnlcm.log') if log_dir else None
    if general.get('log_format', 'text') == 'json':
        return setup_json_logger('vnlcm', general.get('log_level', 'info'), log_file)
    return setup_logger('vnlcm', general.get('log_level', 'info'), log_file)


class PipelineLogger:
    """Structured record of one pipeline run.

    Collects pass events and metrics as dictionaries; ``finish`` returns the
    summary and, when a log directory is given, writes it as JSON.
    """

    def __init__(
        self,
        run_name: str,
        log_dir: Optional[str] = None,
        include_timestamp: bool = True
    ):
        self.run_name = run_name
        self.log_dir = log_dir
        self.include_timestamp = include_timestamp
        self.timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        self.logger = logging.getLogger(f'vnlcm.run.{run_name}')

        self.events: List[Dict[str, Any]] = []
        self.metrics: List[Dict[str, Any]] = []
        self.configuration: Dict[str, Any] = {}
        self.metadata: Dict[str, Any] = {
            'run_name': run_name,
            'start_time': time.time(),
            'end_time': None,
            'duration': None
        }

    def _get_log_file_path(self, extension: str) -> str:
        if self.include_timestamp:
            filename = f"{self.run_name}_{self.timestamp}.{extension}"
        else:
            filename = f"{self.run_name}.{extension}"
        return os.path.join(self.log_dir or '.', filename)

    def set_configuration(self, config: Dict[str, Any]) -> None:
        self.configuration = config
        self.logger.debug(f"Configuration: {json.dumps(config, default=str)}")

    def log_event(
        self,
        event_type: str,
        message: str,
        data: Optional[Dict[str, Any]] = None,
        level: str = 'info'
    ) -> None:
        """Record an event and forward it to the logger.

        Args:
            event_type: Event type ('pass_start', 'pass_result', ...)
            message: Human-readable message
            data: Optional event payload
            level: Log level
        """
        event: Dict[str, Any] = {
            'type': 'event',
            'event_type': event_type,
            'message': message,
            'timestamp': time.time(),
            'level': level
        }
        if data:
            event['data'] = data
        self.events.append(event)
        self.logger.log(LOG_LEVELS.get(level, logging.INFO), message,
                        extra={'event': {'event_type': event_type, 'data': data or {}}})

    def pass_start(self, pass_name: str, function: str) -> None:
        self.log_event('pass_start', f"{pass_name} on @{function}",
                       {'pass': pass_name, 'function': function}, level='debug')

    def pass_result(self, result: Any) -> None:
        data = result.to_dict()
        self.log_event('pass_result',
                       f"{result.name} on @{result.function}: changed={result.changed} {result.counters}",
                       data, level='debug')

    def validation_error(self, pass_name: str, function: str, diagnostics: List[str]) -> None:
        self.log_event('validation_error',
                       f"IR invalid after {pass_name} on @{function}: {len(diagnostics)} problem(s)",
                       {'pass': pass_name, 'function': function, 'diagnostics': diagnostics},
                       level='error')

    def log_metric(
        self,
        name: str,
        value: Union[float, int, str],
        function: Optional[str] = None
    ) -> None:
        metric: Dict[str, Any] = {'name': name, 'value': value, 'timestamp': time.time()}
        if function is not None:
            metric['function'] = function
        self.metrics.append(metric)
        where = f" (@{function})" if function else ''
        self.logger.debug(f"Metric {name}{where}: {value}")

    def finish(self) -> Dict[str, Any]:
        """Close the run and return its summary."""
        self.metadata['end_time'] = time.time()
        self.metadata['duration'] = self.metadata['end_time'] - self.metadata['start_time']

        summary = {
            'metadata': self.metadata,
            'configuration': self.configuration,
            'events': self.events,
            'metrics': self.metrics,
        }

        if self.log_dir:
            os.makedirs(self.log_dir, exist_ok=True)
            results_file = self._get_log_file_path('json')
            with open(results_file, 'w') as f:
                json.dump(summary, f, indent=2, default=str)
            self.logger.info(f"Run summary saved to {results_file}")

        self.logger.debug(f"Run {self.run_name} completed in {self.metadata['duration']:.3f} seconds")
        return summary
