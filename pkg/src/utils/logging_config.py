"""
Logging configuration for the cantor-ei toolkit
"""

import logging
import logging.handlers
import sys
import time
from pathlib import Path
from typing import Optional


LEVEL_COLORS = {
    'DEBUG': '\033[36m',
    'INFO': '\033[32m',
    'WARNING': '\033[33m',
    'ERROR': '\033[31m',
    'CRITICAL': '\033[35m',
}
RESET = '\033[0m'

CONSOLE_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)s | %(message)s'
FILE_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)s:%(lineno)d | %(message)s'

# (file name, handler level, logger it attaches to)
LOG_FILES = (
    ('cantor_ei.log', logging.DEBUG, ''),
    ('errors.log', logging.ERROR, ''),
    ('performance.log', logging.INFO, 'cantor_ei.performance'),
)

COMPONENTS = ('exact', 'theory', 'digraph', 'dynamics', 'estimation', 'services', 'cli')


class CantorEIFormatter(logging.Formatter):
    """Console formatter; colors level names on a terminal"""

    def format(self, record):
        if getattr(sys.stderr, 'isatty', lambda: False)():
            record = logging.makeLogRecord(record.__dict__)
            color = LEVEL_COLORS.get(record.levelname, RESET)
            record.levelname = f"{color}{record.levelname}{RESET}"
        return super().format(record)


def _rotating_handler(path: Path, level: int, max_bytes: int, backup_count: int) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        path, maxBytes=max_bytes, backupCount=backup_count, encoding='utf-8'
    )
    handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt='%Y-%m-%d %H:%M:%S'))
    handler.setLevel(level)
    return handler


def setup_logging(
    log_level: str = "INFO",
    log_dir: Optional[str] = None,
    enable_file_logging: bool = False,
    quiet: bool = False,
    max_bytes: int = 10 * 1024 * 1024,
    backup_count: int = 5
):
    """
    Route cantor_ei logs to stderr, and optionally to rotating files

    Args:
        log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL
        log_dir: Directory for log files, 'logs' when omitted
        enable_file_logging: Also write cantor_ei.log, errors.log and performance.log
        quiet: Show only warnings and errors on the console
        max_bytes: Rotation size per file
        backup_count: Rotated files kept per log
    """
    level = getattr(logging, log_level.upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    perf_logger = logging.getLogger('cantor_ei.performance')
    for handler in perf_logger.handlers[:]:
        perf_logger.removeHandler(handler)

    # stdout carries data
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(CantorEIFormatter(CONSOLE_FORMAT, datefmt='%H:%M:%S'))
    console_handler.setLevel(max(level, logging.WARNING) if quiet else level)
    root_logger.addHandler(console_handler)

    log_path = Path(log_dir) if log_dir is not None else Path("logs")
    if enable_file_logging:
        log_path.mkdir(parents=True, exist_ok=True)
        for file_name, file_level, logger_name in LOG_FILES:
            logging.getLogger(logger_name).addHandler(
                _rotating_handler(log_path / file_name, file_level, max_bytes, backup_count)
            )

    for component in COMPONENTS:
        logging.getLogger(f'cantor_ei.{component}').setLevel(logging.NOTSET)
    logging.getLogger('concurrent.futures').setLevel(logging.WARNING)

    logger = get_logger('logging')
    logger.debug(f"Logging initialized - Level: {log_level}, File logging: {enable_file_logging}")
    if enable_file_logging:
        logger.debug(f"Log files directory: {log_path.absolute()}")


class PerformanceLogger:
    """Context manager for performance logging"""

    def __init__(self, operation_name: str, logger_name: str = 'cantor_ei.performance'):
        self.operation_name = operation_name
        self.logger = logging.getLogger(logger_name)
        self.start_time = None
        self.duration = None

    def __enter__(self):
        self.start_time = time.perf_counter()
        self.logger.debug(f"Started: {self.operation_name}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.start_time is not None:
            self.duration = time.perf_counter() - self.start_time
            if exc_type is None:
                self.logger.info(f"Completed: {self.operation_name} in {self.duration:.3f}s")
            else:
                self.logger.error(f"Failed: {self.operation_name} after {self.duration:.3f}s - {exc_val}")


def get_logger(name: str) -> logging.Logger:
    """Get a logger with the cantor_ei prefix"""
    return logging.getLogger(f"cantor_ei.{name}")


def log_exact_operation(operation: str, duration: float, components: Optional[int] = None):
    """Log an exact set computation"""
    logger = get_logger('exact')
    message = f"{operation} completed in {duration:.3f}s"
    if components is not None:
        message += f" ({components} components)"
    logger.debug(message)


def log_simulation(map_id: str, orbits: int, length: int, duration: float):
    """Log ensemble simulation throughput"""
    logger = get_logger('services')
    logger.info(f"Simulated {orbits} orbits of length {length} for {map_id} in {duration:.3f}s")
