"""
Structured logging configuration.

Records are single JSON objects on stderr. Engine records carry the slot
and, when one flow is concerned, its flow_id; other records log both as
null.
"""
import logging
import sys
import time
from functools import wraps
from typing import Any, Callable

LOGGER_NAME = "wcsched"

RECORD_FORMAT = (
    '{"time": "%(asctime)s", "level": "%(levelname)s", "module": "%(module)s", '
    '"slot": %(slot)s, "flow_id": %(flow_id)s, "message": "%(message)s"}'
)
CONTEXT_DEFAULTS = {"slot": "null", "flow_id": "null"}


def json_formatter() -> logging.Formatter:
    return logging.Formatter(RECORD_FORMAT, defaults=CONTEXT_DEFAULTS)


def setup_logging(level: str = "INFO") -> logging.Logger:
    """Configure structured logging for the wcsched logger tree."""
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(getattr(logging, level.upper()))

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)  # stdout carries JSON reports
        handler.setFormatter(json_formatter())
        logger.addHandler(handler)

    return logger


def slot_logger(logger: logging.Logger, slot: int, flow_id: int | None = None) -> logging.LoggerAdapter:
    """Adapter that stamps records with the slot and optionally a flow."""
    extra: dict[str, Any] = {"slot": slot}
    if flow_id is not None:
        extra["flow_id"] = flow_id
    return logging.LoggerAdapter(logger, extra)


def log_latency(operation: str) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
    """Decorator to log operation latency."""
    def decorator(func: Callable[..., Any]) -> Callable[..., Any]:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            logger = logging.getLogger(LOGGER_NAME)
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
                latency_ms = (time.perf_counter() - start) * 1000
                logger.info(f"{operation} completed latency_ms={latency_ms:.0f}")
                return result
            except Exception as e:
                latency_ms = (time.perf_counter() - start) * 1000
                logger.error(f"{operation} failed latency_ms={latency_ms:.0f} error={e}")
                raise
        return wrapper
    return decorator
