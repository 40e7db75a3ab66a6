"""Logging configuration for the toolkit."""

import copy
import logging.config
from pathlib import Path

from config.settings import settings

LOGGING_CONFIG = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "standard": {"format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s"},
        "detailed": {
            "format": "%(asctime)s [%(levelname)s] %(name)s:%(funcName)s:%(lineno)d - %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "level": "DEBUG",
            "formatter": "standard",
            # stdout is reserved for JSON reports
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "": {  # Root logger
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
        "src.descriptor_refine": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
    },
}

_FILE_HANDLER = {
    "class": "logging.handlers.RotatingFileHandler",
    "level": "DEBUG",
    "formatter": "detailed",
    "maxBytes": 10485760,  # 10MB
    "backupCount": 5,
}


def build_logging_config(level: str | None = None, log_file: str | None = None) -> dict:
    """Return the dictConfig for the given level and optional log file."""
    config = copy.deepcopy(LOGGING_CONFIG)
    package_logger = config["loggers"]["src.descriptor_refine"]
    package_logger["level"] = (level or settings.LOG_LEVEL).upper()

    log_file = settings.LOG_FILE if log_file is None else log_file
    if log_file:
        config["handlers"]["file"] = {**_FILE_HANDLER, "filename": log_file}
        package_logger["handlers"].append("file")
    return config


def setup_logging(level: str | None = None, log_file: str | None = None):
    """Apply the logging configuration, creating the log directory if needed."""
    config = build_logging_config(level, log_file)
    file_handler = config["handlers"].get("file")
    if file_handler:
        Path(file_handler["filename"]).parent.mkdir(parents=True, exist_ok=True)
    logging.config.dictConfig(config)
