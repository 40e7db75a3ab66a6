"""Tests for logging and settings configuration."""

import logging

from config.logging import build_logging_config, setup_logging
from config.settings import Settings


def test_logging_config_defaults():
    config = build_logging_config("debug", "")
    assert config["loggers"]["src.descriptor_refine"]["level"] == "DEBUG"
    assert "file" not in config["handlers"]


def test_logging_config_with_file(tmp_path):
    log_file = tmp_path / "logs" / "refine.log"
    config = build_logging_config("info", str(log_file))
    assert config["handlers"]["file"]["filename"] == str(log_file)
    assert "file" in config["loggers"]["src.descriptor_refine"]["handlers"]


def test_setup_logging_creates_log_directory(tmp_path):
    log_file = tmp_path / "logs" / "refine.log"
    setup_logging("INFO", str(log_file))
    logging.getLogger("src.descriptor_refine.test").info("configured")
    assert log_file.exists()
    for name in ("", "src.descriptor_refine"):
        for handler in logging.getLogger(name).handlers:
            handler.close()
        logging.getLogger(name).handlers.clear()


def test_settings_defaults():
    settings = Settings()
    assert settings.RANK_RTOL == 1e-10
    assert settings.RESIDUAL_ATOL == 1e-9
    assert settings.HORIZON_CAP >= 100
