# config/settings.py
"""Application settings module."""

import os
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / ".env")

_PREFIX = "DESCRIPTOR_REFINE_"


def _env(name: str, default: str) -> str:
    return os.environ.get(f"{_PREFIX}{name}", default)


class Settings:
    """Toolkit settings loaded from environment variables."""

    # Numerical tolerances
    RANK_RTOL = float(_env("RANK_RTOL", "1e-10"))
    RESIDUAL_ATOL = float(_env("RESIDUAL_ATOL", "1e-9"))

    # Simulation settings
    COMPARE_BOUND = float(_env("COMPARE_BOUND", "1e-8"))
    HORIZON_CAP = int(_env("HORIZON_CAP", "10000"))
    SEED = int(_env("SEED", "0"))

    # Finite-horizon certificate run by the refinement pipeline
    CERTIFY_HORIZON = int(_env("CERTIFY_HORIZON", "20"))
    CERTIFY_SAMPLES = int(_env("CERTIFY_SAMPLES", "5"))

    # Logging settings
    LOG_LEVEL = _env("LOG_LEVEL", "INFO")
    LOG_FILE = _env("LOG_FILE", "")


settings = Settings()
