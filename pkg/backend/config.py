# config.py - Settings loaded from the environment (.env supported)

import logging
import os

from dotenv import load_dotenv

# Load environment variables FIRST
load_dotenv()

# ========== OUTPUT & PERSISTENCE ==========

OUTPUT_DIR = os.getenv("THREEJ_OUTPUT_DIR", "./screens_out")
DATABASE_URL = os.getenv("THREEJ_DATABASE_URL", "sqlite:///./screen_jobs.db")

# ========== RENDERING ==========

# log10 color range; the published screens use 1e-10 .. 1
FLOOR = float(os.getenv("THREEJ_FLOOR", "1e-10"))
CEILING = float(os.getenv("THREEJ_CEILING", "1.0"))

# ========== NUMERICS ==========

# Largest a+b handed to the exact oracle by `verify`
ORACLE_GUARD = int(os.getenv("THREEJ_ORACLE_GUARD", "64"))
# Caustic samples per unit of J3
CAUSTIC_DENSITY = int(os.getenv("THREEJ_CAUSTIC_DENSITY", "16"))

LOG_LEVEL = os.getenv("THREEJ_LOG_LEVEL", "INFO")

_logging_ready = False


def setup_logging(level=None):
    """Configure the root logger once

    Args:
        level: Level name or number; defaults to THREEJ_LOG_LEVEL
    """
    global _logging_ready
    if _logging_ready:
        return
    logging.basicConfig(
        level=level or LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    _logging_ready = True
