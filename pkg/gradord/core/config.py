"""
Environment configuration.

Values come from the process environment (optionally a ``.env`` file) and are
validated once through ``Settings``.
"""
import os
import logging
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, validator

from gradord.core.exceptions import ConfigError

# Load environment variables
load_dotenv()

GRADORD_PRECISION = os.getenv("GRADORD_PRECISION", "8")
GRADORD_LOG_LEVEL = os.getenv("GRADORD_LOG_LEVEL", "WARNING")
GRADORD_HULL_MAX_BLOCKS = os.getenv("GRADORD_HULL_MAX_BLOCKS", "6")
GRADORD_ORACLE_MAX_ORDER = os.getenv("GRADORD_ORACLE_MAX_ORDER", "24")
GRADORD_TRACE_BOUND = os.getenv("GRADORD_TRACE_BOUND", "12")
GRADORD_FUZZ_SEED = os.getenv("GRADORD_FUZZ_SEED", "gradord")

MIN_PRECISION = 4
MAX_PRECISION = 64


class Settings(BaseModel):
    precision: int = 8
    log_level: str = "WARNING"
    hull_max_blocks: int = 6
    oracle_max_order: int = 24
    trace_bound: int = 12
    fuzz_seed: str = "gradord"

    class Config:
        frozen = True

    @validator('precision')
    def validate_precision(cls, v):
        if v < MIN_PRECISION or v > MAX_PRECISION:
            raise ValueError(f"Precision must be in [{MIN_PRECISION}, {MAX_PRECISION}] (got {v})")
        return v

    @validator('log_level')
    def validate_log_level(cls, v):
        level = v.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"Unknown log level '{v}'")
        return level

    @validator('hull_max_blocks', 'oracle_max_order', 'trace_bound')
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError(f"Bound must be positive (got {v})")
        return v


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Build the validated settings from the environment.

    Returns:
        The Settings instance

    Raises:
        ConfigError: If a variable is not an integer or out of range
    """
    try:
        return Settings(
            precision=int(GRADORD_PRECISION),
            log_level=GRADORD_LOG_LEVEL,
            hull_max_blocks=int(GRADORD_HULL_MAX_BLOCKS),
            oracle_max_order=int(GRADORD_ORACLE_MAX_ORDER),
            trace_bound=int(GRADORD_TRACE_BOUND),
            fuzz_seed=GRADORD_FUZZ_SEED,
        )
    except ValueError as e:
        raise ConfigError(f"Invalid gradord configuration: {e}") from e
