import os
from pydantic_settings import BaseSettings
import dotenv
dotenv.load_dotenv()

class Settings(BaseSettings):
    # Sieve
    SIEVE_MEMORY_BUDGET: int = 2 ** 27  # bytes of resident smallest-prime-factor table
    SIEVE_SEGMENT_SIZE: int = 2 ** 20
    SIEVE_MAX_LIMIT: int = 2 ** 36

    # Real-number precision
    DECIMAL_PRECISION_BITS: int = 256
    THETA_PRECISION_BITS: int = 128
    MAX_PRECISION_BITS: int = 4096

    # Experiment defaults
    EPSILON: float = 0.05
    LOWER_RANGE_EPSILON: float = 0.1
    GRID_RATIO: int = 2
    TYPE_ESTIMATE_DEPTH: int = 30
    SEED: int = 0
    THREADS: int = os.cpu_count() or 1

    # Reports
    OUTPUT_DIR: str = "data/reports"
    SCHEMA_VERSION: str = "1.0"
    TOOLKIT_VERSION: str = "0.1.0"

    LOG_LEVEL: str = "INFO"

    class Config:
        env_file = ".env"
        extra = "ignore"

settings = Settings()
