from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="CORNERFLM_", env_file=".env", extra="ignore")

    # Cache
    cache_dir: str = str(Path.home() / ".cache" / "cornerflm")
    use_cache: bool = True

    # Parallelism
    threads: int = 1

    # Product fitting
    min_repeats: int = 3

    # Numerics
    precision_digits: int = 50
    ladder_points: int = 6

    # Enumeration budgets
    max_brute_force_edges: int = 26
    max_brute_force_sites: int = 20
    max_front_width_potts: int = 12
    max_front_width_ising: int = 16

    # Output
    log_level: str = "WARNING"
    show_progress: bool = False


settings = Settings()
