from pydantic_settings import BaseSettings
from functools import lru_cache
import os


class Settings(BaseSettings):
    # Linear algebra
    rank_tol: float = 1e-8
    spectral_tol: float = 1e-10
    spectral_max_iter: int = 10_000
    orthonormal_tol: float = 1e-10

    # Maurey sampling
    sparsify_max_draws: int = 1_000_000

    # Covering
    exact_cover_max_points: int = 16
    grid_max_size: int = 100_000_000

    # Rademacher / training optimizers
    fd_step: float = 1e-5
    ascent_steps: int = 30
    ascent_lr: float = 0.1
    restarts: int = 20
    train_steps: int = 60
    train_lr: float = 0.05

    # Gap harness
    holdout_size: int = 10_000
    proxy_slack_se: float = 3.0

    # Runner
    threads: int = 0  # 0 = machine cores
    emit_timing: bool = False
    log_level: str = "INFO"

    # Run ledger
    database_url: str = "sqlite:///genbound.db"
    record_runs: bool = False

    @property
    def workers(self) -> int:
        """Thread count with 0 resolved to the machine's cores."""
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    class Config:
        env_file = ".env"
        env_prefix = "GENBOUND_"


@lru_cache()
def get_settings() -> Settings:
    return Settings()
