import logging
import os
from dataclasses import dataclass
from fractions import Fraction

from dotenv_flow import dotenv_flow

bwlab_env = os.getenv("BWLAB_ENV", os.getenv("SERVER_ENV", "prod"))
dotenv_flow(bwlab_env)
logging.info(f"Using bwlab environment {bwlab_env}")


@dataclass(frozen=True)
class Settings:
    max_enum_nodes: int
    max_enum_rank: int
    max_search_dim: int
    lll_delta: Fraction
    threads: int
    seed: int
    log_level: str
    database_uri: str


def settings() -> Settings:
    """ Snapshot of the environment configuration. Read on each call so that tests can patch the environment.

    >>> settings().lll_delta > Fraction(1, 4)
    True
    """
    try:
        threads = int(os.getenv("BWLAB_THREADS", os.cpu_count() or 1))
    except ValueError:
        logging.error("BWLAB_THREADS is not an integer, resorting to a single worker")
        threads = 1
    return Settings(
        max_enum_nodes=int(os.getenv("BWLAB_MAX_ENUM_NODES", 20_000_000)),
        max_enum_rank=int(os.getenv("BWLAB_MAX_ENUM_RANK", 16)),
        max_search_dim=int(os.getenv("BWLAB_MAX_SEARCH_DIM", 20)),
        lll_delta=Fraction(os.getenv("BWLAB_LLL_DELTA", "99/100")),
        threads=max(threads, 1),
        seed=int(os.getenv("BWLAB_SEED", 20240601)),
        log_level=os.getenv("BWLAB_LOG_LEVEL", "WARNING"),
        database_uri=os.getenv("DATABASE_URI", "sqlite:///bwlab.db"),
    )
