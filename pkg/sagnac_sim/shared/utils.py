import logging
import os
import secrets

from ..cache import RunCache
from ..config import SimulationConfig
from ..experiment import BinRecord, simulate_run
from .constants import THREADS_ENV
from .errors import ConfigError, DomainError

_LOGGER = logging.getLogger(__name__)


def resolve_threads(override: int | None = None) -> int:
    """Worker threads for the cell pool: explicit value, else SAGNAC_SIM_THREADS; 0 means all CPUs."""
    if override is None:
        raw = os.getenv(THREADS_ENV) or "0"
        try:
            override = int(raw)
        except ValueError as exc:
            raise ConfigError([(THREADS_ENV, f"expected an integer, got {raw!r}")]) from exc
    if override < 0:
        raise ConfigError([(THREADS_ENV, f"must be >= 0, got {override}")])
    return override or (os.cpu_count() or 1)


def choose_seed(seed: int | None, config: SimulationConfig) -> tuple[int, bool]:
    """Seed to use and whether it was picked automatically."""
    if seed is not None:
        if not 0 <= seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
        return seed, False
    if config.run.rng_seed is not None:
        return config.run.rng_seed, False
    return secrets.randbits(64), True


def run_records(config: SimulationConfig, seed: int, threads: int = 1, use_cache: bool = False) -> list[BinRecord]:
    """Simulate ``config`` with ``seed``; optionally served from the run cache."""
    run_cfg = config.run.model_copy(update={"rng_seed": seed})
    cache: RunCache | None = None
    key = ""
    if use_cache:
        key = RunCache.fingerprint(config.model_dump_json(exclude={"run": {"rng_seed"}}), seed)
        cache = RunCache.shared()
        records = cache.get(key)
        if records is not None:
            _LOGGER.info("Run cache hit: %s", key)
            return records

    records = simulate_run(
        run_cfg,
        config.geometry,
        config.source,
        config.detector1,
        config.detector2,
        config.rotation,
        threads=threads,
    )
    if cache is not None:
        try:
            cache.set(key, records)
        except Exception as exc:
            _LOGGER.exception(str(exc))
    return records
