from __future__ import annotations

import atexit
import hashlib
import logging
import os
import pathlib
import sys
import threading
from typing import Any, ClassVar

import diskcache
from cachetools import LRUCache

from .shared.constants import CACHE_DIR_ENV

_LOGGER = logging.getLogger(__name__)


def default_cache_dir() -> pathlib.Path:
    override = os.getenv(CACHE_DIR_ENV)
    if override:
        return pathlib.Path(override)
    home = pathlib.Path.home()
    name = __package__ or "sagnac_sim"
    if sys.platform == "win32":
        return home / "AppData" / "Local" / "Cache" / name
    return home / ".cache" / name


class RunCache:
    """Records of finished runs by fingerprint: a bounded memory layer over one disk store.

    Runs are deterministic in (config, seed), so entries never go stale and carry no TTL.
    """

    _shared: ClassVar[RunCache | None] = None
    _shared_lock: ClassVar[threading.Lock] = threading.Lock()

    def __init__(self, directory: pathlib.Path, maxsize: int = 8) -> None:
        self.directory = directory
        self.memory: LRUCache[str, Any] = LRUCache(maxsize=maxsize)
        self.disk = diskcache.Cache(str(directory))
        self._lock = threading.Lock()

    @classmethod
    def shared(cls) -> RunCache:
        """Process-wide store; reopened when SAGNAC_SIM_CACHE_DIR points elsewhere."""
        directory = default_cache_dir()
        with cls._shared_lock:
            if cls._shared is None or cls._shared.directory != directory:
                if cls._shared is not None:
                    cls._shared.close()
                _LOGGER.debug("Opening run cache at %s", directory)
                cls._shared = cls(directory)
            return cls._shared

    @classmethod
    def reset(cls) -> None:
        with cls._shared_lock:
            if cls._shared is not None:
                cls._shared.close()
            cls._shared = None

    @staticmethod
    def fingerprint(config_json: str, seed: int) -> str:
        payload = f"{config_json}::seed={seed}".encode("utf-8")
        return "run-" + hashlib.sha256(payload).hexdigest()

    def get(self, key: str) -> Any:
        with self._lock:
            if key in self.memory:
                return self.memory[key]
        value = self.disk.get(key)
        if value is not None:
            with self._lock:
                self.memory[key] = value
        return value

    def set(self, key: str, value: Any) -> Any:
        with self._lock:
            self.memory[key] = value
        self.disk.set(key, value)
        return value

    def __len__(self) -> int:
        return len(self.disk)

    def close(self) -> None:
        self.memory.clear()
        self.disk.close()


atexit.register(RunCache.reset)
