import hashlib
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, Optional

from cachetools import LRUCache

from .config import settings

logger = logging.getLogger(__name__)

# shared by every cache session in this process
_memory: LRUCache = LRUCache(maxsize=1024)


def cache_key(parts: Iterable) -> str:
    """Stable hash of a key tuple, used as the file name."""
    text = "|".join(str(p) for p in parts)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class EnumerationCache:
    """Canonical-text store for NormalizedZ, one file per key."""

    def __init__(self, directory: Optional[str] = None, enabled: Optional[bool] = None):
        self.directory = Path(directory or settings.cache_dir).expanduser()
        self.enabled = settings.use_cache if enabled is None else enabled
        self.hits = 0
        self.misses = 0

    def _path(self, key: str) -> Path:
        return self.directory / key[:2] / f"{key}.txt"

    def get(self, parts: Iterable) -> Optional[str]:
        if not self.enabled:
            return None
        key = cache_key(parts)
        if key in _memory:
            self.hits += 1
            return _memory[key]
        path = self._path(key)
        if path.exists():
            text = path.read_text(encoding="utf-8")
            _memory[key] = text
            self.hits += 1
            logger.info("cache hit %s", key[:12])
            return text
        self.misses += 1
        logger.info("cache miss %s", key[:12])
        return None

    def put(self, parts: Iterable, text: str) -> None:
        if not self.enabled:
            return
        key = cache_key(parts)
        _memory[key] = text
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)

    def info(self) -> Dict[str, object]:
        files = list(self.directory.glob("*/*.txt")) if self.directory.exists() else []
        return {
            "directory": str(self.directory),
            "enabled": self.enabled,
            "entries": len(files),
            "bytes": sum(f.stat().st_size for f in files),
        }

    def clear(self) -> int:
        removed = 0
        if self.directory.exists():
            for f in self.directory.glob("*/*.txt"):
                f.unlink()
                removed += 1
        _memory.clear()
        logger.info("cleared %d cache entries from %s", removed, self.directory)
        return removed

    def close(self) -> None:
        if self.hits or self.misses:
            logger.debug("cache session: %d hits, %d misses", self.hits, self.misses)


def get_cache(directory: Optional[str] = None, enabled: Optional[bool] = None):
    cache = EnumerationCache(directory, enabled)
    try:
        yield cache
    finally:
        cache.close()
