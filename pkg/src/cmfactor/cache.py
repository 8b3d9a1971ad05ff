"""Content-addressed JSON cache for computed series and tables."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)

CACHE_ENV = "CMFACTOR_CACHE"
FORMAT_VERSION = 1


class CacheCorruption(RuntimeError):
    pass


def cache_dir() -> Path:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else Path.home() / ".cache" / "cmfactor"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def cache_key(producer: str, params: dict) -> str:
    blob = canonical_json({"producer": producer, "params": params, "version": FORMAT_VERSION})
    return hashlib.sha256(blob.encode()).hexdigest()


class SeriesCache:
    def __init__(self, root: Path | str | None = None, enabled: bool = True):
        self.root = Path(root) if root is not None else cache_dir()
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def _read(self, key: str):
        p = self.path(key)
        if not p.exists():
            return None
        raw = p.read_text()
        try:
            wrapper = json.loads(raw)
            body = wrapper["body"]
            if hashlib.sha256(body.encode()).hexdigest() != wrapper["sha256"]:
                raise CacheCorruption(f"checksum mismatch in {p}")
            return json.loads(body)
        except (ValueError, KeyError, TypeError, CacheCorruption) as exc:
            log.warning("discarding corrupted cache entry %s: %s", p, exc)
            return None

    def _write(self, key: str, value) -> None:
        p = self.path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        body = canonical_json(value)
        wrapper = canonical_json({"sha256": hashlib.sha256(body.encode()).hexdigest(), "body": body})
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(wrapper)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def get_or_compute(self, producer: str, params: dict, compute, encode=lambda x: x, decode=lambda x: x):
        """Return decode(stored) on a hit; otherwise compute, store encode(value) and return it."""
        if not self.enabled:
            return compute()
        key = cache_key(producer, params)
        stored = self._read(key)
        if stored is not None:
            self.hits += 1
            return decode(stored)
        self.misses += 1
        value = compute()
        self._write(key, encode(value))
        return value

    def raw_bytes(self, producer: str, params: dict) -> bytes | None:
        p = self.path(cache_key(producer, params))
        return p.read_bytes() if p.exists() else None
