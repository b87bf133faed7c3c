"""Result cache keyed by a hash of the canonical query text.

TTL expiry is checked at read time; capacity eviction is LRU.  Safe for
concurrent use from multiple query executions.
"""

from __future__ import annotations

import hashlib
import threading
import time
from collections import OrderedDict
from typing import Any, Optional

from .datalog import DatalogQuery, print_canonical

DEFAULT_TTL_SECONDS = 30.0
DEFAULT_MAX_ENTRIES = 1024


def cache_key(query: DatalogQuery) -> str:
    """128-bit hash of the canonical text; whitespace variants collide."""
    text = print_canonical(query)
    return hashlib.blake2b(text.encode("utf-8"), digest_size=16).hexdigest()


class ResultCache:
    def __init__(
        self,
        ttl_seconds: float = DEFAULT_TTL_SECONDS,
        max_entries: int = DEFAULT_MAX_ENTRIES,
    ):
        self.ttl_seconds = ttl_seconds
        self.max_entries = max_entries
        self._store: OrderedDict[str, tuple[float, Any]] = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key: str) -> Optional[Any]:
        now = time.monotonic()
        with self._lock:
            entry = self._store.get(key)
            if entry is None:
                return None
            expires_at, value = entry
            if now >= expires_at:
                del self._store[key]
                return None
            self._store.move_to_end(key)
            return value

    def put(self, key: str, value: Any, ttl: Optional[float] = None) -> None:
        ttl = self.ttl_seconds if ttl is None else ttl
        with self._lock:
            self._store[key] = (time.monotonic() + ttl, value)
            self._store.move_to_end(key)
            while len(self._store) > self.max_entries:
                self._store.popitem(last=False)

    def clear(self) -> None:
        with self._lock:
            self._store.clear()

    def __len__(self) -> int:
        with self._lock:
            return len(self._store)
