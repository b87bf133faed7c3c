import time

from fedlog.cache import ResultCache, cache_key
from fedlog.datalog import parse_query


def test_put_get_roundtrip():
    cache = ResultCache()
    cache.put("k", {"rows": 3})
    assert cache.get("k") == {"rows": 3}
    assert cache.get("missing") is None


def test_ttl_expiry():
    cache = ResultCache(ttl_seconds=0.05)
    cache.put("k", 1)
    assert cache.get("k") == 1
    time.sleep(0.06)
    assert cache.get("k") is None
    assert len(cache) == 0  # expired entry is dropped, not kept


def test_per_entry_ttl_override():
    cache = ResultCache(ttl_seconds=100)
    cache.put("short", 1, ttl=0.05)
    cache.put("long", 2)
    time.sleep(0.06)
    assert cache.get("short") is None
    assert cache.get("long") == 2


def test_lru_eviction_prefers_recently_used():
    cache = ResultCache(max_entries=2)
    cache.put("a", 1)
    cache.put("b", 2)
    assert cache.get("a") == 1  # refresh "a"
    cache.put("c", 3)  # evicts "b"
    assert cache.get("a") == 1
    assert cache.get("b") is None
    assert cache.get("c") == 3


def test_clear():
    cache = ResultCache()
    cache.put("a", 1)
    cache.clear()
    assert cache.get("a") is None


def test_cache_key_ignores_whitespace_layout():
    a = parse_query("?(X):- attribute:a(X,<1>),attribute:b(X,Y).",
                    require_safety=False)
    b = parse_query(
        """
?(X):-
    attribute:a(X,<1>),
    attribute:b(X,Y).
""",
        require_safety=False,
    )
    assert cache_key(a) == cache_key(b)


def test_cache_key_distinguishes_constants():
    a = parse_query("?(X):- attribute:a(X,<100>).")
    b = parse_query("?(X):- attribute:a(X,<102>).")
    assert cache_key(a) != cache_key(b)


def test_cache_key_distinguishes_atom_order():
    a = parse_query("?(X):- attribute:a(X,<1>), attribute:b(X,<1>).")
    b = parse_query("?(X):- attribute:b(X,<1>), attribute:a(X,<1>).")
    assert cache_key(a) != cache_key(b)
