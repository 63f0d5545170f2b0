"""
Tests for cache module.
"""

import json
import pytest
import sys
import time
from pathlib import Path

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.cache import ResultCache, get_cache


class TestResultCache:
    """Tests for the histogram cache."""

    @pytest.fixture
    def cache(self, tmp_path):
        return ResultCache(cache_dir=str(tmp_path), ttl_hours=1)

    def test_set_get(self, cache):
        """Test storing and reading a histogram."""
        assert cache.set("dp:2x2;m=2;k=2;ff=0;ft=0", [1, 8, 28, 48, 38, 0, 0, 0, 0])
        assert cache.get("dp:2x2;m=2;k=2;ff=0;ft=0") == [1, 8, 28, 48, 38, 0, 0, 0, 0]

    def test_miss(self, cache):
        """Test that unknown keys return None."""
        assert cache.get("dp:unknown") is None

    def test_big_integers_exact(self, cache):
        """Test that counts beyond 64 bits survive."""
        value = [2 ** 80 + 1]
        cache.set("big", value)
        assert cache.get("big") == value

    def test_expired(self, cache):
        """Test that stale entries are dropped on read."""
        cache.set("old", [1])
        path = cache._get_cache_path("old")
        data = json.loads(path.read_text())
        data['cached_at'] = time.time() - 2 * 3600
        path.write_text(json.dumps(data))
        assert cache.get("old") is None
        assert not path.exists()

    def test_cleanup_expired_and_corrupt(self, cache):
        """Test that cleanup removes expired and unreadable entries."""
        cache.set("fresh", [1])
        cache.set("stale", [2])
        stale = cache._get_cache_path("stale")
        data = json.loads(stale.read_text())
        data['cached_at'] = 0
        stale.write_text(json.dumps(data))
        (cache.cache_dir / "broken.cache").write_text("{not json")
        assert cache.cleanup_expired() == 2
        assert cache.get("fresh") == [1]

    def test_clear_and_stats(self, cache):
        """Test clearing and entry counting."""
        cache.set("a", [1])
        cache.set("b", [2])
        assert cache.stats()['total_entries'] == 2
        assert cache.clear() == 2
        assert cache.stats()['total_entries'] == 0


class TestGetCache:
    """Tests for get_cache."""

    def test_disabled(self):
        """Test that an explicit False gives no cache."""
        assert get_cache(False) is None

    def test_config_default_disabled(self):
        """Test that caching is off unless configured."""
        assert get_cache() is None


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
