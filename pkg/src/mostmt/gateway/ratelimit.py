"""Per-client token-bucket rate limiting.

Each client id gets its own bucket refilled continuously at the configured
rate; a client whose sustained rate stays below it is never rejected.
Requests without a client id share one anonymous bucket.
"""

from __future__ import annotations

import threading
import time

ANONYMOUS = "<anonymous>"


class TokenBucketLimiter:
    def __init__(self, rate_per_sec: float, burst: float | None = None, clock=None):
        self.rate = float(rate_per_sec)
        self.burst = float(burst) if burst else max(1.0, self.rate)
        self._clock = clock or time.monotonic
        self._buckets: dict[str, tuple[float, float]] = {}  # id -> (tokens, stamp)
        self._lock = threading.Lock()

    @property
    def enabled(self) -> bool:
        return self.rate > 0

    def try_acquire(self, client_id: str | None = None) -> bool:
        """Take one token; False means the caller should answer 429."""
        if not self.enabled:
            return True
        key = client_id or ANONYMOUS
        now = self._clock()
        with self._lock:
            tokens, stamp = self._buckets.get(key, (self.burst, now))
            tokens = min(self.burst, tokens + (now - stamp) * self.rate)
            if tokens >= 1.0:
                self._buckets[key] = (tokens - 1.0, now)
                return True
            self._buckets[key] = (tokens, now)
            return False

    def retry_after(self) -> float:
        """Rough wait until one token is available again."""
        return 1.0 / self.rate if self.enabled else 0.0
