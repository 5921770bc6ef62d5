"""Shared request batcher: the single serialization point per backend.

Segments from concurrent requests queue up here; a worker thread dispatches
a batch as soon as it is full or the oldest waiting segment has waited the
configured maximum. Results travel back to their originating requests
through per-segment futures, so request order is never disturbed.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from concurrent.futures import Future


class QueueFullError(RuntimeError):
    def __init__(self, retry_after: float):
        super().__init__("translation queue is full")
        self.retry_after = retry_after


class BatchingExecutor:
    def __init__(
        self,
        translate_batch,
        max_batch: int = 8,
        max_wait: float = 0.05,
        queue_cap: int = 1000,
    ):
        if max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        if max_wait < 0:
            raise ValueError("max_wait must be >= 0")
        self._translate_batch = translate_batch
        self.max_batch = max_batch
        self.max_wait = max_wait
        self.queue_cap = queue_cap
        self._queue: deque[tuple[float, str, Future]] = deque()
        self._lock = threading.Lock()
        self._wakeup = threading.Condition(self._lock)
        self._closed = False
        # Observability for tests and ops: batch sizes and realized waits.
        self.dispatched_batches = 0
        self.max_observed_batch = 0
        self.max_observed_wait = 0.0
        self._worker = threading.Thread(
            target=self._run, name="mostmt-batcher", daemon=True
        )
        self._worker.start()

    def submit(self, text: str) -> Future:
        future: Future = Future()
        with self._wakeup:
            if self._closed:
                raise RuntimeError("executor is closed")
            if len(self._queue) >= self.queue_cap:
                raise QueueFullError(retry_after=self.max_wait or 0.05)
            self._queue.append((time.monotonic(), text, future))
            self._wakeup.notify()
        return future

    def translate_texts(self, texts: list[str]) -> list[str]:
        """Submit a request's segments in order and wait for all of them."""
        futures = [self.submit(t) for t in texts]
        return [f.result() for f in futures]

    def _take_batch(self) -> list[tuple[float, str, Future]]:
        """Block until a batch is due, then pop it. Runs in the worker."""
        with self._wakeup:
            while True:
                if self._closed and not self._queue:
                    return []
                if len(self._queue) >= self.max_batch:
                    break
                if self._queue:
                    oldest_age = time.monotonic() - self._queue[0][0]
                    remaining = self.max_wait - oldest_age
                    if remaining <= 0 or self._closed:
                        break
                    self._wakeup.wait(timeout=remaining)
                else:
                    self._wakeup.wait(timeout=0.5)
            batch = []
            while self._queue and len(batch) < self.max_batch:
                batch.append(self._queue.popleft())
            return batch

    def _run(self):
        while True:
            batch = self._take_batch()
            if not batch:
                if self._closed:
                    return
                continue
            now = time.monotonic()
            self.dispatched_batches += 1
            self.max_observed_batch = max(self.max_observed_batch, len(batch))
            self.max_observed_wait = max(
                self.max_observed_wait, now - batch[0][0]
            )
            texts = [text for _, text, _ in batch]
            try:
                results = self._translate_batch(texts)
                if len(results) != len(texts):
                    raise RuntimeError("backend returned a misaligned batch")
            except Exception as exc:
                for _, _, future in batch:
                    if not future.cancelled():
                        future.set_exception(exc)
                continue
            for (_, _, future), result in zip(batch, results):
                if not future.cancelled():
                    future.set_result(result)

    def close(self):
        with self._wakeup:
            self._closed = True
            self._wakeup.notify_all()
        self._worker.join(timeout=5)
