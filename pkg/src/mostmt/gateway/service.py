"""The gateway's service core, independent of any HTTP plumbing.

Requests are validated, rate-limited, segmented, routed through the shared
per-backend batchers, re-joined, optionally decorated with transliteration
lines, and logged only with consent (never on an on-premise install).
Handlers are safe to call from many threads at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import translit
from ..backends import (
    BackendRegistry,
    BackendUnavailableError,
    DictionaryBackend,
    Lexicon,
    RemoteBackend,
    RemoteConfig,
    UnsupportedPairError,
    resolve_route,
)
from ..privacy import ConsentStore, UsageLog, record_or_drop
from ..stats import StatsReport, aggregate_stats
from ..textproc import segment_sentences
from .batching import BatchingExecutor, QueueFullError
from .config import BackendConfig, ServiceConfig
from .ratelimit import TokenBucketLimiter

LANGUAGE_SCRIPTS = {"cs": "Latin", "uk": "Cyrillic", "en": "Latin"}


class ApiError(Exception):
    """Service-level failure with a machine-readable code and HTTP status."""

    def __init__(self, status: int, code: str, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.retry_after = retry_after


@dataclass(frozen=True)
class TranslationRequest:
    src: str
    tgt: str
    texts: list[str] = field(default_factory=list)
    include_translit: bool = False
    logging_consent: bool | None = None  # None: fall back to config default
    client_id: str | None = None


@dataclass(frozen=True)
class TranslationResponse:
    translations: list[str]
    translit_src: list[str] | None = None
    translit_tgt: list[str] | None = None

    def to_json(self) -> dict:
        payload: dict = {"translations": self.translations}
        if self.translit_src is not None:
            payload["translit_src"] = self.translit_src
        if self.translit_tgt is not None:
            payload["translit_tgt"] = self.translit_tgt
        return payload


def build_registry(configs) -> BackendRegistry:
    registry = BackendRegistry()
    bundled = None
    for cfg in configs:
        if cfg.kind == "dictionary":
            if cfg.lexicon == "bundled":
                if bundled is None:
                    bundled = Lexicon.bundled()
                lexicon = bundled
            else:
                lexicon = Lexicon.from_path(cfg.lexicon)
            registry.register(DictionaryBackend(cfg.id, cfg.src, cfg.tgt, lexicon))
        elif cfg.kind == "remote":
            registry.register(
                RemoteBackend(
                    cfg.id, cfg.src, cfg.tgt,
                    RemoteConfig(url=cfg.url, timeout=cfg.timeout, max_retries=cfg.max_retries),
                )
            )
        else:
            raise ValueError(f"unknown backend kind {cfg.kind!r}")
    return registry


class TranslationService:
    def __init__(self, config: ServiceConfig | None = None, registry: BackendRegistry | None = None):
        self.config = config or ServiceConfig()
        self.registry = registry or build_registry(self.config.backends)
        self._executors: dict[str, BatchingExecutor] = {}
        for src, tgt in self.registry.pairs():
            backend = self.registry.get(src, tgt)
            self._executors[backend.id] = BatchingExecutor(
                backend.translate_batch,
                max_batch=self.config.max_batch,
                max_wait=self.config.max_wait_seconds,
                queue_cap=self.config.queue_cap,
            )
        self.limiter = TokenBucketLimiter(self.config.rate_per_sec, self.config.rate_burst)
        self.consent_store = ConsentStore()
        self.usage_log = None if self.config.on_premise else UsageLog(self.config.usage_log)

    # -- endpoints ----------------------------------------------------------

    def handle_translate(self, request: TranslationRequest) -> TranslationResponse:
        if not self.limiter.try_acquire(request.client_id):
            raise ApiError(
                429, "rate_limited", "per-client rate limit exceeded",
                retry_after=self.limiter.retry_after(),
            )
        if request.src == request.tgt:
            raise ApiError(400, "unsupported_pair", "source equals target")
        if request.texts is None:
            raise ApiError(400, "bad_request", "texts must be a list")
        for text in request.texts:
            if len(text) > self.config.max_text_chars:
                raise ApiError(
                    400, "oversize_text",
                    f"text exceeds {self.config.max_text_chars} characters",
                )
        try:
            route = resolve_route(
                self.registry, request.src, request.tgt,
                allow_pivot=self.config.allow_pivot,
                pivot_lang=self.config.pivot_language,
            )
        except UnsupportedPairError as exc:
            raise ApiError(400, "unsupported_pair", str(exc)) from None

        segment_lists = [
            segment_sentences(text, request.src) for text in request.texts
        ]
        flat = [seg.text for segs in segment_lists for seg in segs]
        try:
            if route.kind == "direct":
                translated = self._executors[route.backend_id].translate_texts(flat)
            else:
                midway = self._executors[route.first_id].translate_texts(flat)
                translated = self._executors[route.second_id].translate_texts(midway)
        except QueueFullError as exc:
            raise ApiError(
                429, "queue_full", "translation queue is full",
                retry_after=exc.retry_after,
            ) from None
        except BackendUnavailableError as exc:
            raise ApiError(
                503, "backend_unavailable", str(exc), retry_after=exc.retry_after
            ) from None

        translations = []
        cursor = 0
        joined_sources = []
        for segs in segment_lists:
            n = len(segs)
            translations.append(" ".join(translated[cursor : cursor + n]))
            joined_sources.append(" ".join(s.text for s in segs))
            cursor += n

        translit_src = translit_tgt = None
        if request.include_translit and self._scripts_differ(request.src, request.tgt):
            src_fn = translit.for_language(request.src)
            tgt_fn = translit.for_language(request.tgt)
            if src_fn is not None:
                translit_src = [src_fn(text) for text in joined_sources]
            if tgt_fn is not None:
                translit_tgt = [tgt_fn(text) for text in translations]

        self._log_usage(request, segment_lists)
        return TranslationResponse(
            translations=translations,
            translit_src=translit_src,
            translit_tgt=translit_tgt,
        )

    def list_languages(self) -> list[dict]:
        """Registered direct pairs plus derivable pivot pairs, marked."""
        pairs = [
            {"src": src, "tgt": tgt, "kind": "direct"}
            for src, tgt in self.registry.pairs()
        ]
        if self.config.allow_pivot:
            langs = sorted(
                {l for pair in self.registry.pairs() for l in pair}
            )
            for src in langs:
                for tgt in langs:
                    if src == tgt or self.registry.get(src, tgt) is not None:
                        continue
                    try:
                        route = resolve_route(
                            self.registry, src, tgt, allow_pivot=True,
                            pivot_lang=self.config.pivot_language,
                        )
                    except UnsupportedPairError:
                        continue
                    if route.kind == "pivot":
                        pairs.append({"src": src, "tgt": tgt, "kind": "pivot"})
        return pairs

    def stats(self, date_from: str | None = None, date_to: str | None = None) -> StatsReport:
        if self.usage_log is None:
            return StatsReport(rows=[], skipped=0)
        return aggregate_stats(self.usage_log.path, date_from, date_to)

    def health(self) -> dict:
        return {"status": "ok", "pairs": len(self.registry.pairs())}

    # -- internals ----------------------------------------------------------

    def _scripts_differ(self, src: str, tgt: str) -> bool:
        a, b = LANGUAGE_SCRIPTS.get(src), LANGUAGE_SCRIPTS.get(tgt)
        return a is not None and b is not None and a != b

    def _log_usage(self, request: TranslationRequest, segment_lists) -> None:
        if self.usage_log is None:
            return  # on-premise: no logging, unconditionally
        consent = (
            request.logging_consent
            if request.logging_consent is not None
            else self.config.consent_default
        )
        record_or_drop(
            self.usage_log,
            self.consent_store,
            direction=f"{request.src}-{request.tgt}",
            text="\n".join(request.texts),
            lang=request.src,
            segment_count=sum(len(s) for s in segment_lists),
            consent=consent,
            client_id=request.client_id,
            pseudonym_seed=self.config.pseudonym_seed,
            char_count=sum(len(t) for t in request.texts),
        )

    def batching_metrics(self) -> dict:
        return {
            backend_id: {
                "dispatched_batches": ex.dispatched_batches,
                "max_batch": ex.max_observed_batch,
                "max_wait": ex.max_observed_wait,
            }
            for backend_id, ex in self._executors.items()
        }

    def close(self):
        for executor in self._executors.values():
            executor.close()
