"""Gateway configuration: TOML file, env overrides, sane defaults.

Without a config file the service runs the bundled toy dictionary backends
for cs<->uk only. The ``on_premise`` flag disables all logging
unconditionally, for deployments where texts must never leave the machine.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PORT_ENV_VAR = "MOSTMT_PORT"


@dataclass(frozen=True)
class BackendConfig:
    id: str
    kind: str  # "dictionary" | "remote"
    src: str
    tgt: str
    lexicon: str = "bundled"  # dictionary kind: path or "bundled"
    url: str = ""  # remote kind
    timeout: float = 5.0
    max_retries: int = 2


def _default_backends() -> tuple[BackendConfig, ...]:
    return (
        BackendConfig(id="toy-cs-uk", kind="dictionary", src="cs", tgt="uk"),
        BackendConfig(id="toy-uk-cs", kind="dictionary", src="uk", tgt="cs"),
    )


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    max_text_chars: int = 100_000
    consent_default: bool = False
    on_premise: bool = False
    allow_pivot: bool = False
    pivot_language: str = "en"
    pseudonym_seed: int = 0
    max_batch: int = 8
    max_wait_ms: int = 50
    queue_cap: int = 1000
    rate_per_sec: float = 0.0  # 0 disables rate limiting
    rate_burst: float = 0.0
    usage_log: str = "usage.jsonl"
    backends: tuple[BackendConfig, ...] = field(default_factory=_default_backends)

    @property
    def max_wait_seconds(self) -> float:
        return self.max_wait_ms / 1000.0


def load_config(path=None) -> ServiceConfig:
    """Read a TOML config; missing file or path=None yields the defaults.

    The port may always be overridden with the MOSTMT_PORT env var.
    """
    data = {}
    if path is not None:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)

    batching = data.get("batching", {})
    rate = data.get("rate_limit", {})
    logging_cfg = data.get("logging", {})
    backend_rows = data.get("backends")
    if backend_rows:
        backends = tuple(
            BackendConfig(
                id=row["id"],
                kind=row["kind"],
                src=row["src"],
                tgt=row["tgt"],
                lexicon=row.get("lexicon", "bundled"),
                url=row.get("url", ""),
                timeout=float(row.get("timeout", 5.0)),
                max_retries=int(row.get("max_retries", 2)),
            )
            for row in backend_rows
        )
    else:
        backends = _default_backends()

    port = int(os.environ.get(PORT_ENV_VAR, data.get("port", 8080)))
    return ServiceConfig(
        host=data.get("host", "127.0.0.1"),
        port=port,
        max_text_chars=int(data.get("max_text_chars", 100_000)),
        consent_default=bool(data.get("consent_default", False)),
        on_premise=bool(data.get("on_premise", False)),
        allow_pivot=bool(data.get("allow_pivot", False)),
        pivot_language=data.get("pivot_language", "en"),
        pseudonym_seed=int(data.get("pseudonym_seed", 0)),
        max_batch=int(batching.get("max_batch", 8)),
        max_wait_ms=int(batching.get("max_wait_ms", 50)),
        queue_cap=int(batching.get("queue_cap", 1000)),
        rate_per_sec=float(rate.get("rate_per_sec", 0.0)),
        rate_burst=float(rate.get("burst", 0.0)),
        usage_log=logging_cfg.get("usage_log", "usage.jsonl"),
        backends=backends,
    )
