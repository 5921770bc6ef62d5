"""Usage records and per-direction daily aggregation.

The usage log is JSON-lines, one record per request that carried logging
consent. Aggregation groups by (UTC date, direction) with exact counts;
corrupt lines are skipped and surfaced as a warning count, never a failure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path


@dataclass(frozen=True)
class UsageRecord:
    """One translation request's footprint in the usage log."""

    timestamp: str  # ISO-8601, UTC
    direction: str  # "src-tgt"
    chars: int
    segments: int
    consent: bool
    client_id: str | None = None

    def to_json(self) -> dict:
        return {
            "ts": self.timestamp,
            "direction": self.direction,
            "chars": self.chars,
            "segments": self.segments,
            "consent": self.consent,
            "client_id": self.client_id,
        }


@dataclass(frozen=True)
class DailyStats:
    date: str
    direction: str
    requests: int
    characters: int

    @property
    def mean_chars(self) -> float:
        return self.characters / self.requests if self.requests else 0.0


@dataclass(frozen=True)
class StatsReport:
    rows: list[DailyStats]
    skipped: int

    def to_json(self) -> dict:
        return {
            "days": [
                {
                    "date": row.date,
                    "direction": row.direction,
                    "requests": row.requests,
                    "characters": row.characters,
                    "mean_chars": row.mean_chars,
                }
                for row in self.rows
            ],
            "skipped": self.skipped,
        }


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f+00:00")


def _coerce(raw) -> UsageRecord:
    if isinstance(raw, UsageRecord):
        return raw
    return UsageRecord(
        timestamp=raw["ts"],
        direction=raw["direction"],
        chars=int(raw["chars"]),
        segments=int(raw.get("segments", 0)),
        consent=bool(raw["consent"]),
        client_id=raw.get("client_id"),
    )


def _iter_source(source):
    """Yield (record | None) pairs, None marking a corrupt entry."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            return
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                try:
                    yield _coerce(json.loads(line))
                except (ValueError, KeyError, TypeError):
                    yield None
    else:
        for raw in source:
            try:
                yield _coerce(raw)
            except (ValueError, KeyError, TypeError):
                yield None


def aggregate_stats(source, date_from: str | None = None, date_to: str | None = None) -> StatsReport:
    """Group usage records by (date, direction).

    ``source`` is a log path or an iterable of records/dicts; the optional
    inclusive ISO-date bounds filter by record date.
    """
    groups: dict[tuple[str, str], list[int]] = {}
    skipped = 0
    for record in _iter_source(source):
        if record is None:
            skipped += 1
            continue
        date = record.timestamp[:10]
        if date_from and date < date_from:
            continue
        if date_to and date > date_to:
            continue
        bucket = groups.setdefault((date, record.direction), [0, 0])
        bucket[0] += 1
        bucket[1] += record.chars
    rows = [
        DailyStats(date=date, direction=direction, requests=req, characters=chars)
        for (date, direction), (req, chars) in sorted(groups.items())
    ]
    return StatsReport(rows=rows, skipped=skipped)
