"""Opt-in logging with pseudonymization, consent lifecycle, and deletion.

Detection is pattern-based (phones, URLs, addresses) plus gazetteer-based
(name pools, place lists, institution keywords) — deterministic and
auditable, no ML. Person names become random names from per-language pools
(seeded, so byte-reproducible); other PII kinds become category
placeholders. Consent is honored absolutely: a request without consent
leaves zero bytes in any log.
"""

from __future__ import annotations

import json
import os
import random
import re
import threading
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .stats import UsageRecord, utc_now_iso

PII_KINDS = ("person_name", "address", "url", "institution", "phone", "place")

PLACEHOLDERS = {
    "phone": "[PHONE]",
    "url": "[URL]",
    "address": "[ADDRESS]",
    "place": "[PLACE]",
    "institution": "[ORG]",
}

_URL = re.compile(r"(?:https?://|www\.)[^\s<>\"]+")
# A phone is a +-optional run of digit groups; validated by digit count.
_PHONE = re.compile(r"\+?\d[\d ()\-]{6,}\d")
_ADDRESS = re.compile(
    r"(?:ulice|ul\.|náměstí|nám\.|třída|tř\.|вулиця|вул\.|проспект|просп\.|площа|пл\.)"
    r"\s+[^\s,.!?]+(?:\s+\d+[a-zA-Z]?(?:/\d+)?)?",
    re.IGNORECASE,
)
_WORD = re.compile(r"[\w’'-]+", re.UNICODE)

_TITLES = {"pan", "paní", "pane", "p.", "пан", "пані", "пане"}


@dataclass(frozen=True)
class PiiSpan:
    kind: str
    start: int
    end: int
    replacement: str

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "start": self.start,
            "end": self.end,
            "replacement": self.replacement,
        }


def _load_pool(name: str) -> list[str]:
    raw = resources.files("mostmt.data").joinpath(name).read_text("utf-8")
    entries = []
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    return entries


class Gazetteer:
    """Shipped name pools, place lists, institution keywords, allowlist."""

    _instance = None

    def __init__(self):
        self.first_names = {
            "cs": _load_pool("first_names_cs.txt"),
            "uk": _load_pool("first_names_uk.txt"),
        }
        self.surnames = {
            "cs": _load_pool("surnames_cs.txt"),
            "uk": _load_pool("surnames_uk.txt"),
        }
        self.places = _load_pool("places.txt")
        self.institution_keywords = {w.lower() for w in _load_pool("institutions.txt")}
        self.public_figures = {n.lower() for n in _load_pool("public_figures.txt")}
        self._first_lower = {
            lang: {n.lower() for n in pool} for lang, pool in self.first_names.items()
        }
        self._surname_lower = {
            lang: {n.lower() for n in pool} for lang, pool in self.surnames.items()
        }
        self.any_first = set().union(*self._first_lower.values())
        self.any_surname = set().union(*self._surname_lower.values())
        self._place_re = re.compile(
            r"\b(?:%s)\b" % "|".join(
                re.escape(p) for p in sorted(self.places, key=len, reverse=True)
            )
        )

    @classmethod
    def shipped(cls) -> "Gazetteer":
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance


def _phone_candidates(text: str):
    for m in _PHONE.finditer(text):
        digits = sum(ch.isdigit() for ch in m.group(0))
        if 9 <= digits <= 13:
            yield m.start(), m.end()


def _person_candidates(text: str, gaz: Gazetteer):
    """Yield (start, end, components) name spans; components are the word
    tokens of the span tagged as given name or surname."""
    words = list(_WORD.finditer(text))
    used = [False] * len(words)
    for i, w in enumerate(words):
        if used[i]:
            continue
        token = w.group(0)
        lower = token.lower()
        capitalized = token[:1].isupper()
        nxt = words[i + 1] if i + 1 < len(words) else None
        # Full name: known first name + following capitalized word
        if (
            capitalized
            and lower in gaz.any_first
            and nxt is not None
            and nxt.group(0)[:1].isupper()
        ):
            full = f"{token} {nxt.group(0)}"
            if full.lower() in gaz.public_figures:
                used[i] = used[i + 1] = True
                continue
            yield (
                w.start(),
                nxt.end(),
                [("first", token), ("last", nxt.group(0))],
            )
            used[i] = used[i + 1] = True
            continue
        # Title + capitalized word: treat as surname
        prev = words[i - 1] if i > 0 else None
        if (
            capitalized
            and prev is not None
            and prev.group(0).lower().rstrip(".") in {t.rstrip(".") for t in _TITLES}
        ):
            yield (w.start(), w.end(), [("last", token)])
            used[i] = True
            continue
        if capitalized and lower in gaz.any_first:
            yield (w.start(), w.end(), [("first", token)])
            used[i] = True
            continue
        if capitalized and lower in gaz.any_surname:
            yield (w.start(), w.end(), [("last", token)])
            used[i] = True


def _institution_candidates(text: str, gaz: Gazetteer):
    words = list(_WORD.finditer(text))
    taken = [False] * len(words)
    for i, w in enumerate(words):
        if taken[i] or w.group(0).lower() not in gaz.institution_keywords:
            continue
        lo = hi = i
        while lo > 0 and not taken[lo - 1] and words[lo - 1].group(0)[:1].isupper():
            lo -= 1
        while (
            hi + 1 < len(words)
            and not taken[hi + 1]
            and words[hi + 1].group(0)[:1].isupper()
        ):
            hi += 1
        for j in range(lo, hi + 1):
            taken[j] = True
        yield words[lo].start(), words[hi].end()


class _NamePool:
    """Seeded, per-text pseudonym assignment, consistent per original name."""

    def __init__(self, rng: random.Random, firsts: list[str], lasts: list[str]):
        self._rng = rng
        self._pools = {"first": firsts, "last": lasts}
        self._mapping: dict[tuple[str, str], str] = {}

    def pseudonym(self, role: str, original: str) -> str:
        key = (role, original.lower())
        if key not in self._mapping:
            candidates = [
                n for n in self._pools[role] if n.lower() != original.lower()
            ]
            self._mapping[key] = self._rng.choice(candidates)
        return self._mapping[key]


def pseudonymize(
    text: str, lang: str = "cs", seed: int = 0
) -> tuple[str, list[PiiSpan]]:
    """Replace detected PII, returning the new text and the spans replaced.

    Person names get pool pseudonyms (the same original name maps to the
    same pseudonym within one text); other kinds get category placeholders.
    Detection is best-effort: anything undetected passes through untouched.
    """
    gaz = Gazetteer.shipped()
    pool_lang = lang if lang in ("cs", "uk") else "cs"
    rng = random.Random(seed)
    pool = _NamePool(
        rng, gaz.first_names[pool_lang], gaz.surnames[pool_lang]
    )

    candidates: list[tuple[int, int, int, str, object]] = []
    for m in _URL.finditer(text):
        candidates.append((0, m.start(), m.end(), "url", None))
    for start, end in _phone_candidates(text):
        candidates.append((1, start, end, "phone", None))
    for m in _ADDRESS.finditer(text):
        candidates.append((2, m.start(), m.end(), "address", None))
    for m in gaz._place_re.finditer(text):
        candidates.append((3, m.start(), m.end(), "place", None))
    for start, end in _institution_candidates(text, gaz):
        candidates.append((4, start, end, "institution", None))
    for start, end, components in _person_candidates(text, gaz):
        candidates.append((5, start, end, "person_name", components))

    accepted: list[tuple[int, int, str, object]] = []
    occupied: list[tuple[int, int]] = []
    for _prio, start, end, kind, extra in sorted(
        candidates, key=lambda c: (c[0], c[1], -(c[2] - c[1]))
    ):
        if any(start < e and end > s for s, e in occupied):
            continue
        occupied.append((start, end))
        accepted.append((start, end, kind, extra))

    spans: list[PiiSpan] = []
    for start, end, kind, extra in sorted(accepted):
        if kind == "person_name":
            replacement = " ".join(
                pool.pseudonym(role, original) for role, original in extra
            )
        else:
            replacement = PLACEHOLDERS[kind]
        spans.append(PiiSpan(kind=kind, start=start, end=end, replacement=replacement))

    out = text
    for span in reversed(spans):
        out = out[: span.start] + span.replacement + out[span.end :]
    return out, spans


_SENTENCE_BREAK = re.compile(r"[.!?…]\s+$")


def flag_for_review(text: str, spans: list[PiiSpan], lang: str = "cs") -> bool:
    """True when residual capitalized unknown tokens remain after
    pseudonymization — a human should decide whether the text is safe."""
    gaz = Gazetteer.shipped()
    covered = [(s.start, s.end) for s in spans]
    for m in _WORD.finditer(text):
        token = m.group(0)
        if not token[:1].isupper() or len(token) < 2:
            continue
        if any(m.start() < e and m.end() > s for s, e in covered):
            continue
        if m.start() == 0 or _SENTENCE_BREAK.search(text[: m.start()]):
            continue  # sentence-initial capitalization is expected
        lower = token.lower()
        if (
            lower in gaz.any_first
            or lower in gaz.any_surname
            or lower in gaz.institution_keywords
            or any(lower == p.lower() for p in gaz.places)
            or any(lower in figure.split() for figure in gaz.public_figures)
        ):
            continue
        return True
    return False


# ---------------------------------------------------------------------------
# Consent lifecycle and the usage log

@dataclass(frozen=True)
class ConsentState:
    client_id: str
    consent: bool
    updated_at: float


class ConsentStore:
    """Latest-timestamp-wins consent registry."""

    def __init__(self):
        self._states: dict[str, ConsentState] = {}
        self._lock = threading.Lock()

    def update(self, client_id: str, consent: bool, timestamp: float | None = None) -> None:
        ts = time.time() if timestamp is None else timestamp
        with self._lock:
            current = self._states.get(client_id)
            if current is None or ts >= current.updated_at:
                self._states[client_id] = ConsentState(client_id, consent, ts)

    def allows(self, client_id: str) -> bool | None:
        with self._lock:
            state = self._states.get(client_id)
            return None if state is None else state.consent


class UsageLog:
    """Single-writer JSON-lines log; deletes serialize with the writer."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._last_ts = ""
        self.write_failures = 0

    def append(self, record: dict) -> bool:
        """Append one record; returns False (and counts) on storage failure."""
        line = json.dumps(record, ensure_ascii=False)
        with self._lock:
            if record.get("ts", "") < self._last_ts:
                record = dict(record, ts=self._last_ts)
                line = json.dumps(record, ensure_ascii=False)
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
            except OSError:
                self.write_failures += 1
                return False
            self._last_ts = record.get("ts", self._last_ts)
            return True

    def iter_records(self):
        with self._lock:
            if not self.path.exists():
                return []
            lines = self.path.read_text(encoding="utf-8").splitlines()
        records = []
        for line in lines:
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except ValueError:
                continue
        return records

    def delete_client(self, client_id: str) -> int:
        """Purge all records of one client; idempotent."""
        with self._lock:
            if not self.path.exists():
                return 0
            kept = []
            removed = 0
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except ValueError:
                    kept.append(line)  # never drop data we cannot parse
                    continue
                if record.get("client_id") == client_id:
                    removed += 1
                else:
                    kept.append(line)
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            body = "".join(l + "\n" for l in kept)
            tmp.write_text(body, encoding="utf-8")
            os.replace(tmp, self.path)
            return removed


def record_or_drop(
    log: UsageLog,
    consent_store: ConsentStore | None,
    *,
    direction: str,
    text: str,
    lang: str,
    segment_count: int,
    consent: bool,
    client_id: str | None = None,
    pseudonym_seed: int = 0,
    timestamp: str | None = None,
    char_count: int | None = None,
) -> UsageRecord | None:
    """Persist a pseudonymized record when consent allows it, else nothing.

    Without consent no bytes touch storage — not even metadata. Storage
    failures are counted on the log and never raised: serving beats logging.
    """
    if consent_store is not None and client_id:
        consent_store.update(client_id, consent)
    if not consent:
        return None
    record = UsageRecord(
        timestamp=timestamp or utc_now_iso(),
        direction=direction,
        chars=len(text) if char_count is None else char_count,
        segments=segment_count,
        consent=True,
        client_id=client_id,
    )
    scrubbed, spans = pseudonymize(text, lang=lang, seed=pseudonym_seed)
    payload = record.to_json()
    payload["text"] = scrubbed
    payload["spans"] = [s.to_json() for s in spans]
    log.append(payload)
    return record


def delete_client_data(log: UsageLog, client_id: str) -> int:
    """Remove every stored record of a client; returns the purge count."""
    return log.delete_client(client_id)
