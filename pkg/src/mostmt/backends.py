"""Translation backends: the backend contract, routing, and implementations.

Backends translate batches of texts for one ordered language pair. Two
kinds exist: a toy dictionary backend whose lexicon entries carry
morphological features (gender, politeness, number), and a remote HTTP
backend speaking this project's own gateway wire contract. Routes are
either direct or a pivot composition of two backends through an
intermediate language; the dictionary backend's feature handling makes the
information loss of pivoting observable: features a pivot language cannot
express are dropped and never recovered.
"""

from __future__ import annotations

import json
import re
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field, replace
from importlib import resources

from .textproc import Segment, detect_script

FEATURE_VALUES = {
    "gender": {"M", "F", "N"},
    "politeness": {"formal", "informal"},
    "number": {"sg", "pl"},
}

DEFAULT_PIVOT = "en"

_WORD = re.compile(r"\w+", re.UNICODE)


class UnsupportedPairError(ValueError):
    """No direct backend and no allowed pivot for the requested pair."""


class BackendUnavailableError(RuntimeError):
    """A backend failed to produce translations; retrying may help."""

    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class LexiconError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class TaggedToken:
    """A lexical unit with its morphological feature assignment."""

    lemma: str
    features: tuple[tuple[str, str], ...]
    surface: str
    unknown: bool = False

    def feature_dict(self) -> dict[str, str]:
        return dict(self.features)


def _features(mapping: dict[str, str]) -> tuple[tuple[str, str], ...]:
    for key, value in mapping.items():
        allowed = FEATURE_VALUES.get(key)
        if allowed is None:
            raise ValueError(f"unknown feature key {key!r}")
        if value not in allowed:
            raise ValueError(f"feature {key}={value!r} not in {sorted(allowed)}")
    return tuple(sorted(mapping.items()))


@dataclass(frozen=True)
class TranslationRoute:
    """A resolved path between two languages: direct or via a pivot."""

    src: str
    tgt: str
    kind: str  # "direct" | "pivot"
    backend_id: str | None = None
    first_id: str | None = None
    pivot_lang: str | None = None
    second_id: str | None = None

    @classmethod
    def direct(cls, src: str, tgt: str, backend_id: str) -> "TranslationRoute":
        return cls(src=src, tgt=tgt, kind="direct", backend_id=backend_id)

    @classmethod
    def pivot(
        cls, src: str, tgt: str, first_id: str, pivot_lang: str, second_id: str
    ) -> "TranslationRoute":
        if pivot_lang in (src, tgt):
            raise ValueError(f"pivot language {pivot_lang!r} equals an endpoint")
        return cls(
            src=src,
            tgt=tgt,
            kind="pivot",
            first_id=first_id,
            pivot_lang=pivot_lang,
            second_id=second_id,
        )


# ---------------------------------------------------------------------------
# Toy dictionary backend

@dataclass(frozen=True)
class LexEntry:
    features: tuple[tuple[str, str], ...]
    surface: str


class Lexicon:
    """Concept-keyed multilingual lexicon for the dictionary backend.

    File rows are ``lemma<TAB>lang<TAB>features<TAB>surface`` where features
    is a comma-separated ``key=value`` list (may be empty) and surfaces may
    span several words. Within one (lemma, lang) group, file order breaks
    ties, so the first row is the default reading of an ambiguous surface.
    """

    def __init__(self):
        self._by_lemma: dict[str, dict[str, list[LexEntry]]] = {}
        self._by_surface: dict[tuple[str, str], list[tuple[str, LexEntry]]] = {}
        self._max_words: dict[str, int] = {}

    @classmethod
    def from_lines(cls, lines) -> "Lexicon":
        lex = cls()
        for line_no, raw in enumerate(lines, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise LexiconError(f"expected 4 fields, got {len(fields)}", line_no)
            lemma, lang, feat_spec, surface = fields
            if not surface:
                raise LexiconError("empty surface", line_no)
            feats = {}
            if feat_spec:
                for item in feat_spec.split(","):
                    key, sep, value = item.partition("=")
                    if not sep:
                        raise LexiconError(f"bad feature {item!r}", line_no)
                    if key in feats:
                        raise LexiconError(f"duplicate feature key {key!r}", line_no)
                    feats[key] = value
            try:
                features = _features(feats)
            except ValueError as exc:
                raise LexiconError(str(exc), line_no) from None
            entry = LexEntry(features=features, surface=surface)
            lex._by_lemma.setdefault(lemma, {}).setdefault(lang, []).append(entry)
            lex._by_surface.setdefault((lang, surface.lower()), []).append(
                (lemma, entry)
            )
            words = len(surface.split())
            lex._max_words[lang] = max(lex._max_words.get(lang, 1), words)
        return lex

    @classmethod
    def from_path(cls, path) -> "Lexicon":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh)

    @classmethod
    def bundled(cls) -> "Lexicon":
        text = resources.files("mostmt.data").joinpath("toy_lexicon.tsv").read_text(
            "utf-8"
        )
        return cls.from_lines(text.splitlines())

    def max_phrase_words(self, lang: str) -> int:
        return self._max_words.get(lang, 1)

    def analyze(self, lang: str, surface: str) -> tuple[str, LexEntry] | None:
        """First (file-order) reading of a surface form in ``lang``."""
        readings = self._by_surface.get((lang, surface.lower()))
        return readings[0] if readings else None

    def entries(self, lemma: str, lang: str) -> list[LexEntry]:
        return self._by_lemma.get(lemma, {}).get(lang, [])

    def expressible(self, lemma: str, lang: str) -> set[str]:
        """Feature keys the target language marks for this lemma at all."""
        keys: set[str] = set()
        for entry in self.entries(lemma, lang):
            keys.update(k for k, _ in entry.features)
        return keys

    def all_tokens(self, lang: str):
        """Every (lemma, entry) of a language; used by property tests."""
        for lemma, by_lang in self._by_lemma.items():
            for entry in by_lang.get(lang, []):
                yield lemma, entry


def dictionary_lookup(backend: "DictionaryBackend", token: TaggedToken, tgt: str) -> TaggedToken:
    """Transfer one token into ``tgt``, intersecting its features with what
    the target language can express; unknown lemmas pass through marked."""
    lexicon = backend.lexicon
    entries = lexicon.entries(token.lemma, tgt)
    if not entries:
        return replace(token, unknown=True)
    expressible = lexicon.expressible(token.lemma, tgt)
    kept = {k: v for k, v in token.features if k in expressible}

    best = None
    best_overlap = -1
    for entry in entries:
        entry_feats = dict(entry.features)
        if any(entry_feats.get(k, v) != v for k, v in kept.items()):
            continue  # conflicting value
        overlap = sum(1 for k, v in kept.items() if entry_feats.get(k) == v)
        if overlap > best_overlap:
            best, best_overlap = entry, overlap
    if best is None:
        best = entries[0]
    return TaggedToken(
        lemma=token.lemma, features=_features(kept), surface=best.surface
    )


class DictionaryBackend:
    """Word/phrase-level translator over the toy lexicon.

    Greedy longest-phrase analysis, feature-aware transfer, and stored-case
    generation with sentence-initial capitalization. Unknown words pass
    through unchanged so translation stays total.
    """

    kind = "dictionary"

    def __init__(self, backend_id: str, src: str, tgt: str, lexicon: Lexicon):
        self.id = backend_id
        self.src = src
        self.tgt = tgt
        self.lexicon = lexicon

    def translate_tagged(self, text: str) -> list[TaggedToken]:
        """Analyze, transfer, and return the target-side tokens in order."""
        return [tok for tok, _span in self._transfer(text)]

    def translate_batch(self, texts: list[str]) -> list[str]:
        return [self._render(text) for text in texts]

    def _analyze(self, text: str):
        """Yield (token, (start, end)) covering every word of ``text``."""
        words = list(_WORD.finditer(text))
        max_words = self.lexicon.max_phrase_words(self.src)
        i = 0
        while i < len(words):
            hit = None
            for span_len in range(min(max_words, len(words) - i), 0, -1):
                phrase = " ".join(w.group(0) for w in words[i : i + span_len])
                reading = self.lexicon.analyze(self.src, phrase)
                if reading is not None:
                    hit = (span_len, phrase, reading)
                    break
            if hit is None:
                surface = words[i].group(0)
                token = TaggedToken(
                    lemma=surface.lower(), features=(), surface=surface, unknown=True
                )
                yield token, (words[i].start(), words[i].end())
                i += 1
            else:
                span_len, phrase, (lemma, entry) = hit
                token = TaggedToken(
                    lemma=lemma, features=entry.features, surface=phrase
                )
                yield token, (words[i].start(), words[i + span_len - 1].end())
                i += span_len

    def _transfer(self, text: str):
        for token, span in self._analyze(text):
            if token.unknown:
                yield token, span
            else:
                yield dictionary_lookup(self, token, self.tgt), span

    def _render(self, text: str) -> str:
        out = []
        pos = 0
        first_word = True
        for token, (start, end) in self._transfer(text):
            out.append(text[pos:start])
            surface = token.surface
            # Sentence-initial capitalization mirrors the source casing.
            if first_word and surface and text[start].isupper():
                surface = surface[0].upper() + surface[1:]
            out.append(surface)
            pos = end
            first_word = False
        out.append(text[pos:])
        return "".join(out)


# ---------------------------------------------------------------------------
# Remote backend (speaks this project's own gateway API)

TRANSLATE_PATH = "/api/v2/translate"


@dataclass(frozen=True)
class RemoteConfig:
    url: str
    timeout: float = 5.0
    max_retries: int = 2
    backoff_base: float = 0.2


class RemoteBackend:
    kind = "remote"

    def __init__(self, backend_id: str, src: str, tgt: str, config: RemoteConfig):
        self.id = backend_id
        self.src = src
        self.tgt = tgt
        self.config = config

    def translate_batch(self, texts: list[str]) -> list[str]:
        if not texts:
            return []
        payload = json.dumps(
            {"src": self.src, "tgt": self.tgt, "texts": list(texts)}
        ).encode("utf-8")
        url = self.config.url.rstrip("/") + TRANSLATE_PATH
        last_error = "unreachable"
        attempts = self.config.max_retries + 1
        for attempt in range(attempts):
            if attempt:
                time.sleep(self.config.backoff_base * 2 ** (attempt - 1))
            try:
                request = urllib.request.Request(
                    url, data=payload, headers={"Content-Type": "application/json"}
                )
                with urllib.request.urlopen(request, timeout=self.config.timeout) as resp:
                    body = resp.read()
            except urllib.error.HTTPError as exc:
                if 500 <= exc.code < 600:
                    last_error = f"server error {exc.code}"
                    continue  # retryable
                raise BackendUnavailableError(
                    f"protocol error: status {exc.code}"
                ) from exc
            except (urllib.error.URLError, TimeoutError, OSError) as exc:
                last_error = f"transport error: {exc}"
                continue
            try:
                data = json.loads(body.decode("utf-8"))
                translations = data["translations"]
                if not isinstance(translations, list) or len(translations) != len(texts):
                    raise ValueError("translation count mismatch")
            except (ValueError, KeyError) as exc:
                raise BackendUnavailableError(
                    f"protocol error: malformed body ({exc})"
                ) from exc
            return [str(t) for t in translations]
        raise BackendUnavailableError(
            f"backend {self.id} unavailable after {attempts} attempts: {last_error}",
            retry_after=self.config.backoff_base * 2 ** self.config.max_retries,
        )


# ---------------------------------------------------------------------------
# Registry and routing

class BackendRegistry:
    """At most one backend per ordered language pair; immutable after startup."""

    def __init__(self):
        self._backends: dict[tuple[str, str], object] = {}

    def register(self, backend) -> None:
        pair = (backend.src, backend.tgt)
        if pair in self._backends:
            raise ValueError(f"pair {pair} already registered")
        self._backends[pair] = backend

    def get(self, src: str, tgt: str):
        return self._backends.get((src, tgt))

    def by_id(self, backend_id: str):
        for backend in self._backends.values():
            if backend.id == backend_id:
                return backend
        raise KeyError(backend_id)

    def pairs(self) -> list[tuple[str, str]]:
        return sorted(self._backends)


def resolve_route(
    registry: BackendRegistry,
    src: str,
    tgt: str,
    allow_pivot: bool = False,
    pivot_lang: str = DEFAULT_PIVOT,
) -> TranslationRoute:
    """Direct when registered, else a pivot composition when allowed."""
    direct = registry.get(src, tgt)
    if direct is not None:
        return TranslationRoute.direct(src, tgt, direct.id)
    if allow_pivot and pivot_lang not in (src, tgt):
        first = registry.get(src, pivot_lang)
        second = registry.get(pivot_lang, tgt)
        if first is not None and second is not None:
            return TranslationRoute.pivot(src, tgt, first.id, pivot_lang, second.id)
    raise UnsupportedPairError(f"no route from {src!r} to {tgt!r}")


def translate(
    registry: BackendRegistry,
    route: TranslationRoute,
    segments: list[Segment],
) -> list[Segment]:
    """Run a batch of segments through a route, preserving order and count."""
    for seg in segments:
        if seg.lang not in (route.src, "unknown"):
            raise ValueError(
                f"segment language {seg.lang!r} does not match route source {route.src!r}"
            )
    texts = [seg.text for seg in segments]
    if route.kind == "direct":
        outputs = registry.by_id(route.backend_id).translate_batch(texts)
    else:
        midway = registry.by_id(route.first_id).translate_batch(texts)
        outputs = registry.by_id(route.second_id).translate_batch(midway)
    if len(outputs) != len(texts):
        raise BackendUnavailableError("backend returned a misaligned batch")
    return [
        Segment(text=out, lang=route.tgt, script=detect_script(out), index=seg.index)
        for out, seg in zip(outputs, segments)
    ]
