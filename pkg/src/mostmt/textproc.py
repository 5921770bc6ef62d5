"""Unicode-aware script detection, normalization, and sentence segmentation.

Everything here is a pure function over immutable inputs; all inbound text
passes through :func:`normalize` and :func:`segment_sentences` before
translation or transliteration.
"""

from __future__ import annotations

import functools
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources

# Script classes.
LATIN = "Latin"
CYRILLIC = "Cyrillic"
MIXED = "Mixed"
NEUTRAL = "Neutral"

SENTENCE_TERMINALS = ".!?…"
_CLOSERS = "\"'“”‘’»«)\\]"

# A sentence boundary: a run of terminal punctuation, optional closing
# quotes/brackets, then whitespace (or end of text, handled separately).
_BOUNDARY = re.compile(
    r"[%s]+[%s]*\s" % (re.escape(SENTENCE_TERMINALS), _CLOSERS)
)

_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class Segment:
    """One sentence-sized unit of text with language and script metadata."""

    text: str
    lang: str
    script: str
    index: int


@functools.lru_cache(maxsize=4096)
def _char_script(ch: str) -> str | None:
    """Classify a single character as Latin, Cyrillic, other-letter, or None."""
    if not ch.isalpha():
        return None
    name = unicodedata.name(ch, "")
    if "CYRILLIC" in name:
        return CYRILLIC
    if "LATIN" in name:
        return LATIN
    return "Other"


def detect_script(text: str) -> str:
    """Classify text as Latin, Cyrillic, Mixed, or Neutral.

    Neutral means the text contains no letters at all.  Letters outside
    both the Latin and Cyrillic ranges (Greek, CJK, ...) make the text
    Mixed: it is neither purely Latin nor purely Cyrillic.
    """
    has_latin = has_cyrillic = has_other = False
    for ch in text:
        s = _char_script(ch)
        if s == LATIN:
            has_latin = True
        elif s == CYRILLIC:
            has_cyrillic = True
        elif s == "Other":
            has_other = True
    if not (has_latin or has_cyrillic or has_other):
        return NEUTRAL
    if has_latin and not has_cyrillic and not has_other:
        return LATIN
    if has_cyrillic and not has_latin and not has_other:
        return CYRILLIC
    return MIXED


def normalize(text: str) -> str:
    """Canonical-compose, strip control/format characters, collapse whitespace."""
    text = unicodedata.normalize("NFC", text)
    # Control and format characters other than whitespace are dropped;
    # whitespace-class controls (\t, \n, ...) fall to the collapse below.
    text = "".join(
        ch for ch in text
        if ch.isspace() or unicodedata.category(ch) not in ("Cc", "Cf")
    )
    return _WS.sub(" ", text).strip()


@functools.lru_cache(maxsize=8)
def load_abbreviations(lang: str) -> frozenset[str]:
    """Abbreviations (with trailing dot) that do not end a sentence.

    Shipped as one-entry-per-line UTF-8 data files with ``#`` comments;
    unknown languages get an empty set.
    """
    fname = f"abbreviations_{lang}.txt"
    try:
        raw = resources.files("mostmt.data").joinpath(fname).read_text("utf-8")
    except (FileNotFoundError, ModuleNotFoundError):
        return frozenset()
    entries = set()
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        entries.add(line.lower())
    return frozenset(entries)


def _no_split_before_dot(text: str, dot: int, abbrevs: frozenset[str]) -> bool:
    """True when the lone dot at ``dot`` should not end a sentence.

    Guards: known abbreviations, name initials ("J. Novák"), and short
    ordinal numbers ("1. ledna").  Decimal numbers like 3.14 never reach
    here because no whitespace follows their dot.
    """
    start = dot
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start : dot + 1].lower()
    # Strip leading punctuation like opening brackets: "(str." -> "str."
    word = word.lstrip("(\"'„«[")
    if word in abbrevs:
        return True
    bare = word[:-1]
    if len(bare) == 1 and bare.isalpha():
        return True
    if bare.isdigit() and len(bare) <= 2:
        return True
    return False


def segment_sentences(text: str, lang: str = "unknown") -> list[Segment]:
    """Split normalized text into sentence segments.

    Terminal punctuation (``. ! ? …``) followed by optional closing quotes
    and whitespace ends a segment, unless the dot belongs to a known
    abbreviation for ``lang`` or sits inside a number.  Joining the segment
    texts with single spaces reconstructs the normalized input.
    """
    text = normalize(text)
    if not text:
        return []
    abbrevs = load_abbreviations(lang)

    cuts = []
    for m in _BOUNDARY.finditer(text):
        first = m.start()
        if text[first] == "." and (m.end() - m.start()) == 2:
            # Lone dot: guard against abbreviations, initials, ordinals.
            # Runs of terminals ("...", "?!") and dots decorated with
            # closing quotes always split.
            if _no_split_before_dot(text, first, abbrevs):
                continue
        cuts.append(m.end())

    segments: list[Segment] = []
    prev = 0
    for cut in cuts:
        piece = text[prev:cut].strip()
        if piece:
            segments.append(
                Segment(piece, lang, detect_script(piece), len(segments))
            )
        prev = cut
    tail = text[prev:].strip()
    if tail:
        segments.append(Segment(tail, lang, detect_script(tail), len(segments)))
    return segments


def join_segments(segments: list[Segment]) -> str:
    """Inverse of segmentation up to whitespace normalization."""
    return " ".join(s.text for s in segments)
