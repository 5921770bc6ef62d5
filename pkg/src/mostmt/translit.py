"""Bidirectional Cyrillic/Latin transliteration driven by rule tables.

Ukrainian Cyrillic is rendered in Czech-reader-oriented Latin (``нашу`` ->
``našu``, never English-oriented ``nashu``); Czech Latin is rendered in
Ukrainian-reader-oriented Cyrillic with vowel-length acutes kept as
combining marks (``chladná`` -> ``хладна́``).

Rules live in UTF-8 data files, one per line::

    source<TAB>target[<TAB>context-class]

``#`` starts a comment, the target may be empty (the source is dropped),
and the optional context class restricts a rule to a left context:
``word_start``, ``after_vowel``, or ``after_consonant``. Longest source
wins; at equal length a context-specific rule beats the default.
Tables are immutable after load and transliteration is a pure function.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources

UK_TO_LATIN = "uk_to_latin"
CS_TO_CYRILLIC = "cs_to_cyrillic"

CONTEXT_CLASSES = ("any", "word_start", "after_vowel", "after_consonant")

COMBINING_ACUTE = "́"

_UK_ALPHABET = "абвгґдеєжзиіїйклмнопрстуфхцчшщьюя"
_UK_VOWELS = set("аеєиіїоуюя")

_CS_LETTERS = [
    "a", "á", "b", "c", "č", "d", "ď", "e", "é", "ě", "f", "g", "h", "ch",
    "i", "í", "j", "k", "l", "m", "n", "ň", "o", "ó", "p", "q", "r", "ř",
    "s", "š", "t", "ť", "u", "ú", "ů", "v", "w", "x", "y", "ý", "z", "ž",
]
_CS_VOWELS = set("aáeéěiíoóuúůyý")

# Letters that must each have a default (context "any") rule so the table
# replaces every source-alphabet letter totally.
REQUIRED_COVERAGE = {
    UK_TO_LATIN: list(_UK_ALPHABET),
    CS_TO_CYRILLIC: list(_CS_LETTERS),
}

_VOWELS = {UK_TO_LATIN: _UK_VOWELS, CS_TO_CYRILLIC: _CS_VOWELS}
_ALPHABETS = {
    UK_TO_LATIN: set(_UK_ALPHABET),
    CS_TO_CYRILLIC: set("".join(_CS_LETTERS)),
}


class TranslitError(ValueError):
    """Base for transliteration table problems."""


class TableParseError(TranslitError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TableValidationError(TranslitError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TableCoverageError(TranslitError):
    def __init__(self, direction: str, letter: str):
        super().__init__(
            f"table {direction} has no default rule for letter {letter!r}"
        )
        self.letter = letter


@dataclass(frozen=True)
class TranslitTable:
    """Validated, immutable transliteration rule table."""

    direction: str
    # source (lowercase) -> context class -> target (lowercase)
    entries: dict[str, dict[str, str]]
    max_source_len: int = field(default=1)

    def single_letter_rules(self) -> dict[str, str]:
        """Default rules for single source letters (audit helper)."""
        return {
            src: ctxs["any"]
            for src, ctxs in self.entries.items()
            if len(src) == 1 and "any" in ctxs
        }


def _parse_lines(lines, direction: str) -> TranslitTable:
    entries: dict[str, dict[str, str]] = {}
    max_len = 1
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3):
            raise TableParseError(
                f"expected source<TAB>target[<TAB>context], got {line!r}", line_no
            )
        source, target = fields[0], fields[1]
        context = fields[2] if len(fields) == 3 else "any"
        if not source:
            raise TableParseError("empty source sequence", line_no)
        if context not in CONTEXT_CLASSES:
            raise TableParseError(f"unknown context class {context!r}", line_no)
        key = source.lower()
        ctxs = entries.setdefault(key, {})
        if context in ctxs:
            raise TableValidationError(
                f"duplicate rule for source {source!r} in context {context!r}",
                line_no,
            )
        ctxs[context] = target.lower()
        max_len = max(max_len, len(key))

    for letter in REQUIRED_COVERAGE[direction]:
        if "any" not in entries.get(letter, {}):
            raise TableCoverageError(direction, letter)

    return TranslitTable(direction=direction, entries=entries, max_source_len=max_len)


def load_table(path, direction: str) -> TranslitTable:
    """Load and validate a rule table from ``path`` for ``direction``."""
    if direction not in REQUIRED_COVERAGE:
        raise TranslitError(f"unknown direction {direction!r}")
    with open(path, encoding="utf-8") as fh:
        return _parse_lines(fh, direction)


@functools.lru_cache(maxsize=4)
def get_table(direction: str) -> TranslitTable:
    """The shipped table for ``direction``, loaded and validated once."""
    if direction not in REQUIRED_COVERAGE:
        raise TranslitError(f"unknown direction {direction!r}")
    text = resources.files("mostmt.data").joinpath(f"{direction}.tsv").read_text("utf-8")
    return _parse_lines(text.splitlines(), direction)


def _left_context(text: str, pos: int, direction: str) -> str:
    """Classify the character left of ``pos`` for context-gated rules."""
    if pos == 0:
        return "word_start"
    prev = text[pos - 1].lower()
    if not prev.isalpha():
        return "word_start"
    if prev in _VOWELS[direction]:
        return "after_vowel"
    if prev in _ALPHABETS[direction]:
        return "after_consonant"
    return "other"  # foreign letter: only default rules apply


def _case_target(span: str, following: str, target: str) -> str:
    """Apply the casing rule: titlecase unless the next letter is uppercase."""
    if not span[0].isupper():
        return target
    next_letter = None
    for ch in span[1:]:
        if ch.isalpha():
            next_letter = ch
            break
    if next_letter is None and following.isalpha():
        next_letter = following
    if next_letter is not None and next_letter.isupper():
        return target.upper()
    if not target:
        return target
    return target[0].upper() + target[1:]


def transliterate(table: TranslitTable, text: str) -> str:
    """Rewrite ``text`` by the table; unmatched characters pass through."""
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        matched = False
        for length in range(min(table.max_source_len, n - i), 0, -1):
            span = text[i : i + length]
            key = span.lower()
            ctxs = table.entries.get(key)
            if not ctxs:
                continue
            context = _left_context(text, i, table.direction)
            target = ctxs.get(context) if context != "other" else None
            if target is None:
                target = ctxs.get("any")
            if target is None:
                continue
            following = text[i + length] if i + length < n else ""
            out.append(_case_target(span, following, target))
            i += length
            matched = True
            break
        if not matched:
            out.append(text[i])
            i += 1
    return "".join(out)


def translit_uk_to_latin(text: str) -> str:
    """Ukrainian Cyrillic to Czech-reader Latin script."""
    return transliterate(get_table(UK_TO_LATIN), text)


def translit_cs_to_cyrillic(text: str) -> str:
    """Czech Latin to Ukrainian-reader Cyrillic, acutes preserved."""
    return transliterate(get_table(CS_TO_CYRILLIC), text)


def for_language(lang: str):
    """The transliterator that renders ``lang`` text in the other script."""
    if lang == "uk":
        return translit_uk_to_latin
    if lang == "cs":
        return translit_cs_to_cyrillic
    return None
