"""Parallel-corpus ingestion, filtering, and block back-translation planning.

Filtering is per-pair and stateless: each rule inspects only the pair and
its own configuration, so verdicts are permutation-invariant over the
corpus. The block planner realizes the data-mixing schedule of iterated
block back-translation: homogeneous authentic/synthetic blocks alternating
in a configured ratio, with trailing blocks truncated to the data left.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from .backends import (
    BackendRegistry,
    BackendUnavailableError,
    TranslationRoute,
    translate,
)
from .textproc import CYRILLIC, LATIN, Segment, detect_script, normalize


class IngestError(ValueError):
    """Fatal ingestion problem, e.g. unaligned file lengths."""


@dataclass(frozen=True)
class ParallelPair:
    src: str
    tgt: str
    origin: str = ""
    authentic: bool = True


@dataclass(frozen=True)
class FilterVerdict:
    kept: bool
    failed_rules: tuple[str, ...] = ()


@dataclass(frozen=True)
class RuleConfig:
    """Tunable thresholds for the default rule set."""

    length_ratio_min: float = 1 / 3
    length_ratio_max: float = 3.0
    src_script: str = LATIN
    tgt_script: str = CYRILLIC
    entity_slack: int = 2
    enabled: tuple[str, ...] = (
        "length-ratio",
        "script-consistency",
        "number-consistency",
        "entity-pattern",
        "copy-detection",
    )

    @classmethod
    def from_file(cls, path) -> "RuleConfig":
        """Rule configuration as TOML: thresholds plus the enabled rule ids."""
        import sys

        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        defaults = cls()
        enabled = tuple(data.get("enabled", defaults.enabled))
        unknown = [r for r in enabled if r not in RULES]
        if unknown:
            raise ValueError(f"unknown rule ids: {unknown}")
        return cls(
            length_ratio_min=float(data.get("length_ratio_min", defaults.length_ratio_min)),
            length_ratio_max=float(data.get("length_ratio_max", defaults.length_ratio_max)),
            src_script=data.get("src_script", defaults.src_script),
            tgt_script=data.get("tgt_script", defaults.tgt_script),
            entity_slack=int(data.get("entity_slack", defaults.entity_slack)),
            enabled=enabled,
        )


_NUMBER = re.compile(r"\d+")
_CAP_TOKEN = re.compile(r"\b\w+", re.UNICODE)


def _digit_multiset(text: str) -> dict[str, int]:
    counts: dict[str, int] = {}
    for token in _NUMBER.findall(text):
        counts[token] = counts.get(token, 0) + 1
    return counts


def _capitalized_count(text: str) -> int:
    return sum(
        1 for m in _CAP_TOKEN.finditer(text) if m.group(0)[:1].isupper()
    )


def _majority_script(text: str) -> str:
    return detect_script(text)


def _rule_length_ratio(pair: ParallelPair, config: RuleConfig) -> bool:
    if not pair.src or not pair.tgt:
        return False
    ratio = len(pair.src) / len(pair.tgt)
    return config.length_ratio_min <= ratio <= config.length_ratio_max


def _rule_script_consistency(pair: ParallelPair, config: RuleConfig) -> bool:
    return (
        _majority_script(pair.src) == config.src_script
        and _majority_script(pair.tgt) == config.tgt_script
    )


def _rule_number_consistency(pair: ParallelPair, config: RuleConfig) -> bool:
    return _digit_multiset(pair.src) == _digit_multiset(pair.tgt)


def _rule_entity_pattern(pair: ParallelPair, config: RuleConfig) -> bool:
    diff = abs(_capitalized_count(pair.src) - _capitalized_count(pair.tgt))
    return diff <= config.entity_slack


def _rule_copy_detection(pair: ParallelPair, config: RuleConfig) -> bool:
    return pair.src != pair.tgt


RULES = {
    "length-ratio": _rule_length_ratio,
    "script-consistency": _rule_script_consistency,
    "number-consistency": _rule_number_consistency,
    "entity-pattern": _rule_entity_pattern,
    "copy-detection": _rule_copy_detection,
}


def filter_pair(pair: ParallelPair, config: RuleConfig | None = None) -> FilterVerdict:
    """Evaluate every enabled rule; kept iff none fail."""
    config = config or RuleConfig()
    failed = tuple(
        rule_id
        for rule_id in config.enabled
        if not RULES[rule_id](pair, config)
    )
    return FilterVerdict(kept=not failed, failed_rules=failed)


def filter_report(
    pairs: Iterable[ParallelPair], config: RuleConfig | None = None
) -> tuple[list[tuple[ParallelPair, FilterVerdict]], dict[str, int]]:
    """Verdict per pair plus per-rule rejection counts."""
    config = config or RuleConfig()
    verdicts = []
    rejections = {rule_id: 0 for rule_id in config.enabled}
    for pair in pairs:
        verdict = filter_pair(pair, config)
        verdicts.append((pair, verdict))
        for rule_id in verdict.failed_rules:
            rejections[rule_id] += 1
    return verdicts, rejections


# ---------------------------------------------------------------------------
# Ingestion

@dataclass
class IngestStats:
    pairs: int = 0
    skipped: int = 0


def ingest_aligned(
    src_path, tgt_path, origin: str = "", stats: IngestStats | None = None
) -> Iterator[ParallelPair]:
    """Two aligned plaintext files, one sentence per line, equal line counts."""
    with open(src_path, encoding="utf-8", errors="replace") as fh:
        src_lines = fh.read().splitlines()
    with open(tgt_path, encoding="utf-8", errors="replace") as fh:
        tgt_lines = fh.read().splitlines()
    if len(src_lines) != len(tgt_lines):
        raise IngestError(
            f"line count mismatch: {src_path} has {len(src_lines)}, "
            f"{tgt_path} has {len(tgt_lines)}"
        )
    for src, tgt in zip(src_lines, tgt_lines):
        src, tgt = normalize(src), normalize(tgt)
        if not src or not tgt:
            if stats:
                stats.skipped += 1
            continue
        if stats:
            stats.pairs += 1
        yield ParallelPair(src=src, tgt=tgt, origin=origin)


def ingest_tsv(
    path, origin: str = "", stats: IngestStats | None = None
) -> Iterator[ParallelPair]:
    """Tab-separated src/tgt pairs; short or undecodable lines are skipped."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        for line in fh:
            fields = line.rstrip("\n").split("\t")
            if len(fields) < 2:
                if stats:
                    stats.skipped += 1
                continue
            src, tgt = normalize(fields[0]), normalize(fields[1])
            if not src or not tgt:
                if stats:
                    stats.skipped += 1
                continue
            if stats:
                stats.pairs += 1
            yield ParallelPair(src=src, tgt=tgt, origin=origin)


def ingest(paths, fmt: str, origin: str = "", stats: IngestStats | None = None):
    """Dispatch on format: "aligned-plaintext" (two paths) or "tab-separated"."""
    if fmt == "aligned-plaintext":
        src_path, tgt_path = paths
        return ingest_aligned(src_path, tgt_path, origin=origin, stats=stats)
    if fmt == "tab-separated":
        (path,) = paths if isinstance(paths, (list, tuple)) else (paths,)
        return ingest_tsv(path, origin=origin, stats=stats)
    raise ValueError(f"unknown ingest format {fmt!r}")


# ---------------------------------------------------------------------------
# Block planning

@dataclass(frozen=True)
class Block:
    source: str  # "authentic" | "synthetic"
    count: int


@dataclass(frozen=True)
class BlockPlan:
    block_size: int
    blocks: tuple[Block, ...] = field(default_factory=tuple)

    def total(self, source: str) -> int:
        return sum(b.count for b in self.blocks if b.source == source)


def plan_blocks(
    authentic: int, synthetic: int, block_size: int, ratio: tuple[int, int]
) -> BlockPlan:
    """Alternate homogeneous blocks in ``ratio`` (authentic:synthetic) until
    both pools drain; trailing blocks truncate to the remaining data."""
    ratio_a, ratio_s = ratio
    if block_size < 1:
        raise ValueError("block size must be >= 1")
    if ratio_a < 0 or ratio_s < 0 or (ratio_a == 0 and ratio_s == 0):
        raise ValueError(f"invalid ratio {ratio_a}:{ratio_s}")

    remaining = {"authentic": authentic if ratio_a else 0,
                 "synthetic": synthetic if ratio_s else 0}
    blocks: list[Block] = []
    while remaining["authentic"] > 0 or remaining["synthetic"] > 0:
        for source, per_cycle in (("authentic", ratio_a), ("synthetic", ratio_s)):
            for _ in range(per_cycle):
                take = min(block_size, remaining[source])
                if take > 0:
                    blocks.append(Block(source=source, count=take))
                    remaining[source] -= take
    return BlockPlan(block_size=block_size, blocks=tuple(blocks))


# ---------------------------------------------------------------------------
# Back-translation

def backtranslate_round(
    monolingual: Iterable[str],
    registry: BackendRegistry,
    route: TranslationRoute,
    origin: str = "backtranslation",
    start_at: int = 0,
) -> Iterator[ParallelPair]:
    """Turn target-side monolingual sentences into synthetic pairs.

    The backend translates tgt->src; each output becomes the source side of
    a synthetic pair with the original sentence as target. ``start_at``
    resumes a partially completed round after a backend failure.
    """
    for index, sentence in enumerate(monolingual):
        if index < start_at:
            continue
        sentence = normalize(sentence)
        if not sentence:
            continue
        segment = Segment(
            text=sentence, lang=route.src, script=detect_script(sentence), index=0
        )
        try:
            (translated,) = translate(registry, route, [segment])
        except BackendUnavailableError as exc:
            exc.resume_cursor = index  # type: ignore[attr-defined]
            raise
        yield ParallelPair(
            src=translated.text, tgt=sentence, origin=origin, authentic=False
        )
