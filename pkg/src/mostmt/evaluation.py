"""Corpus-level BLEU and chrF scoring with domain-stratified reporting.

BLEU uses clipped modified n-gram precisions up to order 4, uniform
weights, and the multiplicative brevity penalty; chrF is the character
n-gram F-score with precision/recall averaged over orders 1..6 and recall
weighted by beta=2, whitespace excluded from n-grams. Both report on a
0-100 scale. COMET is not implemented; report renderers emit an explicit
"unsupported" marker so table shapes stay comparable.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass

DOMAINS = ("news", "voice", "personal", "official", "games")
USER_TYPES = ("formal", "news", "other")
TOPICS = (
    "general personal conversation",
    "work",
    "housing",
    "transportation/travel",
    "school and education",
    "health",
    "politics",
)

_MANIFEST_HEADER = ["id", "domain", "user_type", "topic", "src", "ref"]


class EvalError(ValueError):
    """Scoring input problems: length or id misalignment."""


class ManifestError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class AnnotatedSegment:
    """One test-set row: source, reference, and its annotation labels."""

    id: str
    domain: str
    user_type: str
    topic: str
    src: str
    ref: str


@dataclass(frozen=True)
class MetricScore:
    metric: str
    value: float
    # BLEU components
    precisions: tuple[float, ...] | None = None
    brevity_penalty: float | None = None
    hyp_len: int | None = None
    ref_len: int | None = None
    # chrF components
    precision: float | None = None
    recall: float | None = None
    beta: float | None = None


# ---------------------------------------------------------------------------
# Tokenization

_13A_PUNCT = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_13A_PERIOD_BEFORE = re.compile(r"([^0-9])([\.,])")
_13A_PERIOD_AFTER = re.compile(r"([\.,])([^0-9])")
_13A_DASH = re.compile(r"([0-9])(-)")


def tokenize_13a(text: str) -> list[str]:
    """mteval-v13a-style tokenization: split out punctuation, keep numbers."""
    text = text.replace("<skipped>", "")
    text = text.replace("-\n", "").replace("\n", " ")
    text = (
        text.replace("&quot;", '"')
        .replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
    )
    text = f" {text} "
    text = _13A_PUNCT.sub(r" \1 ", text)
    text = _13A_PERIOD_BEFORE.sub(r"\1 \2 ", text)
    text = _13A_PERIOD_AFTER.sub(r" \1 \2", text)
    text = _13A_DASH.sub(r"\1 \2 ", text)
    return text.split()


def tokenize_whitespace(text: str) -> list[str]:
    return text.split()


TOKENIZERS = {"13a": tokenize_13a, "whitespace": tokenize_whitespace}


# ---------------------------------------------------------------------------
# BLEU

def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(
    hypotheses: list[str],
    references: list[str],
    tokenizer: str = "13a",
    max_order: int = 4,
) -> MetricScore:
    """Corpus-level BLEU against single references, 0-100 scale."""
    if len(hypotheses) != len(references):
        raise EvalError(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not any(r.strip() for r in references):
        raise EvalError("need at least one non-empty reference")
    tok = TOKENIZERS[tokenizer]

    hyp_len = ref_len = 0
    matches = [0] * max_order
    totals = [0] * max_order
    for hyp, ref in zip(hypotheses, references):
        hyp_toks, ref_toks = tok(hyp), tok(ref)
        hyp_len += len(hyp_toks)
        ref_len += len(ref_toks)
        for n in range(1, max_order + 1):
            hyp_grams = _ngram_counts(hyp_toks, n)
            ref_grams = _ngram_counts(ref_toks, n)
            matches[n - 1] += sum(
                min(count, ref_grams[gram]) for gram, count in hyp_grams.items()
            )
            totals[n - 1] += max(0, len(hyp_toks) - n + 1)

    precisions = tuple(
        m / t if t > 0 else 0.0 for m, t in zip(matches, totals)
    )
    if hyp_len == 0:
        bp = 0.0
    else:
        bp = min(1.0, math.exp(1.0 - ref_len / hyp_len))
    if hyp_len == 0 or any(p == 0.0 for p in precisions):
        value = 0.0
    else:
        value = 100.0 * bp * math.exp(
            sum(math.log(p) for p in precisions) / max_order
        )
    return MetricScore(
        metric="bleu",
        value=value,
        precisions=precisions,
        brevity_penalty=bp,
        hyp_len=hyp_len,
        ref_len=ref_len,
    )


# ---------------------------------------------------------------------------
# chrF

def _char_ngrams(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def chrf(
    hypotheses: list[str],
    references: list[str],
    n_max: int = 6,
    beta: float = 2.0,
) -> MetricScore:
    """Corpus-level chrF, whitespace excluded from character n-grams."""
    if len(hypotheses) != len(references):
        raise EvalError(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )
    hyp_totals = [0] * n_max
    ref_totals = [0] * n_max
    matches = [0] * n_max
    for hyp, ref in zip(hypotheses, references):
        hyp_chars = "".join(hyp.split())
        ref_chars = "".join(ref.split())
        for n in range(1, n_max + 1):
            hyp_grams = _char_ngrams(hyp_chars, n)
            ref_grams = _char_ngrams(ref_chars, n)
            matches[n - 1] += sum(
                min(count, ref_grams[gram]) for gram, count in hyp_grams.items()
            )
            hyp_totals[n - 1] += max(0, len(hyp_chars) - n + 1)
            ref_totals[n - 1] += max(0, len(ref_chars) - n + 1)

    # Orders with no n-grams on either side carry no signal and are
    # excluded, so identity corpora score exactly 100 regardless of length.
    effective = [
        i for i in range(n_max) if hyp_totals[i] > 0 or ref_totals[i] > 0
    ]
    if not effective:
        return MetricScore(
            metric="chrf", value=0.0, precision=0.0, recall=0.0, beta=beta
        )
    precision = sum(
        matches[i] / hyp_totals[i] if hyp_totals[i] else 0.0 for i in effective
    ) / len(effective)
    recall = sum(
        matches[i] / ref_totals[i] if ref_totals[i] else 0.0 for i in effective
    ) / len(effective)
    if precision == 0.0 and recall == 0.0:
        value = 0.0
    else:
        value = (
            100.0
            * (1 + beta**2)
            * precision
            * recall
            / (beta**2 * precision + recall)
        )
    return MetricScore(
        metric="chrf", value=value, precision=precision, recall=recall, beta=beta
    )


# ---------------------------------------------------------------------------
# Test-set manifests and stratified reports

def load_manifest(path) -> list[AnnotatedSegment]:
    """Read a tab-separated test-set manifest, validating closed vocabularies."""
    vocab = {"domain": DOMAINS, "user_type": USER_TYPES, "topic": TOPICS}
    segments: list[AnnotatedSegment] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header != _MANIFEST_HEADER:
            raise ManifestError(
                f"expected header {_MANIFEST_HEADER}, got {header}", 1
            )
        for line_no, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != len(_MANIFEST_HEADER):
                raise ManifestError(
                    f"expected {len(_MANIFEST_HEADER)} fields, got {len(fields)}",
                    line_no,
                )
            row = dict(zip(_MANIFEST_HEADER, fields))
            for key, allowed in vocab.items():
                if row[key] not in allowed:
                    raise ManifestError(
                        f"unknown {key} value {row[key]!r}", line_no
                    )
            if not row["src"] or not row["ref"]:
                raise ManifestError("empty src or ref", line_no)
            if row["id"] in seen_ids:
                raise ManifestError(f"duplicate id {row['id']!r}", line_no)
            seen_ids.add(row["id"])
            segments.append(AnnotatedSegment(**row))
    return segments


def load_hypotheses(path, ids: list[str] | None = None) -> list[str]:
    """Read hypotheses: one per line, or two-column ``id<TAB>text``.

    With the two-column form ``ids`` gives the required order; missing or
    unknown ids raise.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    while lines and not lines[-1].strip():
        lines.pop()
    if lines and "\t" in lines[0]:
        by_id = {}
        for ln in lines:
            seg_id, _, text = ln.partition("\t")
            by_id[seg_id] = text
        if ids is None:
            return list(by_id.values())
        missing = [i for i in ids if i not in by_id]
        if missing:
            raise EvalError(f"hypotheses missing ids: {missing[:5]}")
        return [by_id[i] for i in ids]
    return lines


@dataclass(frozen=True)
class ReportRow:
    group: str
    segments: int
    bleu: MetricScore
    chrf: MetricScore


def stratified_report(
    hypotheses: list[str] | dict[str, str],
    test_set: list[AnnotatedSegment],
    group_by: str = "domain",
    tokenizer: str = "13a",
) -> list[ReportRow]:
    """Per-group BLEU/chrF rows plus an ALL row over the whole corpus."""
    if group_by not in ("domain", "user_type", "topic"):
        raise EvalError(f"cannot group by {group_by!r}")
    if isinstance(hypotheses, dict):
        missing = [s.id for s in test_set if s.id not in hypotheses]
        if missing:
            raise EvalError(f"hypotheses missing ids: {missing[:5]}")
        aligned = [hypotheses[s.id] for s in test_set]
    else:
        if len(hypotheses) != len(test_set):
            raise EvalError(
                f"{len(hypotheses)} hypotheses vs {len(test_set)} test segments"
            )
        aligned = list(hypotheses)

    groups: dict[str, list[int]] = {}
    for idx, seg in enumerate(test_set):
        groups.setdefault(getattr(seg, group_by), []).append(idx)

    rows = []
    for value in sorted(groups):
        idxs = groups[value]
        hyp = [aligned[i] for i in idxs]
        ref = [test_set[i].ref for i in idxs]
        rows.append(
            ReportRow(value, len(idxs), bleu(hyp, ref, tokenizer), chrf(hyp, ref))
        )
    refs_all = [s.ref for s in test_set]
    rows.append(
        ReportRow(
            "ALL",
            len(test_set),
            bleu(aligned, refs_all, tokenizer),
            chrf(aligned, refs_all),
        )
    )
    return rows


def render_report(rows: list[ReportRow]) -> str:
    """Aligned plain-text table; the COMET column is explicitly unsupported."""
    header = ("group", "segments", "BLEU", "chrF", "COMET")
    table = [header]
    for row in rows:
        table.append(
            (
                row.group,
                str(row.segments),
                f"{row.bleu.value:.1f}",
                f"{row.chrf.value:.1f}",
                "unsupported",
            )
        )
    widths = [max(len(r[c]) for r in table) for c in range(len(header))]
    lines = []
    for r in table:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def report_to_json(rows: list[ReportRow]) -> str:
    payload = [
        {
            "group": row.group,
            "segments": row.segments,
            "bleu": round(row.bleu.value, 4),
            "chrf": round(row.chrf.value, 4),
            "comet": None,
        }
        for row in rows
    ]
    return json.dumps({"rows": payload, "comet": "unsupported"}, ensure_ascii=False)
