"""Command-line entrypoints: serving, corpus tooling, scoring, privacy ops."""

from __future__ import annotations

import argparse
import json
import sys

from . import corpus as corpus_mod
from . import evaluation, translit
from .backends import BackendRegistry, RemoteBackend, RemoteConfig, TranslationRoute
from .gateway import load_config, serve
from .privacy import UsageLog, delete_client_data, flag_for_review, pseudonymize
from .stats import aggregate_stats


def _read_lines(path):
    if path == "-" or path is None:
        return [line.rstrip("\n") for line in sys.stdin]
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]


def cmd_serve(args):
    serve(load_config(args.config))
    return 0


def cmd_corpus_ingest(args):
    stats = corpus_mod.IngestStats()
    if args.format == "aligned-plaintext":
        if len(args.paths) != 2:
            print("aligned-plaintext needs exactly two files", file=sys.stderr)
            return 2
        pairs = corpus_mod.ingest(tuple(args.paths), args.format, args.origin, stats)
    else:
        pairs = corpus_mod.ingest(args.paths[0], args.format, args.origin, stats)
    try:
        for pair in pairs:
            print(f"{pair.src}\t{pair.tgt}")
    except corpus_mod.IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"pairs: {stats.pairs}, skipped: {stats.skipped}", file=sys.stderr)
    return 0


def cmd_corpus_filter(args):
    config = (
        corpus_mod.RuleConfig.from_file(args.rules)
        if args.rules
        else corpus_mod.RuleConfig()
    )
    pairs = []
    for line in _read_lines(args.input):
        fields = line.split("\t")
        if len(fields) >= 2:
            pairs.append(corpus_mod.ParallelPair(fields[0], fields[1]))
    verdicts, rejections = corpus_mod.filter_report(pairs, config)
    kept = 0
    for pair, verdict in verdicts:
        if verdict.kept:
            kept += 1
            print(f"{pair.src}\t{pair.tgt}")
    if args.report:
        print(f"total\t{len(pairs)}", file=sys.stderr)
        print(f"kept\t{kept}", file=sys.stderr)
        for rule_id, count in rejections.items():
            print(f"{rule_id}\t{count}", file=sys.stderr)
    return 0


def cmd_corpus_plan_blocks(args):
    try:
        ratio_a, _, ratio_s = args.ratio.partition(":")
        plan = corpus_mod.plan_blocks(
            args.authentic, args.synthetic, args.block_size,
            (int(ratio_a), int(ratio_s)),
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for block in plan.blocks:
        print(f"{block.source}\t{block.count}")
    return 0


def cmd_corpus_backtranslate(args):
    registry = BackendRegistry()
    backend = RemoteBackend(
        "remote", args.src, args.tgt,
        RemoteConfig(url=args.endpoint, timeout=args.timeout),
    )
    registry.register(backend)
    route = TranslationRoute.direct(args.src, args.tgt, "remote")
    mono = _read_lines(args.input)
    for pair in corpus_mod.backtranslate_round(mono, registry, route, start_at=args.start_at):
        print(f"{pair.src}\t{pair.tgt}")
    return 0


def cmd_eval_score(args):
    segments = evaluation.load_manifest(args.manifest)
    hyps = evaluation.load_hypotheses(args.hyp, ids=[s.id for s in segments])
    rows = evaluation.stratified_report(
        hyps, segments, group_by=args.group_by, tokenizer=args.tokenizer
    )
    if args.json:
        print(evaluation.report_to_json(rows))
    else:
        print(evaluation.render_report(rows))
    return 0


def cmd_privacy_scrub(args):
    for line in _read_lines(args.input):
        scrubbed, spans = pseudonymize(line, lang=args.lang, seed=args.seed)
        if args.flag_for_review and flag_for_review(scrubbed, spans, lang=args.lang):
            print(f"REVIEW\t{scrubbed}")
        else:
            print(scrubbed)
    return 0


def cmd_privacy_delete_client(args):
    removed = delete_client_data(UsageLog(args.log), args.client_id)
    print(f"removed {removed} records")
    return 0


def cmd_translit(args):
    fn = (
        translit.translit_uk_to_latin
        if args.direction == "uk_to_latin"
        else translit.translit_cs_to_cyrillic
    )
    for line in _read_lines(args.input):
        print(fn(line))
    return 0


def cmd_stats(args):
    report = aggregate_stats(args.log, args.date_from, args.date_to)
    print(json.dumps(report.to_json(), ensure_ascii=False, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mostmt")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP gateway")
    p.add_argument("--config", default=None, help="TOML config path")
    p.set_defaults(fn=cmd_serve)

    corpus_parser = sub.add_parser("corpus", help="parallel corpus tooling")
    corpus_sub = corpus_parser.add_subparsers(dest="subcommand", required=True)

    p = corpus_sub.add_parser("ingest", help="read a corpus into src<TAB>tgt lines")
    p.add_argument("paths", nargs="+")
    p.add_argument("--format", choices=["aligned-plaintext", "tab-separated"],
                   default="tab-separated")
    p.add_argument("--origin", default="")
    p.set_defaults(fn=cmd_corpus_ingest)

    p = corpus_sub.add_parser("filter", help="apply the filter rules")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--rules", default=None, help="TOML rule config")
    p.add_argument("--report", action="store_true",
                   help="print per-rule rejection counts to stderr")
    p.set_defaults(fn=cmd_corpus_filter)

    p = corpus_sub.add_parser("plan-blocks", help="plan a block training schedule")
    p.add_argument("--authentic", type=int, required=True)
    p.add_argument("--synthetic", type=int, required=True)
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--ratio", default="1:1", help="authentic:synthetic, e.g. 2:1")
    p.set_defaults(fn=cmd_corpus_plan_blocks)

    p = corpus_sub.add_parser("backtranslate", help="build synthetic pairs via a gateway")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--endpoint", required=True, help="gateway base URL")
    p.add_argument("--src", required=True, help="monolingual language")
    p.add_argument("--tgt", required=True, help="language to backtranslate into")
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--start-at", type=int, default=0, help="resume cursor")
    p.set_defaults(fn=cmd_corpus_backtranslate)

    eval_parser = sub.add_parser("eval", help="scoring and reports")
    eval_sub = eval_parser.add_subparsers(dest="subcommand", required=True)
    p = eval_sub.add_parser("score", help="BLEU/chrF report for a test set")
    p.add_argument("--manifest", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--group-by", default="domain",
                   choices=["domain", "user_type", "topic"])
    p.add_argument("--tokenizer", default="13a", choices=["13a", "whitespace"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_eval_score)

    privacy_parser = sub.add_parser("privacy", help="pseudonymization and deletion")
    privacy_sub = privacy_parser.add_subparsers(dest="subcommand", required=True)
    p = privacy_sub.add_parser("scrub", help="pseudonymize text lines")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--lang", default="cs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--flag-for-review", action="store_true")
    p.set_defaults(fn=cmd_privacy_scrub)
    p = privacy_sub.add_parser("delete-client", help="purge a client's records")
    p.add_argument("client_id")
    p.add_argument("--log", required=True)
    p.set_defaults(fn=cmd_privacy_delete_client)

    p = sub.add_parser("translit", help="transliterate text lines")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--direction", required=True,
                   choices=["uk_to_latin", "cs_to_cyrillic"])
    p.set_defaults(fn=cmd_translit)

    p = sub.add_parser("stats", help="aggregate a usage log")
    p.add_argument("--log", required=True)
    p.add_argument("--from", dest="date_from", default=None)
    p.add_argument("--to", dest="date_to", default=None)
    p.set_defaults(fn=cmd_stats)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
