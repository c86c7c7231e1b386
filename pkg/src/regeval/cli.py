"""Command-line entry points: run, score-ll, report, disagreements, review-serve."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .client import GenerationParams
from .runner import RunConfig, RunStore, run_evaluation, write_disagreements


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", required=True, help="item file or per-subject directory")
    parser.add_argument("--task", required=True, choices=("mmlu", "mmlu_pro", "gsm8k", "triviaqa"))
    parser.add_argument("--model", required=True)
    parser.add_argument("--endpoint", required=True, help="OpenAI-compatible base URL")
    parser.add_argument("--regen-model", default=None)
    parser.add_argument("--method", action="append", default=None, help="repeatable; default all five")
    parser.add_argument("--instructed", action="store_true")
    parser.add_argument("--no-think", action="store_true")
    parser.add_argument("--max-tokens", type=int, default=4096)
    parser.add_argument("--temperature", type=float, default=0.6)
    parser.add_argument("--top-p", type=float, default=0.95)
    parser.add_argument("--top-k", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--concurrency", type=int, default=4)
    parser.add_argument("--cache-dir", default=None)
    parser.add_argument("--endpoint-kind", default="completions", choices=("completions", "chat"))
    parser.add_argument("--rule-method", default=None, help="override best-method selection")
    parser.add_argument("--out", required=True, help="run directory")


def _config_from_args(args: argparse.Namespace, baseline: bool = False) -> RunConfig:
    from .extraction import METHOD_IDS

    return RunConfig(
        dataset=args.dataset,
        task=args.task,
        model=args.model,
        endpoint_url=args.endpoint,
        out_dir=args.out,
        regen_model=args.regen_model,
        methods=tuple(args.method) if args.method else METHOD_IDS,
        instructed=args.instructed,
        think_mode=not args.no_think,
        baseline_loglikelihood=baseline,
        params=GenerationParams(
            temperature=args.temperature,
            top_p=args.top_p,
            top_k=args.top_k,
            max_tokens=args.max_tokens,
            seed=args.seed,
        ),
        seed=args.seed,
        cache_dir=args.cache_dir,
        concurrency=args.concurrency,
        endpoint_kind=args.endpoint_kind,
        rule_method=args.rule_method,
    )


def _cmd_run(args: argparse.Namespace) -> int:
    store = run_evaluation(_config_from_args(args, baseline=args.baseline_ll))
    print(f"run complete: {store.dir}")
    return 0


def _cmd_score_ll(args: argparse.Namespace) -> int:
    store = run_evaluation(_config_from_args(args, baseline=True))
    report = store.read_json("report.json")
    print(f"loglikelihood accuracy: {report['loglikelihood_accuracy']:.4f}")
    return 0


def _format_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["method", "accuracy"])
        for method, acc in report.get("method_accuracy", {}).items():
            writer.writerow([method, f"{acc:.6f}"])
        if "regen_accuracy" in report:
            writer.writerow(["regen", f"{report['regen_accuracy']:.6f}"])
        if "loglikelihood_accuracy" in report:
            writer.writerow(["loglikelihood", f"{report['loglikelihood_accuracy']:.6f}"])
        return out.getvalue()

    lines = [f"task={report.get('task')} model={report.get('model')}"]
    lines.append(
        f"items={report.get('items')} evaluated={report.get('evaluated_items')} "
        f"failed={report.get('failed_items')}"
    )
    for method, acc in report.get("method_accuracy", {}).items():
        lines.append(f"  {method:20s} accuracy={acc:.4f}")
    if "regen_accuracy" in report:
        lines.append(f"  {'regen':20s} accuracy={report['regen_accuracy']:.4f}")
    if "loglikelihood_accuracy" in report:
        lines.append(f"  {'loglikelihood':20s} accuracy={report['loglikelihood_accuracy']:.4f}")
    if "answer_distribution" in report:
        lines.append("answer distribution:")
        for method, counts in report["answer_distribution"].items():
            rendered = " ".join(f"{k}:{v}" for k, v in counts.items())
            lines.append(f"  {method:20s} {rendered}")
    if "confusion" in report:
        lines.append(f"confusion (rule={report.get('rule_best_method')} vs regen):")
        for cell, count in report["confusion"].items():
            lines.append(f"  {cell}: {count}")
    else:
        lines.append("confusion: not available (run has no regeneration records)")
    if "incomplete" in report:
        rb = report["incomplete"]["rule_best"]
        rg = report["incomplete"]["regen"]
        lines.append(
            f"incomplete thinking: fraction={rb['fraction_incomplete']:.4f} "
            f"rule_best={rb['outcome_percentages']} regen={rg['outcome_percentages']}"
        )
    return "\n".join(lines)


def _cmd_report(args: argparse.Namespace) -> int:
    store = RunStore(args.run)
    if not store.path("report.json").exists():
        print(f"error: no report.json under {args.run}", file=sys.stderr)
        return 1
    print(_format_report(store.read_json("report.json"), args.format))
    return 0


def _cmd_disagreements(args: argparse.Namespace) -> int:
    store = RunStore(args.run)
    sample = write_disagreements(store, args.n, args.seed)
    print(f"wrote {len(sample)} cases to {store.path('disagreements.jsonl')}")
    return 0


def _cmd_review_serve(args: argparse.Namespace) -> int:
    from .review import serve

    serve(args.run, bind=args.bind, ui_dir=args.ui)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regeval")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="full evaluation: generate, extract, regenerate, judge")
    _add_run_flags(run)
    run.add_argument("--baseline-ll", action="store_true", help="loglikelihood baseline only")
    run.set_defaults(func=_cmd_run)

    ll = sub.add_parser("score-ll", help="non-reasoning loglikelihood baseline")
    _add_run_flags(ll)
    ll.set_defaults(func=_cmd_score_ll)

    rep = sub.add_parser("report", help="summarize a completed run")
    rep.add_argument("run")
    rep.add_argument("--format", default="text", choices=("text", "json", "csv"))
    rep.set_defaults(func=_cmd_report)

    dis = sub.add_parser("disagreements", help="sample disagreement cases for adjudication")
    dis.add_argument("run")
    dis.add_argument("-n", type=int, default=300)
    dis.add_argument("--seed", type=int, default=0)
    dis.set_defaults(func=_cmd_disagreements)

    rev = sub.add_parser("review-serve", help="serve the adjudication API and UI")
    rev.add_argument("run")
    rev.add_argument("--bind", default="127.0.0.1:8765")
    rev.add_argument("--ui", default=None, help="static UI bundle directory")
    rev.set_defaults(func=_cmd_review_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
