"""Command-line surface binding the library into runnable workflows.

Subcommands: ingest, datagen, respond, critique, eval, bench. Every run
writes the fully resolved config snapshot into its output directory; wall
clocks, host info, and per-call latencies go to run_metadata.json so the
artifact files stay byte-comparable across runs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import json
import logging
import platform
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from . import bench as bench_mod
from .config import dump_config, load_config, merge_overrides
from .core import ElementKind, FactCheckArticle, VeracityLabel, normalize_label
from .critics import ModelCritics, RuleCritics, aggregate
from .datagen import (
    emit_jsonl,
    make_entity_replacements,
    make_factual_instances,
    make_number_replacements,
    make_offtopic_instances,
)
from .errors import ConfigError, CountergenError
from .ingest import (
    FieldMap,
    LoadResult,
    RejectRecord,
    dataset_stats,
    filter_by_label,
    load_shared_evidence,
    load_tsv,
    split,
)
from .llm import CompletionClient
from .metrics import score_response
from .pipeline import GenerationConfig, generate_counter_response, trace_to_dict

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _write_jsonl(path: Path, records: Iterable[dict]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False))
            handle.write("\n")
            count += 1
    return count


def _write_run_files(out_dir: Path, config: dict, started: float, extra: dict | None = None) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_config(config, out_dir / "config.resolved.yaml")
    metadata = {
        "timestamp_utc": _utc_now(),
        "host": platform.node(),
        "duration_s": time.perf_counter() - started,
    }
    if extra:
        metadata.update(extra)
    (out_dir / "run_metadata.json").write_text(
        json.dumps(metadata, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def _field_map(config: dict) -> FieldMap:
    fm = config["dataset"]["field_map"]
    return FieldMap(
        claim=fm["claim"],
        evidence=fm["evidence"],
        label=fm["label"],
        explanation=fm.get("explanation"),
        id=fm.get("id"),
    )


def _keep_labels(config: dict) -> set[VeracityLabel]:
    return {normalize_label(str(value)) for value in config["dataset"]["keep_labels"]}


def _load_dataset(config: dict) -> LoadResult:
    dataset = config["dataset"]
    field_map = _field_map(config)
    if dataset["format"] == "shared_evidence":
        if not dataset["claims_path"] or not dataset["evidence_path"]:
            raise ConfigError("shared_evidence format needs dataset.claims_path and dataset.evidence_path")
        return load_shared_evidence(
            dataset["claims_path"], dataset["evidence_path"], field_map, dataset["name"]
        )
    if dataset["format"] != "tsv":
        raise ConfigError(f"unknown dataset format: {dataset['format']!r}")
    if not dataset["path"]:
        raise ConfigError("dataset.path is required")
    return load_tsv(dataset["path"], field_map, dataset["name"])


def _article_dict(article: FactCheckArticle) -> dict:
    return {
        "id": article.id,
        "claim": article.claim,
        "evidence": article.evidence,
        "explanation": article.explanation,
        "label": article.label.value,
        "source": article.source,
    }


def _enabled_kinds(config: dict) -> frozenset[ElementKind]:
    return frozenset(ElementKind(name) for name in config["critics"]["enabled"])


def _critic_suite(config: dict):
    critics_cfg = config["critics"]
    rule = RuleCritics(topic_threshold=critics_cfg["topic_threshold"])
    if critics_cfg["mode"] == "rule":
        return rule
    endpoints = {
        ElementKind(kind): url
        for kind, url in critics_cfg["endpoints"].items()
        if url
    }
    fallback = rule if critics_cfg["mode"] == "mixed" else None
    return ModelCritics(
        endpoints,
        fallback=fallback,
        max_critique_tokens=critics_cfg["max_critique_tokens"],
    )


def _parallel_map(fn: Callable, items: Sequence, parallelism: int) -> list:
    if parallelism <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- subcommands


def _cmd_ingest(args: argparse.Namespace, config: dict) -> int:
    started = time.perf_counter()
    out_dir = Path(config["output_dir"])
    result = _load_dataset(config)
    kept = filter_by_label(result.articles, _keep_labels(config))
    ratios = tuple(config["split_ratios"])
    train, dev, test = split(kept, ratios=ratios, seed=config["seed"])

    out_dir.mkdir(parents=True, exist_ok=True)
    stats = dataset_stats(kept) if kept else None
    stats_payload: dict[str, Any] = {
        "n_loaded": len(result.articles),
        "n_rejected": len(result.rejects),
        "n_kept": len(kept),
        "split_sizes": {"train": len(train), "dev": len(dev), "test": len(test)},
    }
    if stats is not None:
        stats_payload["sections"] = {
            "claim": asdict(stats.claim),
            "evidence": asdict(stats.evidence),
            "explanation": asdict(stats.explanation) if stats.explanation else None,
        }
    (out_dir / "stats.json").write_text(
        json.dumps(stats_payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    for name, part in (("train", train), ("dev", dev), ("test", test)):
        _write_jsonl(out_dir / f"{name}.jsonl", (_article_dict(a) for a in part))
    _write_jsonl(
        out_dir / "rejects.jsonl",
        ({"row": r.row, "reason": r.reason, "raw": r.raw} for r in result.rejects),
    )
    _write_run_files(out_dir, config, started)
    print(
        f"ingest: {len(result.articles)} loaded, {len(result.rejects)} rejected, "
        f"{len(kept)} kept, split {len(train)}/{len(dev)}/{len(test)} -> {out_dir}"
    )
    return EXIT_OK


def _cmd_datagen(args: argparse.Namespace, config: dict) -> int:
    started = time.perf_counter()
    out_path = Path(args.out or Path(config["output_dir"]) / "train.jsonl")
    out_dir = out_path.parent
    result = _load_dataset(config)
    kept = filter_by_label(result.articles, _keep_labels(config))
    datagen_cfg = config["datagen"]

    offtopic_client = None
    if config["llm"]["endpoint"] and datagen_cfg["offtopic_count"] > 0:
        offtopic_client = CompletionClient(
            endpoint=config["llm"]["endpoint"],
            model=config["llm"]["model"],
            temperature=config["llm"]["temperature"],
            seed=config["llm"]["seed"],
            retry_budget=config["llm"]["retry_budget"],
            timeout=config["llm"]["timeout"],
        )

    def per_article(article):
        if not (article.explanation and article.explanation.strip()):
            return [], RejectRecord(row=-1, reason="missing explanation", raw={"id": article.id})
        rows = list(make_factual_instances(article))
        rows.extend(make_number_replacements(article, cap=datagen_cfg["number_cap"]))
        rows.extend(make_entity_replacements(article, cap=datagen_cfg["entity_cap"]))
        if offtopic_client is not None:
            rows.extend(
                make_offtopic_instances(
                    article,
                    offtopic_client,
                    count=datagen_cfg["offtopic_count"],
                    retries=datagen_cfg["retries"],
                )
            )
        return rows, None

    instances = []
    rejects = list(result.rejects)
    for rows, reject in _parallel_map(per_article, kept, config["parallelism"]):
        instances.extend(rows)
        if reject is not None:
            rejects.append(reject)

    out_dir.mkdir(parents=True, exist_ok=True)
    written = emit_jsonl(instances, out_path)
    _write_jsonl(
        out_dir / "datagen_rejects.jsonl",
        ({"row": r.row, "reason": r.reason, "raw": r.raw} for r in rejects),
    )
    _write_run_files(out_dir, config, started)
    print(f"datagen: {written} instances from {len(kept)} articles -> {out_path}")
    return EXIT_OK


def _cmd_respond(args: argparse.Namespace, config: dict) -> int:
    started = time.perf_counter()
    if not config["llm"]["endpoint"]:
        raise ConfigError("respond requires llm.endpoint")
    out_dir = Path(config["output_dir"])
    result = _load_dataset(config)
    kept = filter_by_label(result.articles, _keep_labels(config))
    if args.limit:
        kept = kept[: args.limit]

    gen_config = GenerationConfig(
        endpoint=config["llm"]["endpoint"],
        model_name=config["llm"]["model"],
        temperature=config["llm"]["temperature"],
        max_tokens=config["llm"]["max_tokens"],
        max_rounds=config["generation"]["max_rounds"],
        critic_mode=config["critics"]["mode"],
        enabled_critics=_enabled_kinds(config),
        topic_threshold=config["critics"]["topic_threshold"],
        seed=config["llm"]["seed"],
        prompt_char_budget=config["generation"]["prompt_char_budget"],
        truncate_evidence=config["generation"]["truncate_evidence"],
        verify_final=config["generation"]["verify_final"],
        retry_budget=config["llm"]["retry_budget"],
        timeout=config["llm"]["timeout"],
        template_dir=config["generation"]["template_dir"],
    )
    suite = _critic_suite(config)
    articles = {a.id: a for a in kept}
    traces = _parallel_map(
        lambda article: generate_counter_response(article, gen_config, suite),
        kept,
        config["parallelism"],
    )

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_jsonl(out_dir / "results.jsonl", (trace_to_dict(t) for t in traces))
    _write_jsonl(
        out_dir / "responses.jsonl",
        (
            {
                "id": t.article_id,
                "claim": articles[t.article_id].claim,
                "evidence": articles[t.article_id].evidence,
                "response": t.refined.text,
            }
            for t in traces
        ),
    )
    latencies = {t.article_id: list(t.latencies_s) for t in traces}
    _write_run_files(out_dir, config, started, extra={"per_article_latencies_s": latencies})
    print(f"respond: {len(traces)} traces -> {out_dir}")
    return EXIT_OK


def _read_response_records(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(json.loads(line))
    return records


def _cmd_critique(args: argparse.Namespace, config: dict) -> int:
    started = time.perf_counter()
    out_dir = Path(config["output_dir"])
    records = _read_response_records(args.input)
    suite = _critic_suite(config)
    kinds = [k for k in (ElementKind.NUMBER, ElementKind.ENTITY, ElementKind.TOPIC)
             if k in _enabled_kinds(config)]

    def run(record: dict) -> dict:
        parts = [
            suite.critique(kind, record["claim"], record["evidence"], record["response"])
            for kind in kinds
        ]
        agg = aggregate(*parts, expected_kinds=kinds)
        return {
            "id": record["id"],
            "all_positive": agg.all_positive,
            "text": agg.text,
            "parts": [
                {
                    "element_kind": p.element_kind.value,
                    "positive": p.positive,
                    "text": p.text,
                    "flagged": [
                        {"surface": f.surface, "suggestion": f.suggestion} for f in p.flagged
                    ],
                    "source": p.source,
                }
                for p in agg.parts
            ],
        }

    rows = _parallel_map(run, records, config["parallelism"])
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_jsonl(out_dir / "critiques.jsonl", rows)
    _write_run_files(out_dir, config, started)
    print(f"critique: {len(rows)} responses -> {out_dir}")
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace, config: dict) -> int:
    started = time.perf_counter()
    if not config["judge"]["endpoint"]:
        raise ConfigError("eval requires judge.endpoint")
    out_dir = Path(config["output_dir"])
    records = _read_response_records(args.input)
    if args.limit:
        records = records[: args.limit]
    judge = CompletionClient(
        endpoint=config["judge"]["endpoint"],
        model=config["judge"]["model"],
        temperature=config["judge"]["temperature"],
        retry_budget=config["judge"]["retry_budget"],
        timeout=config["judge"]["timeout"],
    )

    def run(record: dict) -> tuple[dict | None, dict | None]:
        try:
            report = score_response(
                judge,
                record["id"],
                record["claim"],
                record["evidence"],
                record["response"],
                gamma=config["eval"]["gamma"],
            )
            return asdict(report), None
        except CountergenError as exc:
            return None, {"id": record["id"], "error": str(exc)}

    outcomes = _parallel_map(run, records, config["parallelism"])
    reports = [report for report, _ in outcomes if report is not None]
    unscored = [err for _, err in outcomes if err is not None]

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_jsonl(out_dir / "reports.jsonl", reports)
    summary: dict[str, Any] = {
        "n_scored": len(reports),
        "n_unscored": len(unscored),
        "unscored": unscored,
    }
    if reports:
        for fieldname in ("numerical", "entity", "faithfulness", "refutation", "factscore", "overall"):
            summary[f"mean_{fieldname}"] = sum(r[fieldname] for r in reports) / len(reports)
    (out_dir / "summary.json").write_text(
        json.dumps(summary, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    _write_run_files(out_dir, config, started)
    print(f"eval: {len(reports)} scored, {len(unscored)} unscored -> {out_dir}")
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace, config: dict) -> int:
    started = time.perf_counter()
    out_dir = Path(config["output_dir"])
    bench_cfg = config["bench"]
    items = bench_cfg["items"]
    workload = bench_mod.critique_workload(items, seed=config["seed"])

    critic_sim = bench_mod.measure_throughput(
        lambda item: item,
        workload,
        mode="simulated",
        latency_model=bench_mod.LatencyModel(fixed_s=bench_cfg["critic_latency_s"]),
        subject_name="critic-simulated",
    )
    feedback_sim = bench_mod.measure_throughput(
        lambda item: item,
        workload,
        mode="simulated",
        latency_model=bench_mod.LatencyModel(fixed_s=bench_cfg["feedback_latency_s"]),
        subject_name="feedback-simulated",
    )
    results = [critic_sim, feedback_sim]
    if bench_cfg["measured"]:
        results.append(
            bench_mod.measure_throughput(
                bench_mod.rule_critique_subject(config["critics"]["topic_threshold"]),
                workload,
                mode="measured",
                subject_name="rule-critics-measured",
            )
        )

    payload = {
        "results": [asdict(r) for r in results],
        "simulated_rate_ratio": critic_sim.rate_per_s / feedback_sim.rate_per_s,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "throughput.json").write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    _write_run_files(out_dir, config, started)
    print(
        "bench: "
        + ", ".join(f"{r.subject}={r.rate_per_s:.3f}/s" for r in results)
        + f", ratio={payload['simulated_rate_ratio']:.2f} -> {out_dir}"
    )
    return EXIT_OK


# ------------------------------------------------------------------- parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="countergen",
        description="Counter-response generation, critique, and evaluation workflows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--out", help="output directory (or file for datagen)")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--parallelism", type=int, help="batch parallelism bound")

    p_ingest = sub.add_parser("ingest", help="load, filter, split, and summarize a dataset")
    common(p_ingest)
    p_ingest.add_argument("--in", dest="input", help="dataset path (TSV)")
    p_ingest.add_argument("--format", choices=["tsv", "shared_evidence"])
    p_ingest.add_argument("--claims", help="claims path for shared_evidence format")
    p_ingest.add_argument("--evidence", help="evidence document path for shared_evidence format")
    p_ingest.add_argument("--keep-labels", help="comma-separated labels to keep")

    p_datagen = sub.add_parser("datagen", help="emit critic training data as JSONL")
    common(p_datagen)
    p_datagen.add_argument("--in", dest="input", help="dataset path (TSV)")
    p_datagen.add_argument("--offtopic-endpoint", help="completion endpoint for off-topic rewrites")
    p_datagen.add_argument("--offtopic-count", type=int, help="off-topic instances per article")
    p_datagen.add_argument("--keep-labels", help="comma-separated labels to keep")

    p_respond = sub.add_parser("respond", help="batch counter-response generation with traces")
    common(p_respond)
    p_respond.add_argument("--in", dest="input", help="dataset path (TSV)")
    p_respond.add_argument("--endpoint", help="generation LLM endpoint")
    p_respond.add_argument("--model", help="generation model name")
    p_respond.add_argument("--max-rounds", type=int)
    p_respond.add_argument("--no-critics", help="comma-separated critic kinds to disable")
    p_respond.add_argument("--critic-mode", choices=["rule", "model", "mixed"])
    p_respond.add_argument("--verify", action="store_true", help="re-run critics on the final response for reporting")
    p_respond.add_argument("--limit", type=int, help="process at most N articles")
    p_respond.add_argument("--keep-labels", help="comma-separated labels to keep")

    p_critique = sub.add_parser("critique", help="run critics over existing responses")
    common(p_critique)
    p_critique.add_argument("--in", dest="input", required=True, help="responses JSONL")
    p_critique.add_argument("--no-critics", help="comma-separated critic kinds to disable")
    p_critique.add_argument("--critic-mode", choices=["rule", "model", "mixed"])

    p_eval = sub.add_parser("eval", help="metric reports for existing responses")
    common(p_eval)
    p_eval.add_argument("--in", dest="input", required=True, help="responses JSONL")
    p_eval.add_argument("--judge-endpoint", help="judge LLM endpoint")
    p_eval.add_argument("--judge-model", help="judge model name")
    p_eval.add_argument("--gamma", type=float, help="atomic-fact penalty parameter")
    p_eval.add_argument("--limit", type=int)

    p_bench = sub.add_parser("bench", help="critique throughput benchmark")
    common(p_bench)
    p_bench.add_argument("--items", type=int, help="workload size")
    p_bench.add_argument("--critic-latency", type=float, help="simulated critic latency (s)")
    p_bench.add_argument("--feedback-latency", type=float, help="simulated feedback latency (s)")
    p_bench.add_argument("--no-measured", action="store_true", help="skip the measured rule-critic run")

    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {
        "output_dir": getattr(args, "out", None),
        "seed": getattr(args, "seed", None),
        "parallelism": getattr(args, "parallelism", None),
    }
    if getattr(args, "input", None) and args.command in ("ingest", "datagen", "respond"):
        overrides["dataset.path"] = args.input
    if getattr(args, "format", None):
        overrides["dataset.format"] = args.format
    if getattr(args, "claims", None):
        overrides["dataset.claims_path"] = args.claims
    if getattr(args, "evidence", None):
        overrides["dataset.evidence_path"] = args.evidence
    if getattr(args, "keep_labels", None):
        overrides["dataset.keep_labels"] = [s.strip() for s in args.keep_labels.split(",") if s.strip()]
    if getattr(args, "offtopic_endpoint", None):
        overrides["llm.endpoint"] = args.offtopic_endpoint
    if getattr(args, "offtopic_count", None) is not None:
        overrides["datagen.offtopic_count"] = args.offtopic_count
    if getattr(args, "endpoint", None):
        overrides["llm.endpoint"] = args.endpoint
    if getattr(args, "model", None):
        overrides["llm.model"] = args.model
    if getattr(args, "max_rounds", None) is not None:
        overrides["generation.max_rounds"] = args.max_rounds
    if getattr(args, "verify", False):
        overrides["generation.verify_final"] = True
    if getattr(args, "critic_mode", None):
        overrides["critics.mode"] = args.critic_mode
    if getattr(args, "no_critics", None):
        disabled = {s.strip() for s in args.no_critics.split(",") if s.strip()}
        unknown = disabled - {k.value for k in ElementKind}
        if unknown:
            raise ConfigError(f"unknown critic kinds: {', '.join(sorted(unknown))}")
        overrides["critics.enabled"] = [
            k.value for k in ElementKind if k.value not in disabled
        ]
    if getattr(args, "judge_endpoint", None):
        overrides["judge.endpoint"] = args.judge_endpoint
    if getattr(args, "judge_model", None):
        overrides["judge.model"] = args.judge_model
    if getattr(args, "gamma", None) is not None:
        overrides["eval.gamma"] = args.gamma
    if getattr(args, "items", None) is not None:
        overrides["bench.items"] = args.items
    if getattr(args, "critic_latency", None) is not None:
        overrides["bench.critic_latency_s"] = args.critic_latency
    if getattr(args, "feedback_latency", None) is not None:
        overrides["bench.feedback_latency_s"] = args.feedback_latency
    if getattr(args, "no_measured", False):
        overrides["bench.measured"] = False
    return overrides


_COMMANDS = {
    "ingest": _cmd_ingest,
    "datagen": _cmd_datagen,
    "respond": _cmd_respond,
    "critique": _cmd_critique,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        config = merge_overrides(config, _overrides_from_args(args))
        return _COMMANDS[args.command](args, config)
    except ConfigError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except CountergenError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
