"""Pipeline orchestration as CLI subcommands.

Every command writes JSON-lines (first line is a ``{"_meta": ...}`` provenance
object: config hash, seed, toolkit version, input digests) plus a short
human-readable summary on stdout. Reruns on identical inputs produce
byte-identical reports. Exit codes: 0 success, 2 usage, 3 missing input,
4 provider failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from pathlib import Path

import numpy as np

from . import __version__, cloze, nameaudit, scoring, stats, strsearch
from .config import RunConfig, derive_seed, load_config_file, parse_bool, resolve_config
from .corpus import RecordFormat, ScanCounters, ShardManifest, iter_documents
from .errors import ClozeAuditError, ProviderError
from .providers import (
    CachedGenerationProvider,
    EchoGenerationProvider,
    GenerationRequest,
    HashedBagOfWordsEmbedder,
    HeuristicNER,
    HttpEmbeddingProvider,
    HttpGenerationProvider,
    ResponseCache,
    StaticGenerationProvider,
    generate,
)
from .timeline import parse_timeline_csv, word_count

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_INPUT = 3
EXIT_PROVIDER = 4


class MissingInputError(ClozeAuditError):
    def __init__(self, path):
        super().__init__(f"missing required input: {path}")
        self.path = str(path)


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------

def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _require(path: str | Path) -> Path:
    p = Path(path)
    if not path or not p.exists():
        raise MissingInputError(path)
    return p


def _manifest(path: str, fmt: str) -> ShardManifest:
    p = _require(path)
    manifest = ShardManifest.from_path(p, RecordFormat(fmt) if fmt else None)
    if not manifest.shard_paths:
        raise MissingInputError(f"{path} (no shards found)")
    return manifest


def _input_digests(paths) -> dict:
    out = {}
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for child in sorted(p.rglob("*")):
                if child.is_file():
                    out[str(child)] = _sha256_file(child)
        elif p.is_file():
            out[str(p)] = _sha256_file(p)
    return out


def _meta(config: RunConfig, inputs) -> dict:
    return {
        "_meta": {
            "config_hash": config.hash(),
            "seed": config.seed,
            "version": __version__,
            "inputs": _input_digests(inputs),
        }
    }


def _write_jsonl(path: Path, meta: dict, objs) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(meta, sort_keys=True, ensure_ascii=False) + "\n")
        for obj in objs:
            fh.write(json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n")


def read_jsonl(path: str | Path) -> tuple[dict, list[dict]]:
    """Read a report file back: (meta, records)."""
    meta: dict = {}
    records: list[dict] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "_meta" in obj:
                meta = obj["_meta"]
            else:
                records.append(obj)
    return meta, records


def _generation_provider(config: RunConfig):
    spec = config.generation_provider
    if spec == "echo":
        provider = EchoGenerationProvider()
    elif spec.startswith("static:"):
        provider = StaticGenerationProvider(spec.split(":", 1)[1])
    elif spec == "http":
        provider = HttpGenerationProvider()
    else:
        raise ValueError(f"unknown generation provider {spec!r}")
    if config.cache_dir:
        provider = CachedGenerationProvider(provider, ResponseCache(config.cache_dir))
    return provider


def _embedding_provider(config: RunConfig):
    spec = config.embedding_provider
    if spec == "bow":
        return HashedBagOfWordsEmbedder()
    if spec == "http":
        return HttpEmbeddingProvider()
    raise ValueError(f"unknown embedding provider {spec!r}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_audit_strings(config: RunConfig) -> int:
    archive = _manifest(config.archive, config.archive_format)
    corpus = _manifest(config.corpus, config.corpus_format)
    counters = ScanCounters()
    docs = [d.with_sentences() for d in iter_documents(archive, counters)]
    audits = strsearch.audit_documents(
        docs, corpus, tau=config.tau_seen,
        min_sentence_bytes=config.min_sentence_bytes,
        workers=config.effective_workers)
    out = Path(config.out_dir) / "audit_strings.jsonl"
    _write_jsonl(out, _meta(config, [config.archive, config.corpus]),
                 (a.to_json_obj() for a in audits))
    seen = sum(1 for a in audits if a.label == strsearch.SEEN)
    frac = seen / len(audits) if audits else 0.0
    print(f"audit-strings: {seen}/{len(audits)} documents SEEN "
          f"({100.0 * frac:.1f}%) at tau={config.tau_seen} -> {out}")
    return EXIT_OK


def cmd_audit_names(config: RunConfig) -> int:
    archive = _manifest(config.archive, config.archive_format)
    corpus = _manifest(config.corpus, config.corpus_format)
    counters = ScanCounters()
    docs = list(iter_documents(archive, counters))
    candidates = nameaudit.extract_name_candidates(
        docs, HeuristicNER(), max_names=config.max_names,
        max_freq=config.max_freq, min_docs=config.min_docs)
    if not candidates:
        print("audit-names: no name candidates survived the long-tail filter")
        out = Path(config.out_dir) / "audit_names.jsonl"
        _write_jsonl(out, _meta(config, [config.archive, config.corpus]), [])
        return EXIT_OK
    automaton = nameaudit.build_automaton([c.name for c in candidates])
    attestations = nameaudit.scan_names(
        automaton, corpus, snippet_cap=config.snippet_cap, tau=config.tau_name,
        boundary=config.boundary, workers=config.effective_workers)
    inputs = [config.archive, config.corpus]
    if config.exclusions:
        exclusions = nameaudit.load_exclusions(_require(config.exclusions))
        attestations = nameaudit.apply_exclusion_list(attestations, exclusions)
        inputs.append(config.exclusions)
    out = Path(config.out_dir) / "audit_names.jsonl"
    _write_jsonl(out, _meta(config, inputs), (a.to_json_obj() for a in attestations))
    unseen = sum(1 for a in attestations if a.label == strsearch.UNSEEN)
    print(f"audit-names: {len(candidates)} candidates, {len(attestations)} kept, "
          f"{unseen} UNSEEN at tau={config.tau_name} -> {out}")
    return EXIT_OK


def _load_timelines(path: Path):
    if path.is_dir():
        files = sorted(path.glob("*.csv"))
        if not files:
            raise MissingInputError(f"{path} (no timeline CSVs)")
        return [parse_timeline_csv(f) for f in files]
    return [parse_timeline_csv(path)]


def cmd_make_cloze(config: RunConfig) -> int:
    path = _require(config.timelines)
    timelines = [t for t in _load_timelines(path) if len(t) >= 1]
    kind = cloze.MaskKind(config.cloze_kind)
    template = cloze.TemplateId(config.template)
    instances = []
    for tl in timelines:
        if kind == cloze.MaskKind.FULL:
            instances.extend(cloze.mask_full(tl, m) for m in range(1, len(tl) + 1))
        elif kind == cloze.MaskKind.PARTIAL:
            for m in range(1, len(tl) + 1):
                instances.extend(cloze.partial_sweep(tl, m))
        else:
            if len(tl) >= config.ngram_k:
                instances.extend(cloze.ngram_windows(tl, config.ngram_k))
    out = Path(config.out_dir) / "cloze_instances.jsonl"
    _write_jsonl(out, _meta(config, [config.timelines]),
                 (cloze.instance_to_json_obj(inst, template, config.hint)
                  for inst in instances))
    print(f"make-cloze: {len(instances)} {kind.value} instances "
          f"from {len(timelines)} timelines -> {out}")
    return EXIT_OK


def _eval_cell(instances, template: cloze.TemplateId, hint: bool, config: RunConfig,
               generator, embedder):
    """Generate, parse, and score every instance under one (template, hint) cell."""
    preds: list[str | None] = []
    golds: list[str] = []
    ids: list[str] = []
    metadata: list[dict] = []
    unparseable = 0
    for inst, source_meta in instances:
        system, user = cloze.render_cloze_prompt(
            inst, template, event_type_hint=hint, metadata=source_meta)
        response = generate(generator, GenerationRequest(
            user=user, system=system, max_new_tokens=config.max_new_tokens,
            deterministic=True))
        parsed = cloze.parse_model_output(response.text, expected_lines=len(inst.gold))
        if parsed.unparseable:
            unparseable += 1
        for i, gold in enumerate(inst.gold):
            pred = parsed.lines[i] if i < len(parsed.lines) else None
            preds.append(pred)
            golds.append(gold)
            suffix = f"#{i + 1}" if len(inst.gold) > 1 else ""
            ids.append(f"{inst.instance_id}{suffix}")
            metadata.append({
                "event_type": inst.masked_event_types[i],
                "event_word_count": word_count(gold),
                "timeline_length": inst.timeline_length,
                "position_bucket": scoring.position_bucket(
                    inst.spec.position + i, inst.timeline_length),
            })
    scored = scoring.score_predictions(
        preds, golds, embedder, config.epsilon, instance_ids=ids,
        task_prefix=config.task_prefix or None)
    return scored, metadata, unparseable


def cmd_run_eval(config: RunConfig) -> int:
    instances_path = _require(config.instances)
    _, records = read_jsonl(instances_path)
    loaded = []
    for obj in records:
        inst, _, _ = cloze.instance_from_json_obj(obj)
        loaded.append((inst, obj.get("source_meta")))
    if not loaded:
        raise MissingInputError(f"{instances_path} (no instances)")

    templates = ([cloze.TemplateId(config.template)] if config.template != "all"
                 else list(cloze.TemplateId))
    hints = [config.hint] if config.hint in (True, False) else [False, True]

    generator = _generation_provider(config)
    embedder = _embedding_provider(config)

    all_rows = []
    cells = {}
    for template in templates:
        for hint in hints:
            scored, metadata, unparseable = _eval_cell(
                loaded, template, hint, config, generator, embedder)
            acc = scoring.accuracy(scored)
            breakdown = scoring.breakdown_report(scored, metadata)
            key = f"{template.value}/hint={'on' if hint else 'off'}"
            cells[key] = {
                "accuracy": acc,
                "n": len(scored),
                "unparseable": unparseable,
                "breakdown": breakdown.to_json_obj(),
            }
            for row in scored:
                obj = row.to_json_obj()
                obj["template_id"] = template.value
                obj["hint"] = hint
                all_rows.append(obj)

    out_dir = Path(config.out_dir)
    scored_path = out_dir / "eval_scored.jsonl"
    _write_jsonl(scored_path, _meta(config, [config.instances]), all_rows)
    summary_path = out_dir / "eval_summary.json"
    summary_path.write_text(
        json.dumps({"epsilon": config.epsilon, "cells": cells}, sort_keys=True, indent=2)
        + "\n", encoding="utf-8")
    table_path = out_dir / "eval_table.txt"
    table_path.write_text(_render_eval_table(cells), encoding="utf-8")
    print(f"run-eval: {len(all_rows)} scored rows over {len(cells)} cell(s) "
          f"-> {scored_path}")
    print(_render_eval_table(cells), end="")
    return EXIT_OK


def _render_eval_table(cells: dict) -> str:
    templates = sorted({key.split("/")[0] for key in cells})
    lines = [f"{'template':<22} {'hint=off':>9} {'hint=on':>9}"]
    for template in templates:
        row = [f"{template:<22}"]
        for hint in ("off", "on"):
            cell = cells.get(f"{template}/hint={hint}")
            row.append(f"{100.0 * cell['accuracy']:>8.1f}%" if cell else f"{'-':>9}")
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def cmd_tune_threshold(config: RunConfig) -> int:
    scores_path = _require(config.scores)
    _, records = read_jsonl(scores_path)
    scores = [float(r["score"]) for r in records]
    labels = [int(r["label"]) for r in records]
    if not scores:
        raise MissingInputError(f"{scores_path} (no score records)")
    result = scoring.tune_threshold(scores, labels)
    out = Path(config.out_dir) / "threshold.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "_meta": _meta(config, [config.scores])["_meta"],
        "epsilon_star": result.epsilon_star,
        "macro_f1": result.macro_f1,
        "n": len(scores),
        "sweep": [[c, f] for c, f in result.sweep],
    }
    out.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"tune-threshold: epsilon*={result.epsilon_star:.4f} "
          f"macro-F1={result.macro_f1:.4f} over {len(scores)} labeled scores -> {out}")
    return EXIT_OK


def cmd_probe(config: RunConfig) -> int:
    archive = _manifest(config.archive, config.archive_format)
    labels_path = _require(config.labels)
    _, audit_records = read_jsonl(labels_path)
    label_map = {r["doc_id"]: r["label"] for r in audit_records}
    counters = ScanCounters()
    labeled = [(doc, label_map[doc.doc_id])
               for doc in iter_documents(archive, counters)
               if doc.doc_id in label_map]
    labeled.sort(key=lambda pair: pair[0].doc_id)
    rng = random.Random(derive_seed(config.seed, "probe-sample"))
    chosen = []
    for label in (strsearch.SEEN, strsearch.UNSEEN):
        group = [pair for pair in labeled if pair[1] == label]
        take = min(config.sample_per_class, len(group))
        chosen.extend(rng.sample(group, take))
    generator = _generation_provider(config)
    run = scoring.run_probe(
        chosen, generator, window=config.probe_window,
        window_count=config.probe_window_count, context=config.probe_context,
        max_new_tokens=config.max_new_tokens)
    meta = _meta(config, [config.archive, config.labels])
    meta["_meta"]["skipped"] = [{"doc_id": d, "reason": r} for d, r in run.skipped]
    out = Path(config.out_dir) / "probe.jsonl"
    _write_jsonl(out, meta, (r.to_json_obj() for r in run.results))
    print(f"probe: {len(run.results)} documents probed, {len(run.skipped)} skipped -> {out}")
    return EXIT_OK


def cmd_stats_report(config: RunConfig) -> int:
    probe_path = _require(config.probe)
    _, records = read_jsonl(probe_path)
    seen = [r for r in records if r["label"] == strsearch.SEEN]
    unseen = [r for r in records if r["label"] == strsearch.UNSEEN]
    if len(seen) < 2 or len(unseen) < 2:
        raise MissingInputError(
            f"{probe_path} (needs >= 2 probed documents per label, "
            f"got {len(seen)} SEEN / {len(unseen)} UNSEEN)")
    a = [r["mean_sim"] for r in seen]
    b = [r["mean_sim"] for r in unseen]
    perm_seed = derive_seed(config.seed, "permutation")

    aggregate = {
        "welch_t": stats.welch_t(a, b, stats.GREATER),
        "mann_whitney_u": stats.mann_whitney_u(a, b, stats.GREATER),
        "ks_right": stats.ks_test_right(a, b),
        "permutation_mean": stats.permutation_mean_test(
            a, b, iterations=config.iterations, seed=perm_seed, sidedness=stats.GREATER),
    }
    adjusted = stats.holm_adjust([r.p_value for r in aggregate.values()])
    aggregate_out = {
        name: {**res.to_json_obj(), "p_holm": adj}
        for (name, res), adj in zip(aggregate.items(), adjusted)
    }

    positions = {}
    n_positions = len(records[0]["position_sims"])
    for test_name, fn in (
        ("welch_t", lambda x, y: stats.welch_t(x, y, stats.GREATER)),
        ("mann_whitney_u", lambda x, y: stats.mann_whitney_u(x, y, stats.GREATER)),
        ("ks_right", stats.ks_test_right),
    ):
        per_pos = [
            fn([r["position_sims"][i] for r in seen],
               [r["position_sims"][i] for r in unseen])
            for i in range(n_positions)
        ]
        holm = stats.holm_adjust([r.p_value for r in per_pos])
        positions[test_name] = [
            {**res.to_json_obj(), "p_holm": adj} for res, adj in zip(per_pos, holm)
        ]

    g = stats.hedges_g(a, b)
    delta = stats.cliffs_delta(a, b)
    pooled = np.array([[v, 1.0] for v in a] + [[v, 0.0] for v in b])

    def mean_gap(rows: np.ndarray) -> float:
        mask = rows[:, 1] == 1.0
        if not mask.any() or mask.all():
            return 0.0
        return float(rows[mask, 0].mean() - rows[~mask, 0].mean())

    ci = stats.bootstrap_ci(pooled, mean_gap, level=0.95, method="bca",
                            iterations=config.iterations,
                            seed=derive_seed(config.seed, "bootstrap"))

    report = {
        "_meta": _meta(config, [config.probe])["_meta"],
        "n_seen": len(a),
        "n_unseen": len(b),
        "mean_seen": float(np.mean(a)),
        "mean_unseen": float(np.mean(b)),
        "mean_gap": float(np.mean(a) - np.mean(b)),
        "median_gap": float(np.median(a) - np.median(b)),
        "holm_family": "aggregate one-sided tests (welch, mwu, ks-right, permutation)",
        "aggregate": aggregate_out,
        "per_position": positions,
        "effect_sizes": {
            "hedges_g": g.value,
            "cliffs_delta": delta.value,
            "auc": delta.auxiliary,
        },
        "mean_gap_ci95": {"lower": ci.lower, "upper": ci.upper, "method": ci.method},
    }
    out = Path(config.out_dir) / "stats_report.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    text = _render_stats_table(report)
    (Path(config.out_dir) / "stats_report.txt").write_text(text, encoding="utf-8")
    print(f"stats-report -> {out}")
    print(text, end="")
    return EXIT_OK


def _render_stats_table(report: dict) -> str:
    lines = [
        f"seen n={report['n_seen']} mean={report['mean_seen']:.4f}   "
        f"unseen n={report['n_unseen']} mean={report['mean_unseen']:.4f}   "
        f"gap={report['mean_gap']:+.4f} "
        f"(95% CI [{report['mean_gap_ci95']['lower']:.4f}, "
        f"{report['mean_gap_ci95']['upper']:.4f}], {report['mean_gap_ci95']['method']})",
        f"effects: hedges_g={report['effect_sizes']['hedges_g']:.3f} "
        f"cliffs_delta={report['effect_sizes']['cliffs_delta']:.3f} "
        f"auc={report['effect_sizes']['auc']:.3f}",
        f"{'test':<18} {'statistic':>12} {'p':>12} {'p_holm':>12}",
    ]
    for name, res in report["aggregate"].items():
        lines.append(f"{name:<18} {res['statistic']:>12.4f} "
                     f"{res['p_value']:>12.3e} {res['p_holm']:>12.3e}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--out-dir", dest="out_dir", help="report output directory")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)


def _hint_value(raw: str):
    if raw == "both":
        return "both"
    return parse_bool(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clozeaudit",
        description="Corpus contamination auditing and narrative-cloze evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit-strings", help="sentence-level contamination audit")
    p.add_argument("--archive", help="documents to audit (manifest path)")
    p.add_argument("--corpus", help="training corpus (manifest path)")
    p.add_argument("--archive-format", dest="archive_format",
                   choices=[f.value for f in RecordFormat])
    p.add_argument("--corpus-format", dest="corpus_format",
                   choices=[f.value for f in RecordFormat])
    p.add_argument("--tau", dest="tau_seen", type=int)
    p.add_argument("--min-sentence-bytes", dest="min_sentence_bytes", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_audit_strings)

    p = sub.add_parser("audit-names", help="long-tail name attestation audit")
    p.add_argument("--archive")
    p.add_argument("--corpus")
    p.add_argument("--archive-format", dest="archive_format",
                   choices=[f.value for f in RecordFormat])
    p.add_argument("--corpus-format", dest="corpus_format",
                   choices=[f.value for f in RecordFormat])
    p.add_argument("--tau", dest="tau_name", type=int)
    p.add_argument("--max-names", dest="max_names", type=int)
    p.add_argument("--max-freq", dest="max_freq", type=int)
    p.add_argument("--min-docs", dest="min_docs", type=int)
    p.add_argument("--snippet-cap", dest="snippet_cap", type=int)
    p.add_argument("--exclusions")
    p.add_argument("--boundary", type=parse_bool)
    _add_common(p)
    p.set_defaults(func=cmd_audit_names)

    p = sub.add_parser("make-cloze", help="build cloze instances from timelines")
    p.add_argument("--timelines", help="timeline CSV file or directory")
    p.add_argument("--kind", dest="cloze_kind", choices=["full", "partial", "ngram"])
    p.add_argument("--k", dest="ngram_k", type=int)
    p.add_argument("--template", choices=[t.value for t in cloze.TemplateId])
    p.add_argument("--hint", type=parse_bool)
    _add_common(p)
    p.set_defaults(func=cmd_make_cloze)

    p = sub.add_parser("run-eval", help="generate and score cloze reconstructions")
    p.add_argument("--instances")
    p.add_argument("--template", choices=[t.value for t in cloze.TemplateId] + ["all"])
    p.add_argument("--hint", type=_hint_value, help="on/off/both")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--generation-provider", dest="generation_provider")
    p.add_argument("--embedding-provider", dest="embedding_provider")
    p.add_argument("--task-prefix", dest="task_prefix")
    p.add_argument("--max-new-tokens", dest="max_new_tokens", type=int)
    p.add_argument("--cache-dir", dest="cache_dir")
    _add_common(p)
    p.set_defaults(func=cmd_run_eval)

    p = sub.add_parser("tune-threshold", help="macro-F1 threshold sweep")
    p.add_argument("--scores", help="JSONL of {score, label}")
    _add_common(p)
    p.set_defaults(func=cmd_tune_threshold)

    p = sub.add_parser("probe", help="behavioral continuation probe")
    p.add_argument("--archive")
    p.add_argument("--archive-format", dest="archive_format",
                   choices=[f.value for f in RecordFormat])
    p.add_argument("--labels", help="audit-strings report JSONL")
    p.add_argument("--generation-provider", dest="generation_provider")
    p.add_argument("--sample-per-class", dest="sample_per_class", type=int)
    p.add_argument("--window", dest="probe_window", type=int)
    p.add_argument("--window-count", dest="probe_window_count", type=int)
    p.add_argument("--context", dest="probe_context", type=int)
    p.add_argument("--max-new-tokens", dest="max_new_tokens", type=int)
    p.add_argument("--cache-dir", dest="cache_dir")
    _add_common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("stats-report", help="statistical battery over probe results")
    p.add_argument("--probe", help="probe report JSONL")
    p.add_argument("--iterations", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_stats_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flag_values = {k: v for k, v in vars(args).items()
                   if k not in ("command", "func", "config")}
    try:
        file_values = load_config_file(args.config) if args.config else {}
        hint = flag_values.get("hint")
        if hint == "both":
            flag_values["hint"] = None  # resolve later; "both" handled per-command
        config = resolve_config(flag_values, file_values)
        if hint == "both":
            config.hint = "both"  # type: ignore[assignment]
        return args.func(config)
    except MissingInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (ClozeAuditError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
