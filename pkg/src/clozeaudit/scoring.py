"""Similarity scoring, threshold tuning, accuracy aggregation, and the
behavioral contamination probe.

Similarity lives internally in [-1, 1]; reports use the 0-100 scale (the
tuned operating threshold is quoted on that scale). Macro-F1 is the
unweighted mean of the per-class F1 of "similar" and "different", with
zero-division F1 defined as 0.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .corpus import Document
from .errors import DegenerateDataError, UndefinedSimilarityError
from .providers import (
    EmbeddingProvider,
    EmbeddingRequest,
    GenerationProvider,
    GenerationRequest,
    embed,
    generate,
)
from .stats import spearman_rho

REPORT_SCALE = 100.0


@dataclass(frozen=True)
class ScoredPrediction:
    instance_id: str
    prediction: str | None
    similarity: float | None     # internal [-1, 1]; None when undefined/unparseable
    similar: bool

    @property
    def similarity_report(self) -> float | None:
        return None if self.similarity is None else self.similarity * REPORT_SCALE

    def to_json_obj(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "prediction": self.prediction,
            "similarity": self.similarity_report,
            "similar": self.similar,
        }


@dataclass(frozen=True)
class ThresholdResult:
    epsilon_star: float
    macro_f1: float
    sweep: tuple[tuple[float, float], ...]  # (candidate, macro_f1) pairs


@dataclass(frozen=True)
class ProbeResult:
    doc_id: str
    label: str
    position_sims: tuple[float, ...]
    mean_sim: float

    def to_json_obj(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "label": self.label,
            "position_sims": list(self.position_sims),
            "mean_sim": self.mean_sim,
        }


def cosine(u, v) -> float:
    """u.v / (|u||v|), in [-1, 1]; zero vectors are an error."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise UndefinedSimilarityError("cosine undefined for zero vector")
    return float(np.dot(u, v) / (nu * nv))


_TOKEN = re.compile(r"[a-z0-9]+")


def tfidf_tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def pairwise_tfidf(a: str, b: str) -> tuple[np.ndarray, np.ndarray]:
    """TF-IDF vectors fitted on just this pair.

    Vocabulary is the union of the pair's terms; tf is the raw count;
    idf(t) = ln((1+N)/(1+df(t))) + 1 with N=2; both vectors are L2-normalized.
    """
    tokens_a = tfidf_tokenize(a)
    tokens_b = tfidf_tokenize(b)
    if not tokens_a or not tokens_b:
        raise UndefinedSimilarityError("text is empty after tokenization")
    vocab = sorted(set(tokens_a) | set(tokens_b))
    index = {t: i for i, t in enumerate(vocab)}
    va = np.zeros(len(vocab))
    vb = np.zeros(len(vocab))
    for t in tokens_a:
        va[index[t]] += 1.0
    for t in tokens_b:
        vb[index[t]] += 1.0
    df = (va > 0).astype(np.float64) + (vb > 0).astype(np.float64)
    idf = np.log(3.0 / (1.0 + df)) + 1.0
    va *= idf
    vb *= idf
    va /= np.linalg.norm(va)
    vb /= np.linalg.norm(vb)
    return va, vb


def text_pair_similarity(a: str, b: str) -> float:
    """Pairwise-TF-IDF cosine; 0 when either side is empty after tokenization."""
    try:
        va, vb = pairwise_tfidf(a, b)
    except UndefinedSimilarityError:
        return 0.0
    return cosine(va, vb)


def score_predictions(preds: Sequence[str | None], golds: Sequence[str],
                      embedder: EmbeddingProvider, epsilon: float, *,
                      instance_ids: Sequence[str] | None = None,
                      task_prefix: str | None = None) -> list[ScoredPrediction]:
    """Embed (gold, prediction) pairs and label similar when
    similarity*100 >= epsilon (inclusive; epsilon on the 0-100 report scale).

    Unparseable predictions (None or empty) score similar=False with
    similarity recorded as absent.
    """
    if len(preds) != len(golds):
        raise ValueError("preds and golds must have equal length")
    if instance_ids is None:
        instance_ids = [str(i) for i in range(len(preds))]
    live = [(i, p) for i, p in enumerate(preds) if p]
    vectors: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    if live:
        texts = [golds[i] for i, _ in live] + [p for _, p in live]
        matrix = embed(embedder, EmbeddingRequest(texts=tuple(texts), task_prefix=task_prefix))
        k = len(live)
        for row, (i, _) in enumerate(live):
            vectors[i] = (matrix[row], matrix[k + row])
    out: list[ScoredPrediction] = []
    for i, pred in enumerate(preds):
        if i not in vectors:
            out.append(ScoredPrediction(instance_ids[i], pred, None, False))
            continue
        gv, pv = vectors[i]
        try:
            sim = cosine(gv, pv)
        except UndefinedSimilarityError:
            out.append(ScoredPrediction(instance_ids[i], pred, None, False))
            continue
        out.append(ScoredPrediction(instance_ids[i], pred, sim,
                                    sim * REPORT_SCALE >= epsilon))
    return out


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return 0.0 if denom == 0 else 2 * tp / denom


def macro_f1_at(scores: Sequence[float], labels: Sequence[int], threshold: float) -> float:
    """Macro-F1 of the classifier predict-similar-iff-score>=threshold."""
    tp = fp = fn = tn = 0
    for s, y in zip(scores, labels):
        pred = 1 if s >= threshold else 0
        if pred and y:
            tp += 1
        elif pred and not y:
            fp += 1
        elif not pred and y:
            fn += 1
        else:
            tn += 1
    f1_pos = _f1(tp, fp, fn)
    f1_neg = _f1(tn, fn, fp)  # for the "different" class, fp/fn swap roles
    return (f1_pos + f1_neg) / 2.0


def tune_threshold(scores: Sequence[float], labels: Sequence[int]) -> ThresholdResult:
    """Sweep candidate thresholds, maximizing macro-F1; smallest optimum wins.

    Candidates are midpoints between consecutive sorted unique scores plus a
    below-min and an above-max sentinel.
    """
    if len(scores) != len(labels) or not scores:
        raise ValueError("scores and labels must be nonempty and equal length")
    label_set = set(int(y) for y in labels)
    if label_set != {0, 1}:
        raise DegenerateDataError(f"both classes required, got labels {sorted(label_set)}")
    uniq = sorted(set(float(s) for s in scores))
    candidates = [uniq[0] - 1.0]
    candidates += [(lo + hi) / 2.0 for lo, hi in zip(uniq, uniq[1:])]
    candidates.append(uniq[-1] + 1.0)
    sweep = tuple((c, macro_f1_at(scores, labels, c)) for c in candidates)
    best = max(f for _, f in sweep)
    epsilon_star = min(c for c, f in sweep if f == best)
    return ThresholdResult(epsilon_star=epsilon_star, macro_f1=best, sweep=sweep)


def accuracy(scored: Sequence[ScoredPrediction]) -> float:
    """Fraction of predictions labeled similar."""
    if not scored:
        raise ValueError("no scored predictions")
    return sum(1 for s in scored if s.similar) / len(scored)


# ---------------------------------------------------------------------------
# Behavioral probe
# ---------------------------------------------------------------------------

@dataclass
class ProbeRun:
    results: list[ProbeResult] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (doc_id, reason)


def run_probe(docs: Sequence[tuple[Document, str]], generator: GenerationProvider,
              window: int = 5, window_count: int = 5, context: int = 20, *,
              max_new_tokens: int = 512) -> ProbeRun:
    """Next-window continuation probe.

    For each labeled document: condition on the first ``context`` sentences,
    generate ``window_count`` continuations (each round appending the model's
    own prior continuations to the prompt), and score each generated window
    against its gold window with pairwise-TF-IDF cosine.
    """
    run = ProbeRun()
    needed = context + window * window_count
    for doc, label in docs:
        doc = doc.with_sentences()
        sentences = list(doc.sentences or ())
        if len(sentences) < needed:
            run.skipped.append(
                (doc.doc_id, f"needs >= {needed} sentences, has {len(sentences)}"))
            continue
        prompt = " ".join(sentences[:context])
        sims = []
        for i in range(window_count):
            gold = " ".join(sentences[context + i * window: context + (i + 1) * window])
            response = generate(generator, GenerationRequest(
                user=prompt, max_new_tokens=max_new_tokens, deterministic=True))
            generated = response.text
            sims.append(text_pair_similarity(gold, generated))
            prompt = prompt + " " + generated
        run.results.append(ProbeResult(
            doc_id=doc.doc_id,
            label=label,
            position_sims=tuple(sims),
            mean_sim=float(np.mean(sims)),
        ))
    return run


# ---------------------------------------------------------------------------
# Breakdown report
# ---------------------------------------------------------------------------

POSITION_BUCKETS = ("begin", "middle", "end")


def position_bucket(position: int, timeline_length: int) -> str:
    """begin = first event, end = last event, middle = everything else."""
    if position <= 1:
        return "begin"
    if position >= timeline_length:
        return "end"
    return "middle"


@dataclass(frozen=True)
class BreakdownReport:
    overall_accuracy: float
    n: int
    by_event_type: dict
    by_event_length_quartile: dict
    by_timeline_length_quartile: dict
    by_position: dict
    spearman: dict

    def to_json_obj(self) -> dict:
        return {
            "overall_accuracy": self.overall_accuracy,
            "n": self.n,
            "by_event_type": self.by_event_type,
            "by_event_length_quartile": self.by_event_length_quartile,
            "by_timeline_length_quartile": self.by_timeline_length_quartile,
            "by_position": self.by_position,
            "spearman": self.spearman,
        }


def _group_accuracy(pairs: list[tuple[str, bool]]) -> dict:
    groups: dict[str, list[bool]] = {}
    for key, ok in pairs:
        groups.setdefault(key, []).append(ok)
    return {
        key: {"n": len(vals), "accuracy": sum(vals) / len(vals)}
        for key, vals in sorted(groups.items())
    }


def _quartile_bucket(value: float, edges: tuple[float, float, float]) -> str:
    if value <= edges[0]:
        return "q1"
    if value <= edges[1]:
        return "q2"
    if value <= edges[2]:
        return "q3"
    return "q4"


def breakdown_report(scored: Sequence[ScoredPrediction],
                     metadata: Sequence[dict]) -> BreakdownReport:
    """Accuracy grouped by event type, event/timeline length quartiles, and
    timeline position, plus Spearman correlations of the length covariates
    against the similar/different outcome.

    Each metadata entry needs: event_type, event_word_count, timeline_length,
    position_bucket.
    """
    if len(scored) != len(metadata):
        raise ValueError("scored and metadata must align")
    if not scored:
        raise ValueError("nothing to report on")
    outcomes = [1 if s.similar else 0 for s in scored]
    event_lengths = [float(m["event_word_count"]) for m in metadata]
    timeline_lengths = [float(m["timeline_length"]) for m in metadata]
    ev_edges = tuple(float(np.percentile(event_lengths, q)) for q in (25, 50, 75))
    tl_edges = tuple(float(np.percentile(timeline_lengths, q)) for q in (25, 50, 75))

    spearman = {}
    for name, covariate in (("event_word_count", event_lengths),
                            ("timeline_length", timeline_lengths)):
        try:
            rho, p = spearman_rho(covariate, outcomes)
            spearman[name] = {"rho": rho, "p": p}
        except DegenerateDataError:
            spearman[name] = {"rho": None, "p": None}

    return BreakdownReport(
        overall_accuracy=sum(outcomes) / len(outcomes),
        n=len(outcomes),
        by_event_type=_group_accuracy(
            [(m["event_type"], bool(o)) for m, o in zip(metadata, outcomes)]),
        by_event_length_quartile=_group_accuracy(
            [(_quartile_bucket(v, ev_edges), bool(o))
             for v, o in zip(event_lengths, outcomes)]),
        by_timeline_length_quartile=_group_accuracy(
            [(_quartile_bucket(v, tl_edges), bool(o))
             for v, o in zip(timeline_lengths, outcomes)]),
        by_position=_group_accuracy(
            [(m["position_bucket"], bool(o)) for m, o in zip(metadata, outcomes)]),
        spearman=spearman,
    )
