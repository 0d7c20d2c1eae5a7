"""Exhaustive sentence-level contamination audit of documents against a corpus.

The per-pair primitive is a bad-character-rule Boyer-Moore matcher over raw
UTF-8 bytes (no good-suffix table, no normalization: sentences are matched
byte-exactly as the segmenter produced them). The corpus-scale aggregation
streams the corpus once through a multi-pattern automaton over the same byte
patterns, which computes the identical per-(record, sentence) 0/1 sum; the
property tests pin the equivalence of the two routes.
"""

from __future__ import annotations

import warnings
from array import array
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import kernels
from .corpus import Document, RecordFormat, ScanCounters, ShardManifest, iter_record_text_bytes
from .errors import InvalidPatternError
from .kernels import DistinctScanner, build_bytes_automaton

TAU_SEEN = 100  # raw-match threshold for the SEEN label

SEEN = "SEEN"
UNSEEN = "UNSEEN"


class CorpusStreamWarning(UserWarning):
    """Raised (as a warning) when shard errors made an audit result partial."""

    def __init__(self, message: str, counters: ScanCounters):
        super().__init__(message)
        self.counters = counters


@dataclass(frozen=True)
class BadCharTable:
    """Last-occurrence table: ``shift[b]`` is the last index of byte b, else -1."""

    pattern: bytes
    shift: array


@dataclass(frozen=True)
class MatchAudit:
    doc_id: str
    match_count: int
    label: str
    counters: ScanCounters

    def to_json_obj(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "match_count": self.match_count,
            "label": self.label,
            "tries": self.counters.tries,
            "excepts": self.counters.excepts,
        }


def _as_bytes(value: str | bytes) -> bytes:
    return value.encode("utf-8") if isinstance(value, str) else value


def bm_preprocess(pattern: str | bytes) -> BadCharTable:
    """Build the bad-character table for a nonempty pattern."""
    pat = _as_bytes(pattern)
    if not pat:
        raise InvalidPatternError("empty pattern")
    return BadCharTable(pattern=pat, shift=kernels.bm_table(pat))


def bm_contains(text: str | bytes, pattern: str | bytes,
                table: BadCharTable | None = None) -> int:
    """1 iff pattern is a contiguous substring of text, via the shift rule
    s <- s + max(1, j - shift[text[s+j]])."""
    pat = _as_bytes(pattern)
    if not pat:
        raise InvalidPatternError("empty pattern")
    if table is None:
        table = bm_preprocess(pat)
    return kernels.bm_contains(_as_bytes(text), pat, table.shift)


def _doc_sentence_patterns(doc: Document, min_sentence_bytes: int) -> list[bytes]:
    doc = doc.with_sentences()
    patterns = []
    for sent in doc.sentences or ():
        data = sent.encode("utf-8")
        if not data:
            continue
        if min_sentence_bytes and len(data) < min_sentence_bytes:
            continue
        patterns.append(data)
    return patterns


_WORKER_SCANNER: DistinctScanner | None = None


def _init_scan_worker(patterns: list[bytes]) -> None:
    global _WORKER_SCANNER
    _WORKER_SCANNER = DistinctScanner(build_bytes_automaton(patterns))


def _scan_shard_task(args: tuple[str, str]) -> tuple[list[int], int, int, list[str]]:
    shard_path, record_format = args
    assert _WORKER_SCANNER is not None
    manifest = ShardManifest((Path(shard_path),), RecordFormat(record_format))
    counters = ScanCounters()
    counts = [0] * _WORKER_SCANNER._auto.n_patterns
    for data in iter_record_text_bytes(manifest, counters):
        for pid in _WORKER_SCANNER.scan(data):
            counts[pid] += 1
    return counts, counters.tries, counters.excepts, counters.shard_errors


class SentenceScanEngine:
    """Reusable multi-pattern containment engine over a fixed sentence set.

    Construction compiles the pattern automaton once; ``record_counts`` can
    then stream any number of corpora, which is the sustained phase the
    throughput benchmark measures.
    """

    def __init__(self, patterns: Sequence[bytes]):
        self.patterns = list(patterns)
        self._automaton = build_bytes_automaton(self.patterns)
        self._scanner = DistinctScanner(self._automaton)

    def record_counts(self, corpus: ShardManifest, workers: int = 1,
                      ) -> tuple[list[int], ScanCounters]:
        """Number of corpus records containing each pattern (0/1 per record)."""
        counters = ScanCounters()
        counts = [0] * len(self.patterns)
        if workers > 1 and len(corpus.shard_paths) > 1:
            tasks = [(str(p), corpus.record_format.value) for p in corpus.shard_paths]
            with ProcessPoolExecutor(max_workers=workers, initializer=_init_scan_worker,
                                     initargs=(self.patterns,)) as pool:
                for shard_counts, tries, excepts, shard_errors in pool.map(_scan_shard_task, tasks):
                    for pid, c in enumerate(shard_counts):
                        counts[pid] += c
                    counters.tries += tries
                    counters.excepts += excepts
                    counters.shard_errors.extend(shard_errors)
            return counts, counters
        scanner = self._scanner
        for data in iter_record_text_bytes(corpus, counters):
            for pid in scanner.scan(data):
                counts[pid] += 1
        return counts, counters


def _pid_record_counts(patterns: Sequence[bytes], corpus: ShardManifest,
                       workers: int = 1) -> tuple[list[int], ScanCounters]:
    return SentenceScanEngine(patterns).record_counts(corpus, workers=workers)


def match_count(doc: Document, corpus: ShardManifest, *,
                min_sentence_bytes: int = 0, workers: int = 1) -> int:
    """Total number of (corpus record, document sentence) substring hits."""
    patterns = _doc_sentence_patterns(doc, min_sentence_bytes)
    if not patterns:
        raise ValueError(f"document {doc.doc_id!r} has no usable sentences")
    unique: dict[bytes, int] = {}
    weights: dict[int, int] = {}  # pid -> number of sentence instances
    for pat in patterns:
        pid = unique.setdefault(pat, len(unique))
        weights[pid] = weights.get(pid, 0) + 1
    counts, counters = _pid_record_counts(list(unique), corpus, workers=workers)
    if counters.shard_errors:
        warnings.warn(CorpusStreamWarning(
            f"{len(counters.shard_errors)} shard error(s); match count is partial",
            counters))
    return sum(counts[pid] * w for pid, w in weights.items())


def audit_documents(docs: Sequence[Document], corpus: ShardManifest,
                    tau: int = TAU_SEEN, *, min_sentence_bytes: int = 0,
                    workers: int = 1) -> list[MatchAudit]:
    """One MatchAudit per document, ordered by doc_id; SEEN iff count >= tau.

    The corpus is streamed once for all documents: every distinct sentence
    becomes one automaton pattern, and per-record containment counts are
    redistributed to the owning documents afterwards.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    unique: dict[bytes, int] = {}
    doc_weights: list[dict[int, int]] = []
    for doc in docs:
        weights: dict[int, int] = {}
        for pat in _doc_sentence_patterns(doc, min_sentence_bytes):
            pid = unique.setdefault(pat, len(unique))
            weights[pid] = weights.get(pid, 0) + 1
        doc_weights.append(weights)

    if unique:
        counts, counters = _pid_record_counts(list(unique), corpus, workers=workers)
    else:
        counts, counters = [], ScanCounters()

    audits = []
    for doc, weights in zip(docs, doc_weights):
        total = sum(counts[pid] * w for pid, w in weights.items())
        label = SEEN if total >= tau else UNSEEN
        audits.append(MatchAudit(doc_id=doc.doc_id, match_count=total,
                                 label=label, counters=counters))
    audits.sort(key=lambda a: a.doc_id)
    return audits
