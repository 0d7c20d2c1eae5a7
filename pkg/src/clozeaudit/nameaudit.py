"""Long-tail person-name candidate extraction and corpus attestation counting.

Candidate names come from a pluggable NER provider over the archive; the
attestation pass streams the training corpus once through a multi-pattern
automaton, counting every occurrence of every name (unlike the sentence audit,
which counts record containment 0/1). Matching runs over normalize()d text,
case-sensitively, with word-boundary filtering on by default.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Document, RecordFormat, ScanCounters, ShardManifest, iter_record_texts, normalize
from .errors import InvalidPatternError
from .kernels import Automaton, CountingScanner, build_bytes_automaton
from .strsearch import CorpusStreamWarning, UNSEEN

TAU_NAME = 100      # occurrence threshold for the SEEN_IN_CORPUS label
MAX_NAMES = 10_000  # candidate cap before the long-tail filter
MAX_FREQ = 51       # exclusive upper bound on archive frequency
MIN_DOCS = 3        # a candidate must appear in at least this many documents

SEEN_IN_CORPUS = "SEEN_IN_O"

SNIPPET_CONTEXT_BYTES = 40


@dataclass(frozen=True)
class NameCandidate:
    name: str
    corpus_freq_in_archive: int
    doc_freq: int


@dataclass(frozen=True)
class NameAttestation:
    name: str
    count: int
    label: str
    snippets: tuple[str, ...] = ()

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "count": self.count,
            "label": self.label,
            "snippets": list(self.snippets),
        }


def extract_name_candidates(docs: Sequence[Document], ner, max_names: int = MAX_NAMES,
                            max_freq: int = MAX_FREQ, min_docs: int = MIN_DOCS,
                            ) -> list[NameCandidate]:
    """Long-tail candidates: top ``max_names`` by mention frequency, then keep
    names with frequency < ``max_freq`` appearing in >= ``min_docs`` documents."""
    if max_names < 1:
        raise ValueError("max_names must be >= 1")
    if not docs:
        return []
    texts = [doc.text for doc in docs]
    span_lists = ner.person_spans(texts)
    freq: dict[str, int] = {}
    doc_sets: dict[str, set[int]] = {}
    for doc_idx, (text, spans) in enumerate(zip(texts, span_lists)):
        for start, end in spans:
            name = normalize(text[start:end])
            if not name:
                continue
            freq[name] = freq.get(name, 0) + 1
            doc_sets.setdefault(name, set()).add(doc_idx)
    ranked = sorted(freq, key=lambda n: (-freq[n], n))[:max_names]
    out = [
        NameCandidate(name=n, corpus_freq_in_archive=freq[n], doc_freq=len(doc_sets[n]))
        for n in ranked
        if freq[n] < max_freq and len(doc_sets[n]) >= min_docs
    ]
    out.sort(key=lambda c: (-c.corpus_freq_in_archive, c.name))
    return out


def build_automaton(patterns: Sequence[str]) -> Automaton:
    """Normalize, deduplicate, and compile name patterns into one automaton."""
    if not patterns:
        raise InvalidPatternError("pattern set is empty")
    seen: dict[bytes, None] = {}
    for pat in patterns:
        data = normalize(pat).encode("utf-8")
        if not data:
            raise InvalidPatternError(f"pattern {pat!r} is empty after normalization")
        seen.setdefault(data, None)
    return build_bytes_automaton(list(seen))


_WORKER_STATE: dict = {}


def _init_name_worker(patterns: list[bytes], boundary: bool, snippet_cap: int) -> None:
    _WORKER_STATE["auto"] = build_bytes_automaton(patterns)
    _WORKER_STATE["boundary"] = boundary
    _WORKER_STATE["snippet_cap"] = snippet_cap


def _scan_name_shard(args: tuple[int, str, str]):
    shard_idx, shard_path, record_format = args
    # Fresh scanner per shard so snippet capping does not depend on which
    # worker processed which shard; caps are re-enforced at merge time.
    scanner = CountingScanner(_WORKER_STATE["auto"], boundary=_WORKER_STATE["boundary"],
                              snippet_cap=_WORKER_STATE["snippet_cap"])
    manifest = ShardManifest((Path(shard_path),), RecordFormat(record_format))
    counters = ScanCounters()
    hits: list[tuple[int, str]] = []  # (pid, snippet) in scan order
    for text in iter_record_texts(manifest, counters):
        data = normalize(text).encode("utf-8")
        for pid, start, end in scanner.scan(data):
            hits.append((pid, _snippet(data, start, end)))
    return shard_idx, scanner.count_list(), hits, counters.tries, counters.excepts, counters.shard_errors


def _snippet(data: bytes, start: int, end: int) -> str:
    lo = max(0, start - SNIPPET_CONTEXT_BYTES)
    hi = min(len(data), end + SNIPPET_CONTEXT_BYTES)
    # errors="ignore" drops at most a partial codepoint at each edge
    return data[lo:hi].decode("utf-8", errors="ignore")


def scan_names(automaton: Automaton, corpus: ShardManifest, snippet_cap: int = 5, *,
               tau: int = TAU_NAME, boundary: bool = True, workers: int = 1,
               ) -> list[NameAttestation]:
    """Count every occurrence of every name across the corpus, single pass.

    Snippets (name plus +/-40 bytes of normalized context) are kept for hits
    recorded while a name's running count was below ``snippet_cap``.
    """
    if snippet_cap < 0:
        raise ValueError("snippet_cap must be >= 0")
    names = [p.decode("utf-8") for p in automaton.patterns]
    counters = ScanCounters()

    if workers > 1 and len(corpus.shard_paths) > 1:
        tasks = [(i, str(p), corpus.record_format.value)
                 for i, p in enumerate(corpus.shard_paths)]
        counts = [0] * automaton.n_patterns
        per_pid_snips: dict[int, list[str]] = {}
        results = []
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_name_worker,
                                 initargs=(list(automaton.patterns), boundary, snippet_cap)) as pool:
            results = sorted(pool.map(_scan_name_shard, tasks), key=lambda r: r[0])
        for _, shard_counts, hits, tries, excepts, shard_errors in results:
            for pid, c in enumerate(shard_counts):
                counts[pid] += c
            for pid, snip in hits:  # shard order then scan order: deterministic
                per_pid_snips.setdefault(pid, []).append(snip)
            counters.tries += tries
            counters.excepts += excepts
            counters.shard_errors.extend(shard_errors)
        snippets = {pid: tuple(s[:snippet_cap]) for pid, s in per_pid_snips.items()}
    else:
        scanner = CountingScanner(automaton, boundary=boundary, snippet_cap=snippet_cap)
        per_pid_snips = {}
        for text in iter_record_texts(corpus, counters):
            data = normalize(text).encode("utf-8")
            for pid, start, end in scanner.scan(data):
                per_pid_snips.setdefault(pid, []).append(_snippet(data, start, end))
        counts = scanner.count_list()
        snippets = {pid: tuple(s) for pid, s in per_pid_snips.items()}

    if counters.shard_errors:
        warnings.warn(CorpusStreamWarning(
            f"{len(counters.shard_errors)} shard error(s); name counts are partial",
            counters))

    attestations = [
        NameAttestation(
            name=names[pid],
            count=counts[pid],
            label=SEEN_IN_CORPUS if counts[pid] >= tau else UNSEEN,
            snippets=snippets.get(pid, ()),
        )
        for pid in range(automaton.n_patterns)
    ]
    attestations.sort(key=lambda a: a.name)
    return attestations


def apply_exclusion_list(attestations: Sequence[NameAttestation],
                         exclusions: set[str]) -> list[NameAttestation]:
    """Drop attestations whose (normalized) name is excluded."""
    excluded = {normalize(name) for name in exclusions}
    return [a for a in attestations if normalize(a.name) not in excluded]


def load_exclusions(path: str | Path) -> set[str]:
    """Newline-delimited UTF-8 name list; blank lines ignored."""
    out = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            out.add(line)
    return out
