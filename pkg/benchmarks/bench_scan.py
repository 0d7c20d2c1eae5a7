#!/usr/bin/env python3
"""Benchmark the scanning kernels: compiled extension vs. pure-Python fallback.

Builds a synthetic corpus and a multi-sentence query document, then times
(a) the multi-pattern audit scan and (b) per-pair Boyer-Moore containment,
reporting MB/s of corpus text for each backend.

Usage: python benchmarks/bench_scan.py [--mb 16] [--sentences 1000] [--pure-mb 1]
"""

from __future__ import annotations

import argparse
import random
import time

from clozeaudit import kernels
from clozeaudit.kernels import CountingScanner, DistinctScanner, build_bytes_automaton


def synth_words(rng: random.Random, n: int) -> list[str]:
    alphabet = "abcdefghijklmnopqrstuvwxyz"
    return ["".join(rng.choice(alphabet) for _ in range(rng.randint(3, 9)))
            for _ in range(n)]


def synth_corpus(rng: random.Random, vocab: list[str], total_bytes: int) -> list[bytes]:
    records = []
    size = 0
    while size < total_bytes:
        record = " ".join(rng.choice(vocab) for _ in range(rng.randint(80, 200)))
        data = record.encode("utf-8")
        records.append(data)
        size += len(data)
    return records


def synth_sentences(rng: random.Random, vocab: list[str], n: int) -> list[bytes]:
    out = []
    for _ in range(n):
        sent = " ".join(rng.choice(vocab) for _ in range(rng.randint(6, 14))) + "."
        out.append(sent.encode("utf-8"))
    return sorted(set(out))


def time_scan(backend: str, patterns: list[bytes], records: list[bytes]) -> float:
    auto = build_bytes_automaton(patterns)
    scanner = DistinctScanner(auto, backend=backend)
    total = sum(len(r) for r in records)
    start = time.perf_counter()
    hits = 0
    for record in records:
        hits += len(scanner.scan(record))
    elapsed = time.perf_counter() - start
    return total / 1e6 / elapsed


def time_count(backend: str, patterns: list[bytes], records: list[bytes]) -> float:
    auto = build_bytes_automaton(patterns)
    scanner = CountingScanner(auto, boundary=True, snippet_cap=0, backend=backend)
    total = sum(len(r) for r in records)
    start = time.perf_counter()
    for record in records:
        scanner.scan(record)
    elapsed = time.perf_counter() - start
    return total / 1e6 / elapsed


def time_bm(backend: str, patterns: list[bytes], records: list[bytes]) -> float:
    tables = [(p, kernels.bm_table(p)) for p in patterns]
    total = sum(len(r) for r in records) * len(patterns)
    start = time.perf_counter()
    hits = 0
    for record in records:
        for pat, table in tables:
            hits += kernels.bm_contains(record, pat, table, backend=backend)
    elapsed = time.perf_counter() - start
    return total / 1e6 / elapsed


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mb", type=float, default=16.0,
                        help="corpus size in MB for the compiled backend")
    parser.add_argument("--pure-mb", type=float, default=1.0,
                        help="corpus size in MB for the pure-Python backend")
    parser.add_argument("--sentences", type=int, default=1000)
    parser.add_argument("--bm-patterns", type=int, default=10,
                        help="pattern count for the per-pair BM timing")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    vocab = synth_words(rng, 4000)
    patterns = synth_sentences(rng, vocab, args.sentences)
    print(f"{len(patterns)} sentence patterns, "
          f"avg {sum(map(len, patterns)) / len(patterns):.0f} bytes")

    backends = ["c", "python"] if kernels.have_extension() else ["python"]
    if not kernels.have_extension():
        print("compiled extension not available; timing pure Python only")

    print(f"\n{'kernel':<28} {'backend':<8} {'MB/s':>10}")
    for backend in backends:
        mb = args.mb if backend == "c" else args.pure_mb
        records = synth_corpus(rng, vocab, int(mb * 1e6))
        rate = time_scan(backend, patterns, records)
        print(f"{'audit scan (distinct)':<28} {backend:<8} {rate:>10.1f}")
        rate = time_count(backend, patterns, records)
        print(f"{'name scan (counting)':<28} {backend:<8} {rate:>10.1f}")
        rate = time_bm(backend, patterns[: args.bm_patterns], records)
        print(f"{'boyer-moore x{:<3d}'.format(args.bm_patterns):<28} {backend:<8} {rate:>10.1f}")


if __name__ == "__main__":
    main()
