"""Flat key=value run configuration with flag > config-file > default precedence."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path


@dataclass
class RunConfig:
    archive: str = ""
    corpus: str = ""
    archive_format: str = ""
    corpus_format: str = ""
    tau_seen: int = 100
    tau_name: int = 100
    epsilon: float = 73.13            # report-scale similarity threshold
    generation_provider: str = "echo"
    embedding_provider: str = "bow"
    template: str = "base"
    hint: bool = False
    seed: int = 0
    workers: int = 0                  # 0 -> available parallelism
    out_dir: str = "reports"
    min_sentence_bytes: int = 0
    boundary: bool = True
    snippet_cap: int = 5
    max_names: int = 10_000
    max_freq: int = 51
    min_docs: int = 3
    exclusions: str = ""
    timelines: str = ""
    cloze_kind: str = "full"
    ngram_k: int = 2
    instances: str = ""
    labels: str = ""
    scores: str = ""
    probe: str = ""
    sample_per_class: int = 500
    probe_window: int = 5
    probe_window_count: int = 5
    probe_context: int = 20
    max_new_tokens: int = 256
    task_prefix: str = ""
    cache_dir: str = ""
    iterations: int = 2000

    @property
    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    def hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in _BOOL_TRUE:
        return True
    if low in _BOOL_FALSE:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse "key=value" lines; blank lines and #-comments are ignored."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def resolve_config(flag_values: dict, file_values: dict[str, str]) -> RunConfig:
    """Merge: explicit flag beats config file beats dataclass default."""
    config = RunConfig()
    for f in fields(RunConfig):
        if f.name in file_values:
            raw = file_values[f.name]
            if f.type in ("bool", bool):
                setattr(config, f.name, parse_bool(raw))
            elif f.type in ("int", int):
                setattr(config, f.name, int(raw))
            elif f.type in ("float", float):
                setattr(config, f.name, float(raw))
            else:
                setattr(config, f.name, raw)
        if flag_values.get(f.name) is not None:
            setattr(config, f.name, flag_values[f.name])
    unknown = set(file_values) - {f.name for f in fields(RunConfig)}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return config


def derive_seed(master: int, label: str) -> int:
    """Per-subsystem seed derivation from the single run seed."""
    digest = hashlib.sha256(f"{master}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)
