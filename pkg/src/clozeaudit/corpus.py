"""Corpus ingestion: sharded record streaming, parsing, sentence segmentation.

Corpora come in three shapes: gzip JSONL shards, plain JSONL shards, and
plain-text directories (one document per file, optional ``<file>.meta.json``
sidecar). Streaming is single-pass and tolerant: unreadable shards are logged
and skipped, undecodable or unparseable lines are counted as ``excepts``.
"""

from __future__ import annotations

import gzip
import json
import re
import unicodedata
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import RecordDecodeError, RecordSchemaError


class RecordFormat(str, Enum):
    JSONL_GZ = "jsonl_gz"
    JSONL = "jsonl"
    PLAIN_TEXT_DIR = "plain_text_dir"


@dataclass(frozen=True)
class Document:
    """One corpus record. Immutable after parse; safe to share across workers."""

    doc_id: str
    text: str
    title: str = ""
    author: str = ""
    collection_title: str = ""
    pub_place: str = ""
    pub_year: int | None = None
    genre: str | None = None
    language: str | None = None
    sentences: tuple[str, ...] | None = None

    def with_sentences(self) -> "Document":
        """Return a copy with ``sentences`` populated from ``text``."""
        if self.sentences is not None:
            return self
        return replace(self, sentences=tuple(segment_sentences(self.text)))


@dataclass
class ScanCounters:
    """Line bookkeeping for a corpus pass: tries + excepts == lines encountered."""

    tries: int = 0
    excepts: int = 0
    shard_errors: list[str] = field(default_factory=list)

    def merge(self, other: "ScanCounters") -> None:
        self.tries += other.tries
        self.excepts += other.excepts
        self.shard_errors.extend(other.shard_errors)


@dataclass(frozen=True)
class ShardManifest:
    shard_paths: tuple[Path, ...]
    record_format: RecordFormat

    @classmethod
    def from_path(cls, path: str | Path, record_format: RecordFormat | str | None = None) -> "ShardManifest":
        """Build a manifest from a file, a glob-able directory, or a text directory."""
        path = Path(path)
        if record_format is not None:
            record_format = RecordFormat(record_format)
        if path.is_dir():
            gz = sorted(path.glob("*.jsonl.gz")) + sorted(path.glob("*.gz"))
            gz = sorted(set(gz))
            jsonl = sorted(path.glob("*.jsonl"))
            if record_format == RecordFormat.PLAIN_TEXT_DIR or (record_format is None and not gz and not jsonl):
                txt = sorted(p for p in path.glob("*.txt"))
                return cls(tuple(txt), RecordFormat.PLAIN_TEXT_DIR)
            if gz and (record_format in (None, RecordFormat.JSONL_GZ)):
                return cls(tuple(gz), RecordFormat.JSONL_GZ)
            return cls(tuple(jsonl), RecordFormat.JSONL)
        fmt = record_format
        if fmt is None:
            fmt = RecordFormat.JSONL_GZ if path.suffix == ".gz" else RecordFormat.JSONL
        return cls((path,), fmt)


def stream_records(manifest: ShardManifest, counters: ScanCounters) -> Iterator[str]:
    """Yield every decodable record line once, in shard order then line order.

    ``counters`` is updated in place: a line that decodes counts as a try, an
    undecodable line as an except. Unreadable shards append to
    ``counters.shard_errors`` and streaming continues with the next shard.
    """
    for shard in manifest.shard_paths:
        try:
            if manifest.record_format == RecordFormat.PLAIN_TEXT_DIR:
                # One record per file: the whole file is the "line".
                data = Path(shard).read_bytes()
                try:
                    text = data.decode("utf-8")
                except UnicodeDecodeError:
                    counters.excepts += 1
                    continue
                counters.tries += 1
                yield text
                continue
            opener = gzip.open if manifest.record_format == RecordFormat.JSONL_GZ else open
            with opener(shard, "rb") as fh:
                for raw in fh:
                    try:
                        line = raw.decode("utf-8")
                    except UnicodeDecodeError:
                        counters.excepts += 1
                        continue
                    counters.tries += 1
                    yield line
        except (OSError, EOFError, gzip.BadGzipFile) as exc:
            counters.shard_errors.append(f"{shard}: {exc}")
            continue


def parse_record(raw_line: str, record_format: RecordFormat) -> Document:
    """Parse one record line into a Document. Metadata fields are absent-tolerant."""
    if record_format == RecordFormat.PLAIN_TEXT_DIR:
        return Document(doc_id="", text=raw_line)
    try:
        obj = json.loads(raw_line)
    except json.JSONDecodeError as exc:
        raise RecordDecodeError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise RecordDecodeError("record line is not a JSON object")
    if "text" not in obj or not isinstance(obj["text"], str):
        raise RecordSchemaError("record is missing required string field 'text'")
    pub_year = obj.get("pub_year")
    if pub_year is not None:
        try:
            pub_year = int(pub_year)
        except (TypeError, ValueError):
            pub_year = None
    return Document(
        doc_id=str(obj.get("id", obj.get("doc_id", ""))),
        text=obj["text"],
        title=str(obj.get("title", "")),
        author=str(obj.get("author", "")),
        collection_title=str(obj.get("collection_title", "")),
        pub_place=str(obj.get("pub_place", "")),
        pub_year=pub_year,
        genre=obj.get("genre"),
        language=obj.get("language"),
    )


def _sidecar_meta(path: Path) -> dict:
    side = path.with_name(path.name + ".meta.json")
    if side.exists():
        try:
            obj = json.loads(side.read_text(encoding="utf-8"))
            if isinstance(obj, dict):
                return obj
        except (OSError, json.JSONDecodeError):
            pass
    return {}


def iter_documents(manifest: ShardManifest, counters: ScanCounters) -> Iterator[Document]:
    """Stream parsed Documents; parse failures are reclassified as excepts.

    Records without an id get one derived from the shard basename and the
    1-based line number within the shard.
    """
    if manifest.record_format == RecordFormat.PLAIN_TEXT_DIR:
        for shard in manifest.shard_paths:
            sub = ShardManifest((shard,), RecordFormat.PLAIN_TEXT_DIR)
            for text in stream_records(sub, counters):
                meta = _sidecar_meta(Path(shard))
                doc = parse_record(text, manifest.record_format)
                yield replace(
                    doc,
                    doc_id=str(meta.get("id", Path(shard).stem)),
                    title=str(meta.get("title", "")),
                    author=str(meta.get("author", "")),
                    collection_title=str(meta.get("collection_title", "")),
                    pub_place=str(meta.get("pub_place", "")),
                    pub_year=meta.get("pub_year"),
                    genre=meta.get("genre"),
                    language=meta.get("language"),
                )
        return
    for shard in manifest.shard_paths:
        sub = ShardManifest((shard,), manifest.record_format)
        lineno = 0
        for line in stream_records(sub, counters):
            lineno += 1
            try:
                doc = parse_record(line, manifest.record_format)
            except (RecordDecodeError, RecordSchemaError):
                counters.tries -= 1
                counters.excepts += 1
                continue
            if not doc.doc_id:
                doc = replace(doc, doc_id=f"{Path(shard).name}:{lineno}")
            yield doc


def iter_record_texts(manifest: ShardManifest, counters: ScanCounters) -> Iterator[str]:
    """Stream just the text field of every record (the audit hot path).

    Counting matches iter_documents: a line counts as a try only when it fully
    parses to a record with a text field; decode/parse failures are excepts.
    """
    if manifest.record_format == RecordFormat.PLAIN_TEXT_DIR:
        yield from stream_records(manifest, counters)
        return
    for shard in manifest.shard_paths:
        try:
            opener = gzip.open if manifest.record_format == RecordFormat.JSONL_GZ else open
            with opener(shard, "rb") as fh:
                for raw in fh:
                    try:
                        obj = json.loads(raw)
                        text = obj["text"]
                        if not isinstance(text, str):
                            raise TypeError
                    except (ValueError, KeyError, TypeError):
                        counters.excepts += 1
                        continue
                    counters.tries += 1
                    yield text
        except (OSError, EOFError, gzip.BadGzipFile) as exc:
            counters.shard_errors.append(f"{shard}: {exc}")
            continue


def _fast_jsonl_text(raw: bytes) -> bytes | None:
    """Raw UTF-8 bytes of the top-level text value, or None to force json.loads.

    Exactly equivalent to ``json.loads(raw)["text"].encode()`` whenever it
    returns bytes: the value contains no escape sequences, no nested object
    opens before the key (so the key cannot sit inside a sub-object), and
    '"text"' does not recur afterwards (duplicate keys / later sub-objects).
    """
    first = raw.find(b"{")
    if first == -1 or raw[:first].strip():
        return None
    key = raw.find(b'"text"')
    if key == -1 or raw.find(b"{", first + 1, key) != -1:
        return None
    try:
        i = key + 6
        while raw[i] in (0x20, 0x09):
            i += 1
        if raw[i] != 0x3A:  # ':'
            return None
        i += 1
        while raw[i] in (0x20, 0x09):
            i += 1
        if raw[i] != 0x22:  # '"'
            return None
    except IndexError:
        return None
    close = raw.find(b'"', i + 1)
    if close == -1:
        return None
    value = raw[i + 1: close]
    if b"\\" in value:
        return None
    if raw.find(b'"text"', close) != -1:
        return None
    return value


def iter_record_text_bytes(manifest: ShardManifest, counters: ScanCounters) -> Iterator[bytes]:
    """Like iter_record_texts but yields UTF-8 bytes, skipping the
    decode/re-encode round trip for plain lines."""
    if manifest.record_format == RecordFormat.PLAIN_TEXT_DIR:
        for text in stream_records(manifest, counters):
            yield text.encode("utf-8")
        return
    for shard in manifest.shard_paths:
        try:
            opener = gzip.open if manifest.record_format == RecordFormat.JSONL_GZ else open
            with opener(shard, "rb") as fh:
                for raw in fh:
                    fast = _fast_jsonl_text(raw)
                    if fast is not None:
                        counters.tries += 1
                        yield fast
                        continue
                    try:
                        obj = json.loads(raw)
                        text = obj["text"]
                        if not isinstance(text, str):
                            raise TypeError
                    except (ValueError, KeyError, TypeError):
                        counters.excepts += 1
                        continue
                    counters.tries += 1
                    yield text.encode("utf-8")
        except (OSError, EOFError, gzip.BadGzipFile) as exc:
            counters.shard_errors.append(f"{shard}: {exc}")
            continue


# ---------------------------------------------------------------------------
# Sentence segmentation
# ---------------------------------------------------------------------------

# Tokens (lowercased, no trailing dot) that do not end a sentence when
# followed by a period.
_ABBREVIATIONS = frozenset(
    """
    dr mr mrs ms prof st jr sr rev fr hon gen col capt lt sgt gov pres sen rep
    vs etc cf al ca approx dept univ assn bros inc ltd co corp fig figs no nos
    vol vols pp ed eds trans repr ch chs sec secs art arts
    jan feb mar apr jun jul aug sep sept oct nov dec
    mon tue tues wed thu thur thurs fri sat sun
    mt ft ave blvd rd
    """.split()
)

_TERMINALS = ".!?"
_CLOSERS = "\"')]}’”»"
_OPENERS = "\"'([{‘“«"

_WORD_BEFORE = re.compile(r"([A-Za-z][A-Za-z.\-']*)$")


def _is_abbreviation(prefix: str) -> bool:
    m = _WORD_BEFORE.search(prefix)
    if not m:
        return False
    token = m.group(1)
    if len(token) == 1 and token.isupper():
        return True  # single-letter initial, "A. B. Smith"
    low = token.lower().rstrip(".")
    if low in _ABBREVIATIONS:
        return True
    # Dotted forms such as "e.g", "i.e", "U.S", "a.m" (final dot is the
    # terminal under inspection).
    if "." in low and all(len(part) <= 2 for part in low.split(".") if part):
        return True
    return False


def segment_sentences(text: str) -> list[str]:
    """Deterministic rule-based sentence segmentation.

    Splits after runs of terminal punctuation (plus trailing closing
    quotes/brackets) that are followed by whitespace and a non-lowercase
    character, unless the preceding token is a known abbreviation or initial.
    Every output sentence is a stripped contiguous slice of ``text``.
    """
    if not text:
        return []
    sentences: list[str] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch not in _TERMINALS:
            i += 1
            continue
        j = i
        while j < n and text[j] in _TERMINALS:
            j += 1
        while j < n and text[j] in _CLOSERS:
            j += 1
        # Candidate boundary at j: require end-of-text, or whitespace followed
        # by something that plausibly starts a sentence.
        if j < n:
            if not text[j].isspace():
                i = j
                continue
            k = j
            while k < n and text[k].isspace():
                k += 1
            if k < n:
                nxt = text[k]
                if nxt.islower():
                    i = j
                    continue
        if ch == "." and text[i : i + 2] != ".." and _is_abbreviation(text[:i]):
            i = j
            continue
        piece = text[start:j].strip()
        if piece:
            sentences.append(piece)
        start = j
        i = j
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


_WS_RUN = re.compile(r"\s+")


def normalize(text: str) -> str:
    """NFC-compose, collapse whitespace runs to single spaces, strip ends."""
    return _WS_RUN.sub(" ", unicodedata.normalize("NFC", text)).strip()
