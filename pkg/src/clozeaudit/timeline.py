"""Ground-truth timelines: event schema, CSV parsing/validation, prompt rendering.

A timeline is an ordered list of dated, typed, one-sentence event records for
one character, each carrying a verbatim evidence quote and source doc ids.
The CSV dialect is RFC 4180; the column list is fixed by ``CSV_COLUMNS``.
"""

from __future__ import annotations

import csv
import io
import re
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Document
from .errors import TimelineFormatError, TimelineValidationError


class EventType(str, Enum):
    AGENTIVE = "agentive"
    RELATIONAL = "relational"
    OBSERVATIONAL = "observational"
    COGNITIVE = "cognitive"
    ROLE = "role"


DATE_PRECISIONS = ("day", "month", "year", "decade", "unknown")
CONFIDENCES = ("high", "medium", "low")

MAX_SUMMARY_WORDS = 30
MAX_EVIDENCE_WORDS = 50

CSV_COLUMNS = (
    "character",
    "start_date",
    "date_precision",
    "event_summary",
    "event_type",
    "evidence",
    "confidence",
    "sources",
    "notes",
)

_DATE_SHAPES = {
    "day": re.compile(r"^\d{4}-\d{2}-\d{2}$"),
    "month": re.compile(r"^\d{4}-\d{2}$"),
    "year": re.compile(r"^\d{4}$"),
    "decade": re.compile(r"^\d{4}$"),
}


def word_count(text: str) -> int:
    """Whitespace-delimited token count (hyphenated compounds count once)."""
    return len(text.split())


@dataclass(frozen=True)
class Event:
    summary: str
    event_type: EventType
    start_date: str = ""          # YYYY | YYYY-MM | YYYY-MM-DD, empty if unknown
    date_precision: str = "unknown"
    evidence: str = ""
    confidence: str = "medium"
    sources: tuple[str, ...] = ()
    notes: str = ""

    @property
    def dated(self) -> bool:
        return bool(self.start_date)


@dataclass(frozen=True)
class Timeline:
    character: str
    events: tuple[Event, ...]

    def __len__(self) -> int:
        return len(self.events)


def _validate_event_row(row: dict, rownum: int, violations: list) -> Event | None:
    etype_raw = row.get("event_type", "").strip()
    try:
        etype = EventType(etype_raw)
    except ValueError:
        violations.append((rownum, "event_type", f"unknown label {etype_raw!r}"))
        etype = None

    summary = row.get("event_summary", "").strip()
    if not summary:
        violations.append((rownum, "event_summary", "empty"))
    elif word_count(summary) > MAX_SUMMARY_WORDS:
        violations.append(
            (rownum, f"summary <= {MAX_SUMMARY_WORDS} words", f"{word_count(summary)} words"))

    evidence = row.get("evidence", "").strip()
    if word_count(evidence) > MAX_EVIDENCE_WORDS:
        violations.append(
            (rownum, f"evidence <= {MAX_EVIDENCE_WORDS} words", f"{word_count(evidence)} words"))

    precision = row.get("date_precision", "").strip() or "unknown"
    if precision not in DATE_PRECISIONS:
        violations.append((rownum, "date_precision", f"unknown precision {precision!r}"))
        precision = "unknown"
    date = row.get("start_date", "").strip()
    if precision == "unknown":
        if date:
            violations.append((rownum, "date/precision consistency",
                               f"date {date!r} given with precision 'unknown'"))
    else:
        shape = _DATE_SHAPES[precision]
        if not shape.match(date):
            violations.append((rownum, "date/precision consistency",
                               f"date {date!r} does not match precision {precision!r}"))

    confidence = row.get("confidence", "").strip() or "medium"
    if confidence not in CONFIDENCES:
        violations.append((rownum, "confidence", f"unknown level {confidence!r}"))

    if etype is None:
        return None
    sources = tuple(s for s in re.split(r"[;,\s]+", row.get("sources", "").strip()) if s)
    return Event(
        summary=summary,
        event_type=etype,
        start_date=date,
        date_precision=precision,
        evidence=evidence,
        confidence=confidence,
        sources=sources,
        notes=row.get("notes", "").strip(),
    )


def parse_timeline_csv(source) -> Timeline:
    """Parse and validate one timeline CSV (path, file object, or string content).

    Raises TimelineFormatError on a missing/invalid header and
    TimelineValidationError listing every violated row and rule. A header-only
    file yields an empty timeline with a warning.
    """
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TimelineFormatError("empty file: missing header") from None
    if tuple(h.strip() for h in header) != CSV_COLUMNS:
        raise TimelineFormatError(
            f"bad header: expected {','.join(CSV_COLUMNS)}, got {','.join(header)}")

    violations: list = []
    events: list[Event] = []
    character = ""
    for rownum, fields in enumerate(reader, start=2):
        if not fields or all(not f.strip() for f in fields):
            continue
        if len(fields) != len(CSV_COLUMNS):
            violations.append((rownum, "column count",
                               f"expected {len(CSV_COLUMNS)} fields, got {len(fields)}"))
            continue
        row = dict(zip(CSV_COLUMNS, fields))
        if not character:
            character = row["character"].strip()
        event = _validate_event_row(row, rownum, violations)
        if event is not None:
            events.append(event)
    if violations:
        raise TimelineValidationError(violations)
    if not events:
        warnings.warn("header-only timeline file: empty timeline")
    return sort_events(Timeline(character=character, events=tuple(events)))


def write_timeline_csv(timeline: Timeline, target=None) -> str:
    """Serialize a timeline back to the CSV dialect; returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for ev in timeline.events:
        writer.writerow([
            timeline.character,
            ev.start_date,
            ev.date_precision,
            ev.summary,
            ev.event_type.value,
            ev.evidence,
            ev.confidence,
            ";".join(ev.sources),
            ev.notes,
        ])
    text = buf.getvalue()
    if target is not None:
        if isinstance(target, (str, Path)):
            Path(target).write_text(text, encoding="utf-8")
        else:
            target.write(text)
    return text


def sort_events(timeline: Timeline) -> Timeline:
    """Stable ascending sort by start_date with undated events placed last."""
    ordered = sorted(timeline.events, key=lambda ev: (0, ev.start_date) if ev.dated else (1, ""))
    return replace(timeline, events=tuple(ordered))


# ---------------------------------------------------------------------------
# Extraction prompt rendering
# ---------------------------------------------------------------------------

_FENCE_OPEN = "[["
_FENCE_CLOSE = "]]"


def _load_template(name: str) -> str:
    return resources.files("clozeaudit.templates").joinpath(name).read_text(encoding="utf-8")


def _escape_fences(text: str, doc_id: str) -> str:
    if _FENCE_OPEN in text or _FENCE_CLOSE in text:
        warnings.warn(f"document {doc_id!r} contains fence tokens; escaping")
        text = text.replace(_FENCE_OPEN, "[ [").replace(_FENCE_CLOSE, "] ]")
    return text


def _doc_block(index: int, doc: Document) -> str:
    year = "" if doc.pub_year is None else str(doc.pub_year)
    return (
        f"[[BEGIN DOC: D{index}]]\n"
        f"meta:\n"
        f"title={_escape_fences(doc.title, doc.doc_id)}\n"
        f"author={_escape_fences(doc.author, doc.doc_id)}\n"
        f"collection_title={_escape_fences(doc.collection_title, doc.doc_id)}\n"
        f"pub_place={_escape_fences(doc.pub_place, doc.doc_id)}\n"
        f"pub_year={year}\n"
        f"\n"
        f"content:\n"
        f"{_escape_fences(doc.text, doc.doc_id)}\n"
        f"[[END DOC: D{index}]]"
    )


def render_extraction_prompt(character: str, docs: Sequence[Document]) -> str:
    """Instantiate the timeline-extraction prompt for one character.

    Documents are fenced D1..Dk in input order; fence tokens occurring inside
    document content are escaped with a warning.
    """
    if not docs:
        raise ValueError("at least one document is required")
    template = _load_template("extraction.txt")
    blocks = "\n\n".join(_doc_block(i + 1, doc) for i, doc in enumerate(docs))
    return template.replace("{character}", character).replace("{documents}", blocks)
