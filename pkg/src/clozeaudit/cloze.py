"""Cloze instance construction and prompt rendering.

Three masking modes over a timeline: FULL (one whole event summary), PARTIAL
(the trailing tokens of one event, revealing a left prefix), and NGRAM (k
consecutive events). The placeholder emitted everywhere is the literal string
``[MASKED]``. Prompt templates live as checked-in text files; each is either a
system message or an instruction prefix concatenated ahead of the base prompt.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .timeline import Timeline

MASK_TOKEN = "[MASKED]"
UNDATED = "undated"


class MaskKind(str, Enum):
    FULL = "full"
    PARTIAL = "partial"
    NGRAM = "ngram"


class TemplateId(str, Enum):
    BASE = "base"
    CONFABULATION = "confabulation"
    NULL_SHOT = "null_shot"
    ECCENTRIC = "eccentric"
    LLM_DISCUSSION = "llm_discussion"
    HALUEVAL = "halueval"
    HUMAN_HALLUCINATION = "human_hallucination"


# Role each template plays when composed with the base instruction prompt.
_SYSTEM_TEMPLATES = {
    TemplateId.CONFABULATION,
    TemplateId.ECCENTRIC,
    TemplateId.LLM_DISCUSSION,
    TemplateId.HUMAN_HALLUCINATION,
}
_PREFIX_TEMPLATES = {TemplateId.NULL_SHOT, TemplateId.HALUEVAL}


@dataclass(frozen=True)
class MaskSpec:
    kind: MaskKind
    position: int                      # 1-based index of the (first) masked event
    k: int = 1                         # window size, NGRAM only
    masked_token_count: int = 0        # PARTIAL only


@dataclass(frozen=True)
class ClozeInstance:
    instance_id: str
    character: str
    lines: tuple[str, ...]             # rendered timeline lines with placeholder(s)
    spec: MaskSpec
    gold: tuple[str, ...]              # 1 entry (FULL/PARTIAL) or k (NGRAM)
    date_context: tuple[str, ...]      # dates of the masked slot(s)
    masked_event_types: tuple[str, ...]
    timeline_length: int


def event_date(ev) -> str:
    return ev.start_date if ev.start_date else UNDATED


def render_timeline_lines(timeline: Timeline) -> list[str]:
    """Numbered "i. <date>, <summary>" lines for an unmasked timeline."""
    return [
        f"{i}. {event_date(ev)}, {ev.summary}"
        for i, ev in enumerate(timeline.events, start=1)
    ]


def _masked_line(index: int, date: str, revealed_prefix: str = "") -> str:
    slot = f"{revealed_prefix} {MASK_TOKEN}" if revealed_prefix else MASK_TOKEN
    return f"{index}. {date}, {slot}"


def _instance_id(character: str, spec: MaskSpec) -> str:
    parts = [character, spec.kind.value, str(spec.position)]
    if spec.kind == MaskKind.NGRAM:
        parts.append(f"k{spec.k}")
    if spec.kind == MaskKind.PARTIAL:
        parts.append(f"m{spec.masked_token_count}")
    return ":".join(parts)


def mask_full(timeline: Timeline, m: int) -> ClozeInstance:
    """Replace event m's summary with the placeholder; gold is that summary."""
    if not 1 <= m <= len(timeline):
        raise ValueError(f"mask position {m} out of range 1..{len(timeline)}")
    lines = render_timeline_lines(timeline)
    ev = timeline.events[m - 1]
    lines[m - 1] = _masked_line(m, event_date(ev))
    spec = MaskSpec(kind=MaskKind.FULL, position=m)
    return ClozeInstance(
        instance_id=_instance_id(timeline.character, spec),
        character=timeline.character,
        lines=tuple(lines),
        spec=spec,
        gold=(ev.summary,),
        date_context=(event_date(ev),),
        masked_event_types=(ev.event_type.value,),
        timeline_length=len(timeline),
    )


def mask_partial(timeline: Timeline, m: int, masked_tokens: int) -> ClozeInstance:
    """Mask the trailing ``masked_tokens`` tokens of event m, revealing the prefix."""
    if not 1 <= m <= len(timeline):
        raise ValueError(f"mask position {m} out of range 1..{len(timeline)}")
    ev = timeline.events[m - 1]
    tokens = ev.summary.split()
    w = len(tokens)
    if not 1 <= masked_tokens <= w:
        raise ValueError(f"masked_tokens {masked_tokens} out of range 1..{w}")
    prefix = " ".join(tokens[: w - masked_tokens])
    lines = render_timeline_lines(timeline)
    lines[m - 1] = _masked_line(m, event_date(ev), revealed_prefix=prefix)
    spec = MaskSpec(kind=MaskKind.PARTIAL, position=m, masked_token_count=masked_tokens)
    return ClozeInstance(
        instance_id=_instance_id(timeline.character, spec),
        character=timeline.character,
        lines=tuple(lines),
        spec=spec,
        gold=(ev.summary,),
        date_context=(event_date(ev),),
        masked_event_types=(ev.event_type.value,),
        timeline_length=len(timeline),
    )


def partial_sweep(timeline: Timeline, m: int) -> list[ClozeInstance]:
    """All partial masks of event m, from fully masked down to one token."""
    w = len(timeline.events[m - 1].summary.split())
    return [mask_partial(timeline, m, masked) for masked in range(w, 0, -1)]


def mask_ngram(timeline: Timeline, start: int, k: int) -> ClozeInstance:
    """Mask k consecutive events starting at ``start``; gold has k entries in order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if start < 1 or start + k - 1 > len(timeline):
        raise ValueError(
            f"window [{start}, {start + k - 1}] out of range for {len(timeline)} events")
    lines = render_timeline_lines(timeline)
    golds, dates, types = [], [], []
    for pos in range(start, start + k):
        ev = timeline.events[pos - 1]
        lines[pos - 1] = _masked_line(pos, event_date(ev))
        golds.append(ev.summary)
        dates.append(event_date(ev))
        types.append(ev.event_type.value)
    spec = MaskSpec(kind=MaskKind.NGRAM, position=start, k=k)
    return ClozeInstance(
        instance_id=_instance_id(timeline.character, spec),
        character=timeline.character,
        lines=tuple(lines),
        spec=spec,
        gold=tuple(golds),
        date_context=tuple(dates),
        masked_event_types=tuple(types),
        timeline_length=len(timeline),
    )


def ngram_windows(timeline: Timeline, k: int) -> list[ClozeInstance]:
    """Slide the k-window over every valid start position."""
    return [mask_ngram(timeline, start, k) for start in range(1, len(timeline) - k + 2)]


def unmask(instance: ClozeInstance) -> list[str]:
    """Substitute the gold answers back into the masked slots."""
    lines = list(instance.lines)
    gold = iter(instance.gold)
    if instance.spec.kind == MaskKind.NGRAM:
        positions = range(instance.spec.position, instance.spec.position + instance.spec.k)
    else:
        positions = [instance.spec.position]
    for pos, answer in zip(positions, gold):
        date = instance.date_context[pos - instance.spec.position]
        lines[pos - 1] = f"{pos}. {date}, {answer}"
    return lines


# ---------------------------------------------------------------------------
# Prompt rendering
# ---------------------------------------------------------------------------

def load_template_text(template: TemplateId) -> str:
    return resources.files("clozeaudit.templates").joinpath(f"{template.value}.txt").read_text(
        encoding="utf-8")


def template_hash(template: TemplateId) -> str:
    return hashlib.sha256(load_template_text(template).encode("utf-8")).hexdigest()


def _timeline_block(instance: ClozeInstance, event_type_hint: bool) -> str:
    lines = list(instance.lines)
    if event_type_hint:
        if instance.spec.kind == MaskKind.NGRAM:
            masked = range(instance.spec.position, instance.spec.position + instance.spec.k)
        else:
            masked = [instance.spec.position]
        for offset, pos in enumerate(masked):
            lines[pos - 1] += f" (event type: {instance.masked_event_types[offset]})"
    return "\n".join(lines)


def render_cloze_prompt(instance: ClozeInstance, template: TemplateId = TemplateId.BASE,
                        event_type_hint: bool = False, metadata: dict | None = None,
                        ) -> tuple[str | None, str]:
    """Return (system, user) messages for one instance under one template.

    NULL_SHOT substitutes document metadata (title, collection_title, pub_year)
    into its prefix and raises if any of those fields is missing.
    """
    base = load_template_text(TemplateId.BASE).replace(
        "{TIMELINE}", _timeline_block(instance, event_type_hint))
    if template == TemplateId.BASE:
        return None, base
    text = load_template_text(template)
    if template == TemplateId.NULL_SHOT:
        meta = metadata or {}
        missing = [k for k in ("title", "collection_title", "pub_year") if not meta.get(k)]
        if missing:
            raise ValueError(f"null_shot template requires metadata fields: {missing}")
        text = (text.replace("{title}", str(meta["title"]))
                    .replace("{collection_title}", str(meta["collection_title"]))
                    .replace("{pub_year}", str(meta["pub_year"])))
    if template in _SYSTEM_TEMPLATES:
        return text.rstrip("\n"), base
    assert template in _PREFIX_TEMPLATES
    return None, text.rstrip("\n") + "\n\n" + base


# ---------------------------------------------------------------------------
# Model-output parsing
# ---------------------------------------------------------------------------

_LINE_DECORATION = re.compile(r"^\s*(?:[-*•]\s+|\(?\d+[.)]\s+)?")


@dataclass(frozen=True)
class ParsedOutput:
    lines: tuple[str, ...]
    unparseable: bool


def parse_model_output(text: str, expected_lines: int = 1) -> ParsedOutput:
    """First ``expected_lines`` nonempty lines, stripped of list numbering and
    bullets. Fewer nonempty lines than expected flags the output UNPARSEABLE."""
    if expected_lines < 1:
        raise ValueError("expected_lines must be >= 1")
    cleaned = []
    for raw in text.splitlines():
        line = _LINE_DECORATION.sub("", raw).strip()
        if line:
            cleaned.append(line)
        if len(cleaned) == expected_lines:
            break
    if len(cleaned) < expected_lines:
        return ParsedOutput(lines=tuple(cleaned), unparseable=True)
    return ParsedOutput(lines=tuple(cleaned), unparseable=False)


# ---------------------------------------------------------------------------
# JSON-lines envelope
# ---------------------------------------------------------------------------

def instance_to_json_obj(instance: ClozeInstance, template: TemplateId, hint: bool) -> dict:
    return {
        "instance_id": instance.instance_id,
        "character": instance.character,
        "spec": {
            "kind": instance.spec.kind.value,
            "position": instance.spec.position,
            "k": instance.spec.k,
            "masked_token_count": instance.spec.masked_token_count,
        },
        "rendered_timeline": list(instance.lines),
        "gold": list(instance.gold),
        "date_context": list(instance.date_context),
        "masked_event_types": list(instance.masked_event_types),
        "timeline_length": instance.timeline_length,
        "template_id": template.value,
        "hint": hint,
    }


def instance_from_json_obj(obj: dict) -> tuple[ClozeInstance, TemplateId, bool]:
    spec = MaskSpec(
        kind=MaskKind(obj["spec"]["kind"]),
        position=int(obj["spec"]["position"]),
        k=int(obj["spec"].get("k", 1)),
        masked_token_count=int(obj["spec"].get("masked_token_count", 0)),
    )
    instance = ClozeInstance(
        instance_id=obj["instance_id"],
        character=obj["character"],
        lines=tuple(obj["rendered_timeline"]),
        spec=spec,
        gold=tuple(obj["gold"]),
        date_context=tuple(obj["date_context"]),
        masked_event_types=tuple(obj["masked_event_types"]),
        timeline_length=int(obj["timeline_length"]),
    )
    return instance, TemplateId(obj["template_id"]), bool(obj["hint"])
